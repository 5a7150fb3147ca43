//! Command-line front end for the graph wavelet dictionary pipeline.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 internal
//! invariant violation. `GWDICT_THREADS` caps internal parallelism; results
//! do not depend on the thread count.

mod commands;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "gwdict",
    version,
    about = "Haar-like graph wavelets and piecewise-smooth dictionaries for graph signals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DictChoice {
    Pc,
    Ps,
    Gft,
    Delta,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocalizeDict {
    Pc,
    Ps,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Best,
    Nla,
    Omp,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Best => "best",
            Strategy::Nla => "nla",
            Strategy::Omp => "omp",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthFamily {
    Path,
    Ring,
    Grid,
    Star,
    RandomGeometric,
    ErdosRenyi,
}

impl SynthFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SynthFamily::Path => "path",
            SynthFamily::Ring => "ring",
            SynthFamily::Grid => "grid",
            SynthFamily::Star => "star",
            SynthFamily::RandomGeometric => "random-geometric",
            SynthFamily::ErdosRenyi => "erdos-renyi",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Near-bisection of a connected graph with the connectivity certificate.
    Partition {
        #[arg(long)]
        graph: PathBuf,
        /// Output prefix; writes <out>.json and <out>.manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition tree plus the Haar-like wavelet basis as sparse triplets.
    Wavelets {
        #[arg(long)]
        graph: PathBuf,
        /// Output prefix; writes <out>.basis.csv and <out>.tree.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Piecewise-constant or piecewise-smooth dictionary dump.
    Dict {
        #[arg(long)]
        graph: PathBuf,
        /// Dictionary kind (pc or ps).
        #[arg(long, value_enum)]
        kind: DictChoice,
        /// Per-piece bandwidth K (ps only).
        #[arg(long, default_value_t = 10)]
        bandwidth: usize,
        /// Also dump unnormalized indicator atoms to <out>.raw.csv.
        #[arg(long)]
        raw: bool,
        /// Output prefix; writes <out>.atoms.csv and <out>.atoms.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenpairs of the graph Laplacian as CSV (values row, then rows of V).
    Eig {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Budget sweep of sparse approximation error for a signal.
    Approx {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum)]
        dict: DictChoice,
        /// Per-piece bandwidth K (ps only).
        #[arg(long, default_value_t = 10)]
        bandwidth: usize,
        /// Comma-separated coefficient budgets.
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<usize>,
        #[arg(long, value_enum, default_value = "best")]
        strategy: Strategy,
        /// OMP relative-residual stopping tolerance.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        /// Output prefix; writes <out>.csv and <out>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Denoise one-piece signals across noise levels; reports mean SNR.
    Localize {
        #[arg(long)]
        graph: PathBuf,
        /// Noise levels relative to the signal sup-norm.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2, 0.5])]
        sigma: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "ps")]
        dict: LocalizeDict,
        #[arg(long, default_value_t = 5)]
        bandwidth: usize,
        /// OMP atom budget per reconstruction.
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic graphs and model signals.
    Synth {
        #[command(subcommand)]
        what: SynthCommand,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Write a connected graph as an edge list (with JSON sidecar).
    Graph {
        #[arg(long, value_enum)]
        family: SynthFamily,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        prob: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a piecewise-constant or piecewise-bandlimited signal.
    Signal {
        #[arg(long)]
        graph: PathBuf,
        /// pc or pbl.
        #[arg(long)]
        kind: String,
        /// Number of tree-consistent pieces.
        #[arg(long)]
        pieces: usize,
        /// Per-piece bandwidth K (pbl only).
        #[arg(long, default_value_t = 5)]
        bandwidth: usize,
        /// Force pairwise-distinct piece values (pc only).
        #[arg(long)]
        distinct: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("GWDICT_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
        }
    }

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Partition { graph, out } => commands::cmd_partition(graph, out),
        Command::Wavelets { graph, out } => commands::cmd_wavelets(graph, out),
        Command::Dict { graph, kind, bandwidth, raw, out } => {
            commands::cmd_dict(graph, kind, bandwidth, raw, out)
        }
        Command::Eig { graph, out } => commands::cmd_eig(graph, out),
        Command::Approx { graph, signal, dict, bandwidth, budgets, strategy, tol, out } => {
            commands::cmd_approx(graph, signal, dict, bandwidth, budgets, strategy, tol, out)
        }
        Command::Localize {
            graph,
            sigma,
            trials,
            seed,
            dict,
            bandwidth,
            budget,
            tol,
            out,
        } => commands::cmd_localize(graph, sigma, trials, seed, dict, bandwidth, budget, tol, out),
        Command::Synth { what } => match what {
            SynthCommand::Graph { family, nodes, rows, cols, radius, prob, seed, out } => {
                commands::cmd_synth_graph(family, nodes, rows, cols, radius, prob, seed, out)
            }
            SynthCommand::Signal { graph, kind, pieces, bandwidth, distinct, seed, out } => {
                commands::cmd_synth_signal(graph, kind, pieces, bandwidth, distinct, seed, out)
            }
        },
    };

    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
