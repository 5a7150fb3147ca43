//! Subcommand implementations. Every command is a pure function of
//! (inputs, flags, seed): result files and stdout are byte-identical across
//! reruns; only the manifest sidecar carries timing.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use gwdict_core::approx::{
    localize, nonlinear_approx, omp, snr_db, snr_from_nmse, thresholded_least_squares,
    AtomCollection, DeltaBasis, DenseBasis, Method,
};
use gwdict_core::dictionary::{build_pc_dict, build_ps_dict, dict_stats, Dictionary};
use gwdict_core::graph::Graph;
use gwdict_core::io::{
    default_labels, format_basis, format_edge_list, format_eigenpairs, format_signal,
    format_triplets, read_edge_list, read_signal, LoadedGraph, TreeJson,
};
use gwdict_core::multires::{decompose, wavelet_basis, PartitionTree};
use gwdict_core::partition::{bisect, verify_bisection};
use gwdict_core::signals::{add_noise, gen_graph, gen_pbl, gen_pc, gen_pieces, GraphFamily};
use gwdict_core::sparse::SparseVector;
use gwdict_core::spectral::{gft, sym_eig};
use gwdict_core::{Error, ErrorClass};

use crate::manifest::{emit, sibling, ManifestBuilder};
use crate::{DictChoice, LocalizeDict, Strategy, SynthFamily};

/// Command failure with the exit code it maps to.
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::InvalidInput => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Invariant => 4,
        };
        CliError { message: e.to_string(), code }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { message: e.to_string(), code: 2 }
    }
}

pub type CmdResult = Result<(), CliError>;

fn load_graph(path: &PathBuf) -> Result<LoadedGraph, CliError> {
    Ok(read_edge_list(path)?)
}

/// Connectivity gate with a message that names the components.
fn require_connected(loaded: &LoadedGraph) -> Result<(), CliError> {
    let g = &loaded.graph;
    let n = g.node_count();
    let comps = g.connected_components(&(0..n).collect::<Vec<_>>());
    if comps.len() <= 1 {
        return Ok(());
    }
    let mut parts = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        let mut names: Vec<&str> =
            c.nodes().iter().take(8).map(|&v| loaded.labels[v].as_str()).collect();
        if c.len() > 8 {
            names.push("…");
        }
        parts.push(format!("component {} ({} nodes): [{}]", i + 1, c.len(), names.join(", ")));
    }
    Err(CliError {
        message: format!("graph is disconnected: {}", parts.join("; ")),
        code: 2,
    })
}

fn write_result(text: &str, path: Option<PathBuf>) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- partition

#[derive(Serialize)]
struct PartitionOutput {
    n: usize,
    v1: Vec<String>,
    v2: Vec<String>,
    hubs: (String, String),
    median: i64,
    certificate: CertificateOutput,
}

#[derive(Serialize)]
struct CertificateOutput {
    connected_left: bool,
    connected_right: bool,
    balance_gap: usize,
    bound: usize,
    bound_holds: bool,
    repair_fired: bool,
    fallback_fired: bool,
}

pub fn cmd_partition(graph: PathBuf, out: Option<PathBuf>) -> CmdResult {
    let mut mf = ManifestBuilder::new("partition");
    mf.input(&graph)?;
    let loaded = load_graph(&graph)?;
    if loaded.graph.node_count() < 2 {
        return Err(CliError { message: "graph too small: need at least 2 nodes".into(), code: 2 });
    }
    require_connected(&loaded)?;

    let b = bisect(&loaded.graph)?;
    let cert = verify_bisection(&loaded.graph, &b)?;
    let name = |v: usize| loaded.labels[v].clone();
    let output = PartitionOutput {
        n: loaded.graph.node_count(),
        v1: b.left.nodes().iter().map(|&v| name(v)).collect(),
        v2: b.right.nodes().iter().map(|&v| name(v)).collect(),
        hubs: (name(b.hubs.0), name(b.hubs.1)),
        median: b.median,
        certificate: CertificateOutput {
            connected_left: cert.connected_left,
            connected_right: cert.connected_right,
            balance_gap: cert.balance_gap,
            bound: cert.bound,
            bound_holds: cert.bound_holds,
            repair_fired: cert.repair_fired,
            fallback_fired: cert.fallback_fired,
        },
    };
    let text = serde_json::to_string_pretty(&output).expect("serializable") + "\n";
    print!("{text}");
    write_result(&text, out.as_ref().map(|p| sibling(p, "json")))?;
    emit(mf.finish(), out.as_ref())?;
    Ok(())
}

// ----------------------------------------------------------------- wavelets

#[derive(Serialize)]
struct WaveletsSummary {
    n: usize,
    depth: usize,
    columns: usize,
    nnz: usize,
}

pub fn cmd_wavelets(graph: PathBuf, out: PathBuf) -> CmdResult {
    let mut mf = ManifestBuilder::new("wavelets");
    mf.input(&graph)?;
    let loaded = load_graph(&graph)?;
    require_connected(&loaded)?;

    let tree = decompose(&loaded.graph)?;
    let basis = wavelet_basis(&tree);
    std::fs::write(sibling(&out, "basis.csv"), format_basis(&basis))?;
    let tree_json = serde_json::to_string_pretty(&TreeJson::from(&tree)).expect("serializable");
    std::fs::write(sibling(&out, "tree.json"), tree_json + "\n")?;

    let summary = WaveletsSummary {
        n: tree.graph_size(),
        depth: tree.depth(),
        columns: basis.columns().len(),
        nnz: basis.nnz(1e-12),
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    emit(mf.finish(), Some(&out))?;
    Ok(())
}

// --------------------------------------------------------------------- dict

#[derive(Serialize)]
struct AtomInfo {
    atom: usize,
    tree_node: usize,
    level: usize,
    spectral_index: usize,
    piece: Vec<String>,
}

#[derive(Serialize)]
struct DictSummary {
    kind: String,
    bandwidth: Option<usize>,
    atom_count: usize,
    nnz: usize,
    coherence: f64,
}

pub fn cmd_dict(
    graph: PathBuf,
    kind: DictChoice,
    bandwidth: usize,
    raw: bool,
    out: PathBuf,
) -> CmdResult {
    let mut mf = ManifestBuilder::new("dict");
    mf.input(&graph)?;
    let loaded = load_graph(&graph)?;
    require_connected(&loaded)?;

    let tree = decompose(&loaded.graph)?;
    let (dict, kind_name) = match kind {
        DictChoice::Pc => (build_pc_dict(&tree), "pc"),
        DictChoice::Ps => (build_ps_dict(&loaded.graph, &tree, bandwidth)?, "ps"),
        _ => {
            return Err(CliError {
                message: "dict dump supports --kind pc or ps".into(),
                code: 2,
            })
        }
    };

    let columns: Vec<SparseVector> = dict.atoms().iter().map(|a| a.vector.clone()).collect();
    std::fs::write(sibling(&out, "atoms.csv"), format_triplets(&columns))?;
    if raw {
        let raws: Vec<SparseVector> = dict.atoms().iter().map(|a| a.raw_indicator()).collect();
        std::fs::write(sibling(&out, "raw.csv"), format_triplets(&raws))?;
    }

    let atom_map: Vec<AtomInfo> = dict
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| AtomInfo {
            atom: i,
            tree_node: a.tree_node,
            level: a.level,
            spectral_index: a.spectral_index,
            piece: tree
                .node(a.tree_node)
                .piece
                .nodes()
                .iter()
                .map(|&v| loaded.labels[v].clone())
                .collect(),
        })
        .collect();
    std::fs::write(
        sibling(&out, "atoms.json"),
        serde_json::to_string_pretty(&atom_map).expect("serializable") + "\n",
    )?;

    let stats = dict_stats(&dict);
    let summary = DictSummary {
        kind: kind_name.to_string(),
        bandwidth: dict.bandwidth(),
        atom_count: stats.atom_count,
        nnz: stats.nnz,
        coherence: stats.coherence,
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    emit(mf.finish(), Some(&out))?;
    Ok(())
}

// ---------------------------------------------------------------------- eig

pub fn cmd_eig(graph: PathBuf, out: Option<PathBuf>) -> CmdResult {
    let mut mf = ManifestBuilder::new("eig");
    mf.input(&graph)?;
    let loaded = load_graph(&graph)?;
    let eigen = sym_eig(&loaded.graph.laplacian())?;
    let text = format_eigenpairs(&eigen);
    print!("{text}");
    write_result(&text, out.as_ref().map(|p| sibling(p, "csv")))?;
    emit(mf.finish(), out.as_ref())?;
    Ok(())
}

// ------------------------------------------------------------------- approx

enum Atoms {
    Dict(Dictionary),
    Dense(DenseBasis),
    Delta(DeltaBasis),
}

impl Atoms {
    fn collection(&self) -> &dyn AtomCollection {
        match self {
            Atoms::Dict(d) => d,
            Atoms::Dense(b) => b,
            Atoms::Delta(d) => d,
        }
    }

    fn is_redundant(&self) -> bool {
        matches!(self, Atoms::Dict(_))
    }
}

#[derive(Serialize, Clone)]
struct ApproxRow {
    budget: usize,
    nmse: f64,
    snr_db: f64,
    method: String,
}

#[derive(Serialize)]
struct ApproxSummary {
    dict: String,
    bandwidth: Option<usize>,
    strategy: String,
    tol: f64,
    rows: Vec<ApproxRow>,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_approx(
    graph: PathBuf,
    signal: PathBuf,
    dict: DictChoice,
    bandwidth: usize,
    budgets: Vec<usize>,
    strategy: Strategy,
    tol: f64,
    out: Option<PathBuf>,
) -> CmdResult {
    let mut mf = ManifestBuilder::new("approx");
    mf.input(&graph)?;
    mf.input(&signal)?;
    let loaded = load_graph(&graph)?;
    require_connected(&loaded)?;
    let x = read_signal(&signal, &loaded.labels)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(CliError { message: "signal has zero norm".into(), code: 2 });
    }
    if budgets.is_empty() || budgets.contains(&0) {
        return Err(CliError { message: "budgets must be positive".into(), code: 2 });
    }
    let mut budgets = budgets;
    budgets.sort_unstable();
    budgets.dedup();

    let g = &loaded.graph;
    let n = g.node_count();
    let (atoms, dict_name, dict_bandwidth) = match dict {
        DictChoice::Pc => {
            let tree = decompose(g)?;
            (Atoms::Dict(build_pc_dict(&tree)), "pc", None)
        }
        DictChoice::Ps => {
            let tree = decompose(g)?;
            (Atoms::Dict(build_ps_dict(g, &tree, bandwidth)?), "ps", Some(bandwidth))
        }
        DictChoice::Gft => {
            let all: Vec<usize> = (0..n).collect();
            let basis = gft(&g.induced_subgraph(&all)?, n)?;
            (Atoms::Dense(DenseBasis::from_columns(basis.eigen().vectors().clone())), "gft", None)
        }
        DictChoice::Delta => (Atoms::Delta(DeltaBasis { n }), "delta", None),
    };
    let collection = atoms.collection();
    let atom_count = collection.atom_count();

    // One greedy pass answers every budget; prefixes of the run are the
    // smaller-budget solutions.
    let omp_code = if matches!(strategy, Strategy::Omp | Strategy::Best) {
        let max_budget = budgets.iter().copied().max().unwrap().min(atom_count);
        Some(omp(collection, &x, max_budget, tol)?)
    } else {
        None
    };
    let x_norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut rows: Vec<ApproxRow> = Vec::new();
    for &budget in &budgets {
        let clamped = budget.min(atom_count);
        let nla = if matches!(strategy, Strategy::Nla | Strategy::Best) {
            let (_, rep) = if atoms.is_redundant() {
                thresholded_least_squares(collection, &x, clamped)?
            } else {
                nonlinear_approx(collection, &x, clamped)?
            };
            Some(rep)
        } else {
            None
        };
        let omp_nmse = omp_code.as_ref().map(|code| {
            let r = code.residual_at_budget(clamped);
            (r / x_norm) * (r / x_norm)
        });

        let (nmse, method) = match (nla, omp_nmse) {
            (Some(rep), None) => (rep.nmse, Method::Nla),
            (None, Some(e)) => (e, Method::Omp),
            (Some(rep), Some(e)) => {
                if e <= rep.nmse {
                    (e, Method::Omp)
                } else {
                    (rep.nmse, Method::Nla)
                }
            }
            (None, None) => unreachable!("strategy covers at least one method"),
        };
        rows.push(ApproxRow {
            budget,
            nmse,
            snr_db: snr_from_nmse(nmse),
            method: method.as_str().to_string(),
        });
    }

    let mut csv = String::from("budget,nmse,snr_db,method\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.budget, r.nmse, r.snr_db, r.method));
    }
    let summary = ApproxSummary {
        dict: dict_name.to_string(),
        bandwidth: dict_bandwidth,
        strategy: strategy.name().to_string(),
        tol,
        rows,
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    if let Some(prefix) = &out {
        std::fs::write(sibling(prefix, "csv"), &csv)?;
        std::fs::write(
            sibling(prefix, "json"),
            serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
        )?;
    }
    emit(mf.finish(), out.as_ref())?;
    Ok(())
}

// ----------------------------------------------------------------- localize

#[allow(clippy::too_many_arguments)]
pub fn cmd_localize(
    graph: PathBuf,
    sigmas: Vec<f64>,
    trials: usize,
    seed: u64,
    dict: LocalizeDict,
    bandwidth: usize,
    budget: usize,
    tol: f64,
    out: Option<PathBuf>,
) -> CmdResult {
    let mut mf = ManifestBuilder::new("localize");
    mf.input(&graph)?;
    mf.seed(seed);
    let loaded = load_graph(&graph)?;
    require_connected(&loaded)?;
    let g = &loaded.graph;
    let n = g.node_count();
    if n < 2 {
        return Err(CliError { message: "graph too small: need at least 2 nodes".into(), code: 2 });
    }
    if trials == 0 || budget == 0 {
        return Err(CliError { message: "trials and budget must be positive".into(), code: 2 });
    }
    if sigmas.is_empty() || sigmas.iter().any(|s| *s < 0.0) {
        return Err(CliError { message: "sigma levels must be nonnegative".into(), code: 2 });
    }
    let mut sigmas = sigmas;
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();

    let tree = decompose(g)?;
    let dictionary = match dict {
        LocalizeDict::Pc => build_pc_dict(&tree),
        LocalizeDict::Ps => build_ps_dict(g, &tree, bandwidth)?,
    };

    // Localized events: activate one tree piece covering at most half the
    // graph (the root is excluded; tiny graphs fall back to any non-root
    // piece).
    let mut pool: Vec<usize> = (0..tree.node_count())
        .filter(|&id| {
            let len = tree.node(id).piece.len();
            len >= 2 && 2 * len <= n
        })
        .collect();
    if pool.is_empty() {
        pool = (1..tree.node_count()).collect();
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut csv = String::from("sigma,snr_in,snr_out\n");
    for &sigma in &sigmas {
        let mut sum_in = 0.0;
        let mut sum_out = 0.0;
        for _ in 0..trials {
            let piece = &tree.node(pool[rng.gen_range(0..pool.len())]).piece;
            // one-piece signal with unit sup-norm: sigma is relative to ‖x‖∞
            let mut x = vec![0.0; n];
            for &v in piece.nodes() {
                x[v] = 1.0;
            }
            let y = add_noise(&x, sigma, &mut rng)?;
            sum_in += snr_db(&y, &x)?;
            let (_, rep) = localize(&dictionary, &y, Some(&x), budget, tol)?;
            sum_out += rep.snr_db;
        }
        let t = trials as f64;
        csv.push_str(&format!("{},{},{}\n", sigma, sum_in / t, sum_out / t));
    }

    print!("{csv}");
    if let Some(prefix) = &out {
        std::fs::write(sibling(prefix, "csv"), &csv)?;
    }
    emit(mf.finish(), out.as_ref())?;
    Ok(())
}

// -------------------------------------------------------------------- synth

#[derive(Serialize)]
struct SynthGraphSidecar {
    family: String,
    params: BTreeMap<String, f64>,
    seed: u64,
    n: usize,
    edges: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_synth_graph(
    family: SynthFamily,
    nodes: Option<usize>,
    rows: Option<usize>,
    cols: Option<usize>,
    radius: Option<f64>,
    prob: Option<f64>,
    seed: u64,
    out: PathBuf,
) -> CmdResult {
    let mut mf = ManifestBuilder::new("synth graph");
    mf.seed(seed);
    let need = |opt: Option<usize>, what: &str| {
        opt.ok_or_else(|| CliError { message: format!("--{what} required for this family"), code: 2 })
    };
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    let family_enum = match family {
        SynthFamily::Path => {
            let n = need(nodes, "nodes")?;
            params.insert("nodes".into(), n as f64);
            GraphFamily::Path { n }
        }
        SynthFamily::Ring => {
            let n = need(nodes, "nodes")?;
            params.insert("nodes".into(), n as f64);
            GraphFamily::Ring { n }
        }
        SynthFamily::Grid => {
            let r = need(rows, "rows")?;
            let c = need(cols, "cols")?;
            params.insert("rows".into(), r as f64);
            params.insert("cols".into(), c as f64);
            GraphFamily::Grid { rows: r, cols: c }
        }
        SynthFamily::Star => {
            let n = need(nodes, "nodes")?;
            params.insert("nodes".into(), n as f64);
            GraphFamily::Star { n }
        }
        SynthFamily::RandomGeometric => {
            let n = need(nodes, "nodes")?;
            let r = radius.ok_or_else(|| CliError {
                message: "--radius required for random-geometric".into(),
                code: 2,
            })?;
            params.insert("nodes".into(), n as f64);
            params.insert("radius".into(), r);
            GraphFamily::RandomGeometric { n, radius: r }
        }
        SynthFamily::ErdosRenyi => {
            let n = need(nodes, "nodes")?;
            let p = prob.ok_or_else(|| CliError {
                message: "--prob required for erdos-renyi".into(),
                code: 2,
            })?;
            params.insert("nodes".into(), n as f64);
            params.insert("prob".into(), p);
            GraphFamily::ErdosRenyi { n, p }
        }
    };

    let g: Graph = gen_graph(family_enum, seed)?;
    let labels = default_labels(g.node_count());
    std::fs::write(&out, format_edge_list(&g, &labels))?;
    let sidecar = SynthGraphSidecar {
        family: family.name().to_string(),
        params,
        seed,
        n: g.node_count(),
        edges: g.edge_count(),
    };
    let text = serde_json::to_string_pretty(&sidecar).expect("serializable") + "\n";
    std::fs::write(sibling(&out, "json"), &text)?;
    print!("{text}");
    emit(mf.finish(), Some(&out))?;
    Ok(())
}

#[derive(Serialize)]
struct SynthSignalSidecar {
    kind: String,
    seed: u64,
    pieces: Vec<Vec<String>>,
    piece_values: Option<Vec<f64>>,
    bandwidth: Option<usize>,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_synth_signal(
    graph: PathBuf,
    kind: String,
    pieces: usize,
    bandwidth: usize,
    distinct: bool,
    seed: u64,
    out: PathBuf,
) -> CmdResult {
    let mut mf = ManifestBuilder::new("synth signal");
    mf.input(&graph)?;
    mf.seed(seed);
    let loaded = load_graph(&graph)?;
    require_connected(&loaded)?;
    let tree: PartitionTree = decompose(&loaded.graph)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let parts = gen_pieces(&tree, pieces, &mut rng)?;
    let label_pieces: Vec<Vec<String>> = parts
        .iter()
        .map(|p| p.nodes().iter().map(|&v| loaded.labels[v].clone()).collect())
        .collect();

    let (values, sidecar) = match kind.as_str() {
        "pc" => {
            let sig = gen_pc(&parts, &mut rng, distinct)?;
            let sidecar = SynthSignalSidecar {
                kind: "pc".into(),
                seed,
                pieces: label_pieces,
                piece_values: Some(sig.piece_values.clone()),
                bandwidth: None,
            };
            (sig.values, sidecar)
        }
        "pbl" => {
            let sig = gen_pbl(&loaded.graph, &parts, bandwidth, &mut rng)?;
            let sidecar = SynthSignalSidecar {
                kind: "pbl".into(),
                seed,
                pieces: label_pieces,
                piece_values: None,
                bandwidth: Some(bandwidth),
            };
            (sig.values, sidecar)
        }
        other => {
            return Err(CliError {
                message: format!("unknown signal kind {other:?} (expected pc or pbl)"),
                code: 2,
            })
        }
    };

    std::fs::write(&out, format_signal(&values, &loaded.labels))?;
    let text = serde_json::to_string_pretty(&sidecar).expect("serializable") + "\n";
    std::fs::write(sibling(&out, "json"), &text)?;
    print!("{text}");
    emit(mf.finish(), Some(&out))?;
    Ok(())
}
