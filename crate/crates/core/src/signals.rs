//! Generators for the model signal classes and synthetic test graphs.
//!
//! Piecewise-constant signals use small integer piece values so cut counting
//! is exact; piecewise-bandlimited signals draw Gaussian coefficients over
//! per-piece Fourier columns. All generators are pure functions of their
//! inputs and an explicitly passed RNG.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graph::{Graph, Piece};
use crate::multires::PartitionTree;
use crate::spectral::gft;
use crate::{Error, Result};

/// Piecewise-constant signal: `x = Σ a_c 1_{S_c}` exactly.
#[derive(Debug, Clone)]
pub struct PcSignal {
    pub values: Vec<f64>,
    pub pieces: Vec<Piece>,
    pub piece_values: Vec<f64>,
}

/// Piecewise-bandlimited signal: per piece, the restriction lies in the
/// span of that piece's first K Fourier vectors.
#[derive(Debug, Clone)]
pub struct PblSignal {
    pub values: Vec<f64>,
    pub pieces: Vec<Piece>,
    pub bandwidth: usize,
    /// Spectral coefficients per piece, aligned with `pieces`.
    pub coefficients: Vec<Vec<f64>>,
}

impl PblSignal {
    /// A piecewise-constant template sharing the same pieces, with distinct
    /// integer values per piece (used by the sparsity bounds).
    pub fn pc_template(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.values.len()];
        for (c, piece) in self.pieces.iter().enumerate() {
            for &v in piece.nodes() {
                t[v] = (c + 1) as f64;
            }
        }
        t
    }
}

/// Samples a partition of V into exactly `count` connected pieces that are
/// all tree nodes: cut the tree at the shallowest frontier with at least
/// `count` pieces, then merge uniformly random sibling pairs until `count`
/// remain.
pub fn gen_pieces(tree: &PartitionTree, count: usize, rng: &mut ChaCha12Rng) -> Result<Vec<Piece>> {
    let n = tree.graph_size();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!(
            "piece count {count} outside [1, {n}]"
        )));
    }

    // Frontier at depth ℓ: nodes at level ℓ plus leaves above it.
    let mut frontier: Vec<usize> = Vec::new();
    for level in 0..=tree.depth() {
        frontier = (0..tree.node_count())
            .filter(|&id| {
                let node = tree.node(id);
                node.level == level || (node.is_leaf() && node.level < level)
            })
            .collect();
        if frontier.len() >= count {
            break;
        }
    }

    let mut current: Vec<usize> = frontier;
    while current.len() > count {
        // Sibling pairs with both children present; any merge keeps the
        // antichain covering V.
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        for (i, &id) in current.iter().enumerate() {
            if let Some(parent) = tree.node(id).parent {
                let (a, b) = tree.node(parent).children.expect("parent is internal");
                if id == a {
                    if let Some(j) = current.iter().position(|&x| x == b) {
                        pairs.push((parent, i, j));
                    }
                }
            }
        }
        debug_assert!(
            !pairs.is_empty(),
            "an antichain above the frontier always has a sibling pair"
        );
        pairs.sort_unstable();
        let (parent, i, j) = pairs[rng.gen_range(0..pairs.len())];
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        current.remove(hi);
        current.remove(lo);
        current.push(parent);
        current.sort_unstable();
    }

    let mut pieces: Vec<Piece> = current.iter().map(|&id| tree.node(id).piece.clone()).collect();
    pieces.sort_by_key(|p| p.min_node());
    Ok(pieces)
}

/// Piecewise-constant signal with integer piece values from `{-w..w}\{0}`
/// (w = 8, widened automatically when `distinct` needs more choices).
/// `distinct` forces pairwise-distinct values so every boundary edge counts
/// toward the cut cost.
pub fn gen_pc(pieces: &[Piece], rng: &mut ChaCha12Rng, distinct: bool) -> Result<PcSignal> {
    let c = pieces.len();
    if c == 0 {
        return Err(Error::InvalidParameter("no pieces".into()));
    }
    let n: usize = pieces.iter().map(|p| p.len()).sum();
    let w: i64 = if distinct && c > 16 { c as i64 } else { 8 };

    let piece_values: Vec<f64> = if distinct {
        let mut pool: Vec<i64> = (-w..=w).filter(|&v| v != 0).collect();
        // partial Fisher-Yates
        for i in 0..c {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        pool[..c].iter().map(|&v| v as f64).collect()
    } else {
        (0..c)
            .map(|_| loop {
                let v = rng.gen_range(-w..=w);
                if v != 0 {
                    return v as f64;
                }
            })
            .collect()
    };

    let mut values = vec![0.0; n];
    for (piece, &a) in pieces.iter().zip(&piece_values) {
        for &v in piece.nodes() {
            if v >= n {
                return Err(Error::NotAPartition(format!("node {v} outside 0..{n}")));
            }
            values[v] = a;
        }
    }
    Ok(PcSignal { values, pieces: pieces.to_vec(), piece_values })
}

/// Piecewise-bandlimited signal: per piece, standard-normal coefficients
/// over the first min(K, |piece|) subgraph Fourier vectors, zero-padded and
/// summed.
pub fn gen_pbl(
    graph: &Graph,
    pieces: &[Piece],
    bandwidth: usize,
    rng: &mut ChaCha12Rng,
) -> Result<PblSignal> {
    if bandwidth == 0 {
        return Err(Error::InvalidParameter("bandwidth must be at least 1".into()));
    }
    let n = graph.node_count();
    let mut values = vec![0.0; n];
    let mut coefficients = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let sub = graph.induced_subgraph(piece.nodes())?;
        let basis = gft(&sub, bandwidth)?;
        let coeffs: Vec<f64> = (0..basis.bandwidth())
            .map(|_| StandardNormal.sample(rng))
            .collect();
        for (c, &a) in coeffs.iter().enumerate() {
            basis.column_padded(c, n).axpy_into(a, &mut values);
        }
        coefficients.push(coeffs);
    }
    Ok(PblSignal { values, pieces: pieces.to_vec(), bandwidth, coefficients })
}

/// `y = x + ε` with `ε ~ N(0, σ²)` i.i.d.
pub fn add_noise(x: &[f64], sigma: f64, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!("negative sigma {sigma}")));
    }
    Ok(x.iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(rng);
            v + sigma * z
        })
        .collect())
}

/// Synthetic graph families standing in for the benchmark datasets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphFamily {
    Path { n: usize },
    Ring { n: usize },
    Grid { rows: usize, cols: usize },
    Star { n: usize },
    RandomGeometric { n: usize, radius: f64 },
    ErdosRenyi { n: usize, p: f64 },
}

const CONNECT_RETRIES: usize = 100;

/// Deterministic generator: connected graph for the given family and seed.
/// Random families redraw (up to 100 times) until connected.
pub fn gen_graph(family: GraphFamily, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match family {
        GraphFamily::Path { n } => {
            if n == 0 {
                return Err(Error::InvalidParameter("path needs n ≥ 1".into()));
            }
            let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
            Graph::build(n, &edges)
        }
        GraphFamily::Ring { n } => {
            if n < 3 {
                return Err(Error::InvalidParameter("ring needs n ≥ 3".into()));
            }
            let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
            edges.push((n - 1, 0, 1.0));
            Graph::build(n, &edges)
        }
        GraphFamily::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(Error::InvalidParameter("grid needs rows, cols ≥ 1".into()));
            }
            let idx = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((idx(r, c), idx(r, c + 1), 1.0));
                    }
                    if r + 1 < rows {
                        edges.push((idx(r, c), idx(r + 1, c), 1.0));
                    }
                }
            }
            Graph::build(rows * cols, &edges)
        }
        GraphFamily::Star { n } => {
            if n < 2 {
                return Err(Error::InvalidParameter("star needs n ≥ 2".into()));
            }
            let edges: Vec<_> = (1..n).map(|i| (0, i, 1.0)).collect();
            Graph::build(n, &edges)
        }
        GraphFamily::RandomGeometric { n, radius } => {
            if n == 0 || radius <= 0.0 {
                return Err(Error::InvalidParameter(
                    "geometric needs n ≥ 1, radius > 0".into(),
                ));
            }
            for _ in 0..CONNECT_RETRIES {
                let pts: Vec<(f64, f64)> =
                    (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let dx = pts[i].0 - pts[j].0;
                        let dy = pts[i].1 - pts[j].1;
                        if (dx * dx + dy * dy).sqrt() <= radius {
                            edges.push((i, j, 1.0));
                        }
                    }
                }
                let g = Graph::build(n, &edges)?;
                if g.is_connected() {
                    return Ok(g);
                }
            }
            Err(Error::UnconnectableGraph(CONNECT_RETRIES))
        }
        GraphFamily::ErdosRenyi { n, p } => {
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(
                    "erdos-renyi needs n ≥ 1, p in [0,1]".into(),
                ));
            }
            for _ in 0..CONNECT_RETRIES {
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if rng.gen::<f64>() < p {
                            edges.push((i, j, 1.0));
                        }
                    }
                }
                let g = Graph::build(n, &edges)?;
                if g.is_connected() {
                    return Ok(g);
                }
            }
            Err(Error::UnconnectableGraph(CONNECT_RETRIES))
        }
    }
}
