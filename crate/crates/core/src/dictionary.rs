//! Redundant graph dictionaries induced by the partition tree.
//!
//! The piecewise-constant dictionary holds one normalized indicator per tree
//! piece (2N−1 atoms). The piecewise-smooth dictionary replaces each
//! indicator with the first min(K, |piece|) Fourier vectors of the piece's
//! subgraph, zero-padded; with K = 1 the two coincide.

use rayon::prelude::*;

use crate::graph::{quadratic_variation, Graph, Piece};
use crate::multires::PartitionTree;
use crate::sparse::SparseVector;
use crate::spectral::{gft, sym_eig};
use crate::{Error, Result};

/// Dictionary flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictKind {
    Pc,
    Ps,
}

/// A sparse unit-norm atom with its tree provenance.
#[derive(Debug, Clone)]
pub struct Atom {
    pub vector: SparseVector,
    /// Tree node the atom activates.
    pub tree_node: usize,
    /// Tree level of that node.
    pub level: usize,
    /// Eigenvector index within the piece; 0 for PC atoms.
    pub spectral_index: usize,
}

impl Atom {
    /// Unnormalized indicator `1_S` on the atom's support, for inspection.
    pub fn raw_indicator(&self) -> SparseVector {
        SparseVector::constant_on(self.vector.dim(), self.vector.indices(), 1.0)
    }
}

/// Ordered atom collection over the pieces of one partition tree.
#[derive(Debug, Clone)]
pub struct Dictionary {
    n: usize,
    kind: DictKind,
    bandwidth: Option<usize>,
    atoms: Vec<Atom>,
}

impl Dictionary {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DictKind {
        self.kind
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Atom count, nonzero count and mutual coherence of a dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct DictStats {
    pub atom_count: usize,
    pub nnz: usize,
    /// Max |⟨aᵢ, aⱼ⟩| over distinct atoms; 0 for a single atom.
    pub coherence: f64,
}

/// One normalized indicator atom `1_S/√|S|` per tree node, in tree order.
pub fn build_pc_dict(tree: &PartitionTree) -> Dictionary {
    let n = tree.graph_size();
    let atoms = tree
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, node)| Atom {
            vector: SparseVector::constant_on(
                n,
                node.piece.nodes(),
                1.0 / (node.piece.len() as f64).sqrt(),
            ),
            tree_node: id,
            level: node.level,
            spectral_index: 0,
        })
        .collect();
    Dictionary { n, kind: DictKind::Pc, bandwidth: None, atoms }
}

/// Per tree piece, the first min(K, |piece|) subgraph Fourier vectors,
/// zero-padded to N and sign-fixed. Piece decompositions run concurrently;
/// atom order is deterministic (tree order, then spectral index).
pub fn build_ps_dict(graph: &Graph, tree: &PartitionTree, bandwidth: usize) -> Result<Dictionary> {
    if bandwidth == 0 {
        return Err(Error::InvalidParameter("bandwidth must be at least 1".into()));
    }
    let n = tree.graph_size();
    let per_piece: Vec<Result<Vec<Atom>>> = tree
        .nodes()
        .par_iter()
        .enumerate()
        .map(|(id, node)| {
            let sub = graph.induced_subgraph(node.piece.nodes())?;
            let basis = gft(&sub, bandwidth)?;
            Ok((0..basis.bandwidth())
                .map(|c| Atom {
                    vector: basis.column_padded(c, n),
                    tree_node: id,
                    level: node.level,
                    spectral_index: c,
                })
                .collect())
        })
        .collect();
    let mut atoms = Vec::new();
    for group in per_piece {
        atoms.extend(group?);
    }
    Ok(Dictionary { n, kind: DictKind::Ps, bandwidth: Some(bandwidth), atoms })
}

/// Exact counts plus mutual coherence (nonzeros counted above 1e-12).
pub fn dict_stats(dict: &Dictionary) -> DictStats {
    let nnz = dict.atoms.iter().map(|a| a.vector.nnz(1e-12)).sum();
    let mut coherence = 0.0f64;
    for i in 0..dict.atoms.len() {
        for j in (i + 1)..dict.atoms.len() {
            let ip = dict.atoms[i].vector.dot_sparse(&dict.atoms[j].vector).abs();
            coherence = coherence.max(ip);
        }
    }
    DictStats { atom_count: dict.atoms.len(), nnz, coherence }
}

/// Partition-quality constant
/// `xᵀ(λ_K·I − L_cut)x / (min_c λ^{(S_c)}_{K+1} · ‖x‖²)`.
///
/// `λ_K` is the K-th ascending global Laplacian eigenvalue (1-indexed) and
/// `L_cut` the Laplacian of the edges not internal to any piece. Requires
/// every `|S_c| > K` so the per-piece eigenvalue `λ_{K+1}` exists.
pub fn epsilon_par(graph: &Graph, pieces: &[Piece], x: &[f64], bandwidth: usize) -> Result<f64> {
    let n = graph.node_count();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    if bandwidth == 0 || bandwidth > n {
        return Err(Error::InvalidParameter(format!(
            "bandwidth {bandwidth} outside [1, {n}]"
        )));
    }
    validate_partition(n, pieces)?;
    for piece in pieces {
        if piece.len() <= bandwidth {
            return Err(Error::PieceTooSmallForBandwidth {
                size: piece.len(),
                k: bandwidth,
                idx: bandwidth + 1,
            });
        }
    }

    let lambda_k = sym_eig(&graph.laplacian())?.values()[bandwidth - 1];

    let mut piece_of = vec![usize::MAX; n];
    for (c, piece) in pieces.iter().enumerate() {
        for &v in piece.nodes() {
            piece_of[v] = c;
        }
    }
    // xᵀ L_cut x over the cut edges only.
    let cut_qv: f64 = graph
        .edges()
        .iter()
        .filter(|e| piece_of[e.j] != piece_of[e.k])
        .map(|e| {
            let d = x[e.k] - x[e.j];
            e.w * d * d
        })
        .sum();

    let min_lambda = pieces
        .par_iter()
        .map(|piece| -> Result<f64> {
            let sub = graph.induced_subgraph(piece.nodes())?;
            Ok(sym_eig(&sub.graph.laplacian())?.values()[bandwidth])
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    Ok((lambda_k * energy - cut_qv) / (min_lambda * energy))
}

fn validate_partition(n: usize, pieces: &[Piece]) -> Result<()> {
    let mut seen = vec![false; n];
    let mut total = 0usize;
    for piece in pieces {
        for &v in piece.nodes() {
            if v >= n {
                return Err(Error::NodeOutOfRange { index: v, n });
            }
            if seen[v] {
                return Err(Error::NotAPartition(format!("node {v} appears twice")));
            }
            seen[v] = true;
            total += 1;
        }
    }
    if total != n {
        return Err(Error::NotAPartition(format!("{total} of {n} nodes covered")));
    }
    Ok(())
}

/// Quadratic variation restricted to edges internal to one piece.
pub fn piece_quadratic_variation(graph: &Graph, piece: &Piece, x: &[f64]) -> Result<f64> {
    let sub = graph.induced_subgraph(piece.nodes())?;
    let local: Vec<f64> = piece.nodes().iter().map(|&v| x[v]).collect();
    quadratic_variation(&sub.graph, &local)
}

/// Max reconstruction error of expressing every wavelet basis column as
/// `α·atom(left child) + β·atom(right child)` (scaling column:
/// `γ·atom(root)`), with coefficients recovered by inner products.
pub fn wavelet_column_as_two_atoms(
    tree: &PartitionTree,
    pc: &Dictionary,
    basis: &crate::multires::WaveletBasis,
) -> Result<f64> {
    let n = tree.graph_size();
    let mut max_err = 0.0f64;
    for (col, origin) in basis.columns().iter().zip(basis.origins()) {
        let mut recon = vec![0.0; n];
        match origin {
            crate::multires::ColumnOrigin::Scaling => {
                let atom = &pc.atom(0).vector;
                let gamma = col.dot_sparse(atom);
                atom.axpy_into(gamma, &mut recon);
            }
            crate::multires::ColumnOrigin::Highpass { tree_node } => {
                let (a, b) = tree.node(*tree_node).children.ok_or_else(|| {
                    Error::InvariantViolation("highpass column on a leaf".into())
                })?;
                let (atom_a, atom_b) = (&pc.atom(a).vector, &pc.atom(b).vector);
                let alpha = col.dot_sparse(atom_a);
                let beta = col.dot_sparse(atom_b);
                atom_a.axpy_into(alpha, &mut recon);
                atom_b.axpy_into(beta, &mut recon);
            }
        }
        let dense = col.to_dense();
        for (r, d) in recon.iter().zip(&dense) {
            max_err = max_err.max((r - d).abs());
        }
    }
    Ok(max_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;
    use crate::multires::{decompose, wavelet_basis};
    use crate::spectral::gft;

    #[test]
    fn pc_dict_path4() {
        let tree = decompose(&path_graph(4)).unwrap();
        let d = build_pc_dict(&tree);
        assert_eq!(d.len(), 7);
        assert_eq!(d.atom(0).vector.to_dense(), vec![0.5; 4]);
        // leaves are Kronecker deltas
        for (i, atom) in d.atoms().iter().enumerate().skip(3) {
            assert_eq!(atom.vector.nnz(0.0), 1);
            assert_eq!(atom.vector.values(), &[1.0]);
            assert_eq!(atom.level, 2, "atom {i}");
        }
        for atom in d.atoms() {
            assert!((atom.vector.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ps_dict_path4_counts() {
        let g = path_graph(4);
        let tree = decompose(&g).unwrap();
        let d = build_ps_dict(&g, &tree, 2).unwrap();
        // pieces {4,2,2,1,1,1,1} → Σ min(2,|S|) = 2+2+2+1+1+1+1
        assert_eq!(d.len(), 10);
        assert_eq!(d.bandwidth(), Some(2));
    }

    #[test]
    fn ps_bandwidth_one_equals_pc() {
        let g = path_graph(8);
        let tree = decompose(&g).unwrap();
        let pc = build_pc_dict(&tree);
        let ps = build_ps_dict(&g, &tree, 1).unwrap();
        assert_eq!(pc.len(), ps.len());
        for (a, b) in pc.atoms().iter().zip(ps.atoms()) {
            assert_eq!(a.vector.indices(), b.vector.indices());
            for (x, y) in a.vector.values().iter().zip(b.vector.values()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let spc = dict_stats(&pc);
        let sps = dict_stats(&ps);
        assert_eq!(spc.nnz, sps.nnz);
    }

    #[test]
    fn ps_root_atoms_match_global_gft() {
        let g = path_graph(6);
        let tree = decompose(&g).unwrap();
        let ps = build_ps_dict(&g, &tree, 3).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let basis = gft(&g.induced_subgraph(&all).unwrap(), 3).unwrap();
        for c in 0..3 {
            let atom = &ps.atom(c).vector;
            assert_eq!(ps.atom(c).tree_node, 0);
            assert_eq!(ps.atom(c).spectral_index, c);
            let want = basis.column_padded(c, 6).to_dense();
            for (a, b) in atom.to_dense().iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stats_counts_and_coherence() {
        let tree = decompose(&path_graph(4)).unwrap();
        let d = build_pc_dict(&tree);
        let s = dict_stats(&d);
        assert_eq!(s.atom_count, 7);
        assert_eq!(s.nnz, 4 + 2 + 2 + 4);
        assert!(s.coherence < 1.0);
        assert!(s.coherence > 0.0);
    }

    #[test]
    fn wavelet_columns_are_two_atom_combinations() {
        let g = path_graph(4);
        let tree = decompose(&g).unwrap();
        let pc = build_pc_dict(&tree);
        let w = wavelet_basis(&tree);
        let err = wavelet_column_as_two_atoms(&tree, &pc, &w).unwrap();
        assert!(err < 1e-12);
    }

    #[test]
    fn epsilon_par_whole_graph_rayleigh() {
        let g = path_graph(6);
        let all: Vec<usize> = (0..6).collect();
        let pieces = vec![Piece::new(&g, &all).unwrap()];
        // x bandlimited to K=2: combination of the first two eigenvectors
        let basis = gft(&g.induced_subgraph(&all).unwrap(), 2).unwrap();
        let mut x = vec![0.0; 6];
        basis.column_padded(0, 6).axpy_into(1.0, &mut x);
        basis.column_padded(1, 6).axpy_into(-0.7, &mut x);
        let eps = epsilon_par(&g, &pieces, &x, 2).unwrap();
        let eig = sym_eig(&g.laplacian()).unwrap();
        let expect = eig.values()[1] / eig.values()[2];
        assert!((eps - expect).abs() < 1e-9);
        assert!(eps >= 0.0 && eps < 1.0);
    }

    #[test]
    fn epsilon_par_constant_signal_is_zero() {
        let g = path_graph(6);
        let all: Vec<usize> = (0..6).collect();
        let pieces = vec![Piece::new(&g, &all).unwrap()];
        let eps = epsilon_par(&g, &pieces, &[2.5; 6], 1).unwrap();
        assert!(eps.abs() < 1e-12);

        // split {0,1,2} | {3,4,5}: λ_1 = 0 and the cut term vanishes on a
        // constant signal, so ε stays 0
        let split = vec![
            Piece::new(&g, &[0, 1, 2]).unwrap(),
            Piece::new(&g, &[3, 4, 5]).unwrap(),
        ];
        let eps2 = epsilon_par(&g, &split, &[2.5; 6], 1).unwrap();
        assert!(eps2.abs() < 1e-12);
    }

    #[test]
    fn epsilon_par_rejects_small_pieces() {
        let g = path_graph(4);
        let pieces = vec![
            Piece::new(&g, &[0, 1]).unwrap(),
            Piece::new(&g, &[2, 3]).unwrap(),
        ];
        assert!(matches!(
            epsilon_par(&g, &pieces, &[1.0, 2.0, 3.0, 4.0], 2),
            Err(Error::PieceTooSmallForBandwidth { .. })
        ));
    }

    #[test]
    fn epsilon_par_rejects_bad_partition() {
        let g = path_graph(4);
        let pieces = vec![Piece::new(&g, &[0, 1]).unwrap()];
        assert!(matches!(
            epsilon_par(&g, &pieces, &[1.0; 4], 1),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn pc_raw_indicator_export() {
        let tree = decompose(&path_graph(4)).unwrap();
        let d = build_pc_dict(&tree);
        let raw = d.atom(0).raw_indicator();
        assert_eq!(raw.to_dense(), vec![1.0; 4]);
    }
}
