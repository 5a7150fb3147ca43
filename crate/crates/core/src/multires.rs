//! Coarse-to-fine partition tree and the Haar-like graph wavelet basis.
//!
//! [`decompose`] recursively bisects every piece until all leaves are
//! singletons; [`wavelet_basis`] turns the tree into an orthonormal basis:
//! one scaling vector `1_V/√N` plus one highpass vector per internal node,
//! positive on the child with the smaller minimum node index.

use crate::graph::{Graph, Piece};
use crate::partition::bisect;
use crate::sparse::SparseVector;
use crate::{Error, Result};

/// One node of the partition tree.
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub piece: Piece,
    /// Distance from the root (root = 0).
    pub level: usize,
    pub parent: Option<usize>,
    /// Children ordered by minimum node index.
    pub children: Option<(usize, usize)>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Binary tree of pieces: root = V, leaves = singletons, 2N−1 nodes total.
///
/// Nodes are stored breadth-first, levels ordered by the smallest node index
/// of each piece, so indices are deterministic and shared with the wavelet
/// column / dictionary atom orderings.
#[derive(Debug, Clone)]
pub struct PartitionTree {
    nodes: Vec<TreeNode>,
    n: usize,
    depth: usize,
}

impl PartitionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of graph nodes (leaves).
    pub fn graph_size(&self) -> usize {
        self.n
    }

    /// Longest root-to-leaf path length `L`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Internal node ids in storage (breadth-first) order.
    pub fn internal_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].is_leaf())
    }

    /// Checks the structural invariants: children partition their parent,
    /// leaves are singletons, and the node count is 2N−1.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != 2 * self.n - 1 {
            return Err(Error::InvariantViolation(format!(
                "tree has {} nodes, expected 2N−1 = {}",
                self.nodes.len(),
                2 * self.n - 1
            )));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            match node.children {
                None => {
                    if node.piece.len() != 1 {
                        return Err(Error::InvariantViolation(format!(
                            "leaf {id} has {} nodes",
                            node.piece.len()
                        )));
                    }
                }
                Some((a, b)) => {
                    let (pa, pb) = (&self.nodes[a].piece, &self.nodes[b].piece);
                    if pa.overlaps(pb).is_some() {
                        return Err(Error::InvariantViolation(format!(
                            "children of {id} overlap"
                        )));
                    }
                    let mut merged: Vec<usize> = pa.nodes().to_vec();
                    merged.extend_from_slice(pb.nodes());
                    merged.sort_unstable();
                    if merged != node.piece.nodes() {
                        return Err(Error::InvariantViolation(format!(
                            "children of {id} do not partition the piece"
                        )));
                    }
                    if pa.min_node() > pb.min_node() {
                        return Err(Error::InvariantViolation(format!(
                            "children of {id} out of order"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

struct RawNode {
    nodes: Vec<usize>,
    children: Option<(Box<RawNode>, Box<RawNode>)>,
}

fn split_recursive(graph: &Graph, global: Vec<usize>) -> Result<RawNode> {
    if global.len() == 1 {
        return Ok(RawNode { nodes: global, children: None });
    }
    let sub = graph.induced_subgraph(&global)?;
    let b = bisect(&sub.graph)?;
    let left = sub.to_global(b.left.nodes());
    let right = sub.to_global(b.right.nodes());
    let (first, second) = if left[0] < right[0] { (left, right) } else { (right, left) };
    let (a, b) = rayon::join(
        || split_recursive(graph, first),
        || split_recursive(graph, second),
    );
    Ok(RawNode { nodes: global, children: Some((Box::new(a?), Box::new(b?))) })
}

/// Recursive near-bisection of a connected graph down to singleton leaves.
pub fn decompose(graph: &Graph) -> Result<PartitionTree> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::GraphTooSmall { need: 1, have: 0 });
    }
    if !graph.is_connected() {
        let comps = graph.connected_components(&(0..n).collect::<Vec<_>>());
        return Err(Error::Disconnected(format!(
            "{} components, sizes {:?}",
            comps.len(),
            comps.iter().map(|c| c.len()).collect::<Vec<_>>()
        )));
    }

    let root = split_recursive(graph, (0..n).collect())?;

    // Flatten into an arena, then relabel breadth-first with min-node ties.
    struct Flat {
        nodes: Vec<usize>,
        level: usize,
        parent: Option<usize>,
        children: Option<(usize, usize)>,
    }
    let mut arena: Vec<Flat> = Vec::with_capacity(2 * n - 1);
    fn flatten(raw: RawNode, level: usize, parent: Option<usize>, arena: &mut Vec<Flat>) -> usize {
        let id = arena.len();
        arena.push(Flat { nodes: raw.nodes, level, parent, children: None });
        if let Some((a, b)) = raw.children {
            let ia = flatten(*a, level + 1, Some(id), arena);
            let ib = flatten(*b, level + 1, Some(id), arena);
            arena[id].children = Some((ia, ib));
        }
        id
    }
    flatten(root, 0, None, &mut arena);

    let mut order: Vec<usize> = (0..arena.len()).collect();
    order.sort_by_key(|&i| (arena[i].level, arena[i].nodes[0]));
    let mut remap = vec![0usize; arena.len()];
    for (new_id, &old_id) in order.iter().enumerate() {
        remap[old_id] = new_id;
    }

    let mut nodes: Vec<TreeNode> = Vec::with_capacity(arena.len());
    let mut depth = 0;
    for &old_id in &order {
        let f = &arena[old_id];
        depth = depth.max(f.level);
        nodes.push(TreeNode {
            piece: Piece::from_connected_unchecked(f.nodes.clone()),
            level: f.level,
            parent: f.parent.map(|p| remap[p]),
            children: f.children.map(|(a, b)| (remap[a], remap[b])),
        });
    }
    let tree = PartitionTree { nodes, n, depth };
    debug_assert!(tree.validate().is_ok());
    Ok(tree)
}

fn template_factor(s1: &Piece, s2: &Piece) -> Result<f64> {
    if let Some(v) = s1.overlaps(s2) {
        return Err(Error::OverlappingPieces(v));
    }
    let (a, b) = (s1.len() as f64, s2.len() as f64);
    Ok((a * b / (a + b)).sqrt())
}

fn template(s1: &Piece, s2: &Piece, dim: usize, sign: f64) -> Result<SparseVector> {
    let factor = template_factor(s1, s2)?;
    let v1 = factor / s1.len() as f64;
    let v2 = sign * factor / s2.len() as f64;
    let mut entries: Vec<(usize, f64)> = s1
        .nodes()
        .iter()
        .map(|&i| (i, v1))
        .chain(s2.nodes().iter().map(|&i| (i, v2)))
        .collect();
    entries.sort_by_key(|&(i, _)| i);
    let (indices, values) = entries.into_iter().unzip();
    Ok(SparseVector::new(dim, indices, values))
}

/// Lowpass template `g(S1,S2) = √(|S1||S2|/(|S1|+|S2|)) (1_{S1}/|S1| + 1_{S2}/|S2|)`.
pub fn lowpass_template(s1: &Piece, s2: &Piece, dim: usize) -> Result<SparseVector> {
    template(s1, s2, dim, 1.0)
}

/// Highpass template: the lowpass with a minus sign on the `S2` block;
/// unit norm and orthogonal to the all-ones vector.
pub fn highpass_template(s1: &Piece, s2: &Piece, dim: usize) -> Result<SparseVector> {
    template(s1, s2, dim, -1.0)
}

/// Where a basis column comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnOrigin {
    /// `1_V/√N`.
    Scaling,
    /// Highpass vector of the split at this tree node.
    Highpass { tree_node: usize },
}

/// Orthonormal N×N Haar-like wavelet basis, stored column-sparse.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    n: usize,
    columns: Vec<SparseVector>,
    origins: Vec<ColumnOrigin>,
}

impl WaveletBasis {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &SparseVector {
        &self.columns[i]
    }

    pub fn origins(&self) -> &[ColumnOrigin] {
        &self.origins
    }

    pub fn nnz(&self, threshold: f64) -> usize {
        self.columns.iter().map(|c| c.nnz(threshold)).sum()
    }

    /// Coefficients `Wᵀx`.
    pub fn analyze(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.columns.iter().map(|c| c.dot_dense(x)).collect())
    }

    /// Reconstruction `Wa`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: coeffs.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        for (c, &a) in self.columns.iter().zip(coeffs) {
            if a != 0.0 {
                c.axpy_into(a, &mut out);
            }
        }
        Ok(out)
    }
}

/// Builds the wavelet basis from a partition tree: the scaling column first,
/// then one highpass column per internal node in breadth-first order (ties
/// by smallest node index in the piece).
pub fn wavelet_basis(tree: &PartitionTree) -> WaveletBasis {
    let n = tree.graph_size();
    let mut columns = Vec::with_capacity(n);
    let mut origins = Vec::with_capacity(n);
    columns.push(SparseVector::constant_on(
        n,
        tree.root().piece.nodes(),
        1.0 / (n as f64).sqrt(),
    ));
    origins.push(ColumnOrigin::Scaling);
    for id in tree.internal_ids() {
        let (a, b) = tree.node(id).children.expect("internal node");
        let col = highpass_template(&tree.node(a).piece, &tree.node(b).piece, n)
            .expect("tree children are disjoint");
        columns.push(col);
        origins.push(ColumnOrigin::Highpass { tree_node: id });
    }
    WaveletBasis { n, columns, origins }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;

    #[test]
    fn path4_tree_shape() {
        let tree = decompose(&path_graph(4)).unwrap();
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.node_count(), 7);
        let pieces: Vec<Vec<usize>> =
            tree.nodes().iter().map(|t| t.piece.nodes().to_vec()).collect();
        assert_eq!(
            pieces,
            vec![
                vec![0, 1, 2, 3],
                vec![0, 1],
                vec![2, 3],
                vec![0],
                vec![1],
                vec![2],
                vec![3]
            ]
        );
        tree.validate().unwrap();
    }

    #[test]
    fn single_node_tree() {
        let g = Graph::build(1, &[]).unwrap();
        let tree = decompose(&g).unwrap();
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.node_count(), 1);
        assert!(tree.root().is_leaf());
    }

    #[test]
    fn power_of_two_path_counts() {
        for l in 1..=5usize {
            let n = 1 << l;
            let tree = decompose(&path_graph(n)).unwrap();
            assert_eq!(tree.node_count(), 2 * n - 1);
            assert_eq!(tree.depth(), l);
        }
    }

    #[test]
    fn rejects_disconnected() {
        let g = Graph::build(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(decompose(&g), Err(Error::Disconnected(_))));
    }

    #[test]
    fn template_values() {
        let g = path_graph(6);
        let s22a = Piece::new(&g, &[0, 1]).unwrap();
        let s22b = Piece::new(&g, &[2, 3]).unwrap();
        let low = lowpass_template(&s22a, &s22b, 4).unwrap();
        assert_eq!(low.to_dense(), vec![0.5, 0.5, 0.5, 0.5]);
        let high = highpass_template(&s22a, &s22b, 4).unwrap();
        assert_eq!(high.to_dense(), vec![0.5, 0.5, -0.5, -0.5]);

        let s1 = Piece::new(&g, &[0]).unwrap();
        let s2 = Piece::new(&g, &[1]).unwrap();
        let pair = highpass_template(&s1, &s2, 2).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pair.to_dense()[0] - inv_sqrt2).abs() < 1e-15);
        assert!((pair.to_dense()[1] + inv_sqrt2).abs() < 1e-15);

        let s3 = Piece::new(&g, &[1, 2, 3]).unwrap();
        let skew = lowpass_template(&s1, &s3, 4).unwrap();
        let f = (3.0f64 / 4.0).sqrt();
        let expect = vec![f, f / 3.0, f / 3.0, f / 3.0];
        for (got, want) in skew.to_dense().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((skew.norm() - 1.0).abs() < 1e-12);
        assert!((highpass_template(&s1, &s3, 4).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn templates_reject_overlap() {
        let g = path_graph(4);
        let a = Piece::new(&g, &[0, 1]).unwrap();
        let b = Piece::new(&g, &[1, 2]).unwrap();
        assert!(matches!(
            lowpass_template(&a, &b, 4),
            Err(Error::OverlappingPieces(1))
        ));
        assert!(matches!(
            highpass_template(&a, &b, 4),
            Err(Error::OverlappingPieces(1))
        ));
    }

    #[test]
    fn highpass_sums_to_zero() {
        let g = path_graph(6);
        let a = Piece::new(&g, &[0, 1, 2]).unwrap();
        let b = Piece::new(&g, &[4, 5]).unwrap();
        let h = highpass_template(&a, &b, 6).unwrap();
        assert!(h.sum().abs() < 1e-12);
    }

    #[test]
    fn path4_wavelet_matrix() {
        let tree = decompose(&path_graph(4)).unwrap();
        let w = wavelet_basis(&tree);
        assert_eq!(w.columns().len(), 4);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [
            vec![0.5, 0.5, 0.5, 0.5],
            vec![0.5, 0.5, -0.5, -0.5],
            vec![inv_sqrt2, -inv_sqrt2, 0.0, 0.0],
            vec![0.0, 0.0, inv_sqrt2, -inv_sqrt2],
        ];
        for (col, want) in w.columns().iter().zip(&expected) {
            let dense = col.to_dense();
            for (g, e) in dense.iter().zip(want) {
                assert!((g - e).abs() < 1e-14, "{dense:?} vs {want:?}");
            }
        }
        // 4 + 4 + 2 + 2 stored nonzeros
        assert_eq!(w.nnz(1e-12), 12);
    }

    #[test]
    fn single_node_basis() {
        let g = Graph::build(1, &[]).unwrap();
        let w = wavelet_basis(&decompose(&g).unwrap());
        assert_eq!(w.columns().len(), 1);
        assert_eq!(w.column(0).to_dense(), vec![1.0]);
    }

    #[test]
    fn analyze_synthesize_examples() {
        let tree = decompose(&path_graph(4)).unwrap();
        let w = wavelet_basis(&tree);

        let coeffs = w.analyze(&[1.0; 4]).unwrap();
        assert!((coeffs[0] - 2.0).abs() < 1e-12);
        for c in &coeffs[1..] {
            assert!(c.abs() < 1e-12);
        }

        let col2 = w.column(2).to_dense();
        let c = w.analyze(&col2).unwrap();
        for (i, v) in c.iter().enumerate() {
            let want = if i == 2 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }

        let x = [0.3, -1.2, 4.5, 2.2];
        let round = w.synthesize(&w.analyze(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&round) {
            assert!((a - b).abs() < 1e-12);
        }

        assert!(w.analyze(&[1.0; 3]).is_err());
        assert!(w.synthesize(&[1.0; 5]).is_err());
    }
}
