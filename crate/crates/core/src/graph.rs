//! Graph representation and first-order difference machinery.
//!
//! A [`Graph`] is an immutable undirected weighted graph over dense node
//! indices `0..n`. It exposes adjacency, degree, Laplacian and incidence
//! views plus the traversal primitives (connectivity, hop distances) that
//! the partitioning algorithm builds on.

use ndarray::Array2;
use rayon::prelude::*;

use crate::{Error, Result};

/// Canonical undirected edge: `j < k`, `w > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub j: usize,
    pub k: usize,
    pub w: f64,
}

/// Immutable undirected weighted graph.
///
/// Edges are stored canonicalized (`j < k`, sorted, deduplicated) alongside
/// per-node neighbor lists sorted by neighbor index.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    neighbors: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
}

impl Graph {
    /// Validates and canonicalizes an edge list.
    ///
    /// Rejects self-loops, out-of-range endpoints, nonpositive weights and
    /// duplicate edges with conflicting weights. Exact duplicates are merged.
    pub fn build(n: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
        let mut canon: Vec<Edge> = Vec::with_capacity(edges.len());
        for &(j, k, w) in edges {
            if j >= n {
                return Err(Error::NodeOutOfRange { index: j, n });
            }
            if k >= n {
                return Err(Error::NodeOutOfRange { index: k, n });
            }
            if j == k {
                return Err(Error::SelfLoop(j));
            }
            if !(w > 0.0) {
                return Err(Error::NonpositiveWeight { j, k, w });
            }
            let (j, k) = if j < k { (j, k) } else { (k, j) };
            canon.push(Edge { j, k, w });
        }
        canon.sort_by(|a, b| (a.j, a.k).cmp(&(b.j, b.k)));
        let mut dedup: Vec<Edge> = Vec::with_capacity(canon.len());
        for e in canon {
            match dedup.last() {
                Some(last) if last.j == e.j && last.k == e.k => {
                    if last.w != e.w {
                        return Err(Error::ConflictingDuplicateEdge {
                            j: e.j,
                            k: e.k,
                            w1: last.w,
                            w2: e.w,
                        });
                    }
                }
                _ => dedup.push(e),
            }
        }
        let mut neighbors = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        for e in &dedup {
            neighbors[e.j].push((e.k, e.w));
            neighbors[e.k].push((e.j, e.w));
            degree[e.j] += e.w;
            degree[e.k] += e.w;
        }
        for list in &mut neighbors {
            list.sort_by_key(|&(v, _)| v);
        }
        Ok(Graph { n, edges: dedup, neighbors, degree })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.neighbors[v]
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Dense symmetric adjacency view.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            a[[e.j, e.k]] = e.w;
            a[[e.k, e.j]] = e.w;
        }
        a
    }

    /// Graph Laplacian `L = D - A`.
    pub fn laplacian(&self) -> Array2<f64> {
        let mut l = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            l[[i, i]] = self.degree[i];
        }
        for e in &self.edges {
            l[[e.j, e.k]] = -e.w;
            l[[e.k, e.j]] = -e.w;
        }
        l
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        IncidenceMatrix { n: self.n, edges: self.edges.clone() }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let all: Vec<usize> = (0..self.n).collect();
        bfs_reach(self, 0, &all).len() == self.n
    }

    /// Connected components of the subgraph induced by `subset`, each a
    /// [`Piece`], sorted ascending by cardinality (ties by smallest node).
    pub fn connected_components(&self, subset: &[usize]) -> Vec<Piece> {
        let mut in_subset = vec![false; self.n];
        for &v in subset {
            in_subset[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut sorted: Vec<usize> = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &start in &sorted {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(start);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &(v, _) in &self.neighbors[u] {
                    if in_subset[v] && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by_key(|c| (c.len(), c[0]));
        comps.into_iter().map(|nodes| Piece { nodes }).collect()
    }

    /// Hop-count shortest path distances from `source`, restricted to the
    /// subgraph induced by `allowed` (pass all nodes for the full graph).
    /// Unreachable nodes get `usize::MAX`.
    pub fn bfs_distances(&self, source: usize, allowed: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.neighbors[u] {
                if allowed[v] && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs hop-count geodesic distance matrix.
    ///
    /// Rows are computed per source (concurrently); the result matches the
    /// sequential computation exactly. Errors on disconnected graphs.
    pub fn geodesic_matrix(&self) -> Result<Array2<f64>> {
        self.geodesic_with(GeodesicMetric::Hops)
    }

    /// Geodesic matrix under a chosen metric. `InverseWeight` runs Dijkstra
    /// with edge length `1/w` (weights encode similarity, not length).
    pub fn geodesic_with(&self, metric: GeodesicMetric) -> Result<Array2<f64>> {
        let allowed = vec![true; self.n];
        let rows: Vec<Vec<f64>> = (0..self.n)
            .into_par_iter()
            .map(|s| match metric {
                GeodesicMetric::Hops => self
                    .bfs_distances(s, &allowed)
                    .into_iter()
                    .map(|d| if d == usize::MAX { f64::INFINITY } else { d as f64 })
                    .collect(),
                GeodesicMetric::InverseWeight => self.dijkstra_inverse_weight(s),
            })
            .collect();
        let mut m = Array2::zeros((self.n, self.n));
        for (s, row) in rows.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                if d.is_infinite() {
                    return Err(Error::Disconnected(format!(
                        "no path between nodes {s} and {t}"
                    )));
                }
                m[[s, t]] = d;
            }
        }
        Ok(m)
    }

    fn dijkstra_inverse_weight(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = std::collections::BinaryHeap::new();
        dist[source] = 0.0;
        heap.push((std::cmp::Reverse(ordered_float(0.0)), source));
        while let Some((std::cmp::Reverse(d), u)) = heap.pop() {
            let d = f64::from_bits(d);
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.neighbors[u] {
                let nd = d + 1.0 / w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push((std::cmp::Reverse(ordered_float(nd)), v));
                }
            }
        }
        dist
    }

    /// Subgraph induced by `nodes`, relabeled to local indices `0..m` in
    /// ascending global order. Returns the subgraph with its global id map.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Subgraph> {
        let mut global: Vec<usize> = nodes.to_vec();
        global.sort_unstable();
        global.dedup();
        if global.is_empty() {
            return Err(Error::EmptyPiece);
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &g) in global.iter().enumerate() {
            local[g] = i;
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            if local[e.j] != usize::MAX && local[e.k] != usize::MAX {
                edges.push((local[e.j], local[e.k], e.w));
            }
        }
        let graph = Graph::build(global.len(), &edges)?;
        Ok(Subgraph { graph, global })
    }
}

/// Distance metric for [`Graph::geodesic_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicMetric {
    /// Unweighted hop count (BFS). The default: partitioning only needs
    /// ordinal distances and edge weights encode similarity.
    Hops,
    /// Dijkstra with edge length `1/w`, for experimentation.
    InverseWeight,
}

// Total-order key for f64 distances in the heap (all values nonnegative).
fn ordered_float(v: f64) -> u64 {
    v.to_bits()
}

/// Induced subgraph with local indices `0..m` and the map back to global ids.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    /// `global[i]` is the original id of local node `i`; strictly increasing.
    pub global: Vec<usize>,
}

impl Subgraph {
    pub fn to_global(&self, local_nodes: &[usize]) -> Vec<usize> {
        local_nodes.iter().map(|&i| self.global[i]).collect()
    }
}

/// A node subset whose induced subgraph is connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    nodes: Vec<usize>,
}

impl Piece {
    /// Checks nonemptiness and induced connectivity on construction.
    pub fn new(graph: &Graph, nodes: &[usize]) -> Result<Piece> {
        let mut sorted: Vec<usize> = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(Error::EmptyPiece);
        }
        for &v in &sorted {
            if v >= graph.node_count() {
                return Err(Error::NodeOutOfRange { index: v, n: graph.node_count() });
            }
        }
        let mut allowed = vec![false; graph.node_count()];
        for &v in &sorted {
            allowed[v] = true;
        }
        let reached = bfs_reach(graph, sorted[0], &sorted);
        if reached.len() != sorted.len() {
            return Err(Error::DisconnectedPiece);
        }
        Ok(Piece { nodes: sorted })
    }

    /// Wraps nodes already known to induce a connected subgraph.
    pub(crate) fn from_connected_unchecked(mut nodes: Vec<usize>) -> Piece {
        nodes.sort_unstable();
        Piece { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_node(&self) -> usize {
        self.nodes[0]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn overlaps(&self, other: &Piece) -> Option<usize> {
        let (mut a, mut b) = (0, 0);
        while a < self.nodes.len() && b < other.nodes.len() {
            match self.nodes[a].cmp(&other.nodes[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return Some(self.nodes[a]),
            }
        }
        None
    }
}

fn bfs_reach(graph: &Graph, start: usize, subset: &[usize]) -> Vec<usize> {
    let mut in_subset = vec![false; graph.node_count()];
    for &v in subset {
        in_subset[v] = true;
    }
    let mut seen = vec![false; graph.node_count()];
    let mut queue = std::collections::VecDeque::new();
    let mut out = Vec::new();
    seen[start] = true;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        out.push(u);
        for &(v, _) in graph.neighbors(u) {
            if in_subset[v] && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    out
}

/// Edge-by-node first-difference operator with `ΔᵀΔ = L`.
///
/// Row `i` for edge `(j, k)` with `j < k` holds `-√w` at column `j` and
/// `+√w` at column `k`.
#[derive(Debug, Clone)]
pub struct IncidenceMatrix {
    n: usize,
    edges: Vec<Edge>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.edges.len()
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.edges.len(), self.n));
        for (i, e) in self.edges.iter().enumerate() {
            let s = e.w.sqrt();
            m[[i, e.j]] = -s;
            m[[i, e.k]] = s;
        }
        m
    }

    /// First-order difference `Δx` as an edge signal.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self
            .edges
            .iter()
            .map(|e| e.w.sqrt() * (x[e.k] - x[e.j]))
            .collect())
    }
}

/// Number of edges whose endpoints differ (`‖Δx‖₀`, the cut cost).
///
/// Uses absolute tolerance 1e-12, exact for the integer piece values the
/// signal generators produce.
pub fn cut_count(graph: &Graph, x: &[f64]) -> Result<usize> {
    if x.len() != graph.node_count() {
        return Err(Error::DimensionMismatch { expected: graph.node_count(), got: x.len() });
    }
    Ok(graph
        .edges()
        .iter()
        .filter(|e| (x[e.j] - x[e.k]).abs() > 1e-12)
        .count())
}

/// Quadratic variation `xᵀLx = ‖Δx‖₂²`, accumulated over edges.
pub fn quadratic_variation(graph: &Graph, x: &[f64]) -> Result<f64> {
    if x.len() != graph.node_count() {
        return Err(Error::DimensionMismatch { expected: graph.node_count(), got: x.len() });
    }
    Ok(graph
        .edges()
        .iter()
        .map(|e| {
            let d = x[e.k] - x[e.j];
            e.w * d * d
        })
        .sum())
}

/// Convenience constructors for the fixed graphs used throughout the tests.
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize, f64)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
    Graph::build(n, &edges).expect("path graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn path4_degrees() {
        let g = path_graph(4);
        assert_eq!(g.degree(), &[1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn triangle_laplacian_diagonal() {
        let l = triangle().laplacian();
        for i in 0..3 {
            assert_eq!(l[[i, i]], 2.0);
        }
    }

    #[test]
    fn incidence_single_weighted_edge() {
        let g = Graph::build(2, &[(0, 1, 4.0)]).unwrap();
        let m = g.incidence().to_dense();
        assert_eq!(m[[0, 0]], -2.0);
        assert_eq!(m[[0, 1]], 2.0);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::build(3, &[(1, 1, 1.0)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Graph::build(3, &[(0, 1, -2.0)]),
            Err(Error::NonpositiveWeight { .. })
        ));
        assert!(matches!(
            Graph::build(3, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::ConflictingDuplicateEdge { .. })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 3, 1.0)]),
            Err(Error::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn exact_duplicates_merge() {
        let g = Graph::build(2, &[(0, 1, 1.5), (1, 0, 1.5)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(), &[1.5, 1.5]);
    }

    #[test]
    fn laplacian_single_edge_and_row_sums() {
        let g = Graph::build(2, &[(0, 1, 1.0)]).unwrap();
        let l = g.laplacian();
        assert_eq!(l[[0, 0]], 1.0);
        assert_eq!(l[[0, 1]], -1.0);
        let l4 = path_graph(4).laplacian();
        for i in 0..4 {
            let row_sum: f64 = (0..4).map(|j| l4[[i, j]]).sum();
            assert!(row_sum.abs() < 1e-14);
        }
    }

    #[test]
    fn incidence_gram_equals_laplacian() {
        let g = path_graph(4);
        let d = g.incidence().to_dense();
        let gram = d.t().dot(&d);
        let l = g.laplacian();
        for i in 0..4 {
            for j in 0..4 {
                assert!((gram[[i, j]] - l[[i, j]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triangle_incidence_rows() {
        let m = triangle().incidence().to_dense();
        for i in 0..3 {
            let row: Vec<f64> = (0..3).map(|j| m[[i, j]]).collect();
            assert_eq!(row.iter().filter(|&&v| v == -1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }

    #[test]
    fn cut_count_examples() {
        let g = path_graph(4);
        assert_eq!(cut_count(&g, &[5.0; 4]).unwrap(), 0);
        assert_eq!(cut_count(&g, &[1.0, 1.0, 0.0, 0.0]).unwrap(), 1);
        assert_eq!(cut_count(&g, &[1.0, 0.0, 1.0, 0.0]).unwrap(), 3);
    }

    #[test]
    fn quadratic_variation_examples() {
        // single unit edge, x = [1, 0]: xᵀLx = w(x_k - x_j)² = 1
        let g2 = Graph::build(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(quadratic_variation(&g2, &[1.0, 0.0]).unwrap(), 1.0);
        let g = path_graph(4);
        assert_eq!(quadratic_variation(&g, &[0.0, 1.0, 2.0, 3.0]).unwrap(), 3.0);
        assert_eq!(quadratic_variation(&g, &[2.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn components_ordering() {
        let g = path_graph(4);
        let one = g.connected_components(&[0, 1]);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].nodes(), &[0, 1]);

        let two = g.connected_components(&[0, 3]);
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].nodes(), &[0]);
        assert_eq!(two[1].nodes(), &[3]);

        let all = g.connected_components(&(0..4).collect::<Vec<_>>());
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].len(), 4);

        assert!(g.connected_components(&[]).is_empty());
    }

    #[test]
    fn components_sorted_by_size_then_min_node() {
        // 0-1-2 path plus isolated pair 4-5 and singleton 3 inside subset.
        let g = Graph::build(6, &[(0, 1, 1.0), (1, 2, 1.0), (4, 5, 1.0), (2, 3, 1.0)]).unwrap();
        let comps = g.connected_components(&[0, 1, 2, 4, 5]);
        let sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![2, 3]);
        assert_eq!(comps[0].nodes(), &[4, 5]);
    }

    #[test]
    fn geodesic_examples() {
        let g = path_graph(4);
        let d = g.geodesic_matrix().unwrap();
        assert_eq!(d[[0, 3]], 3.0);

        let t = triangle().geodesic_matrix().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t[[i, j]], if i == j { 0.0 } else { 1.0 });
            }
        }

        // star K1,4: center 0
        let star = Graph::build(5, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]).unwrap();
        let ds = star.geodesic_matrix().unwrap();
        assert_eq!(ds[[1, 4]], 2.0);
    }

    #[test]
    fn geodesic_rejects_disconnected() {
        let g = Graph::build(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(g.geodesic_matrix(), Err(Error::Disconnected(_))));
    }

    #[test]
    fn geodesic_inverse_weight_orders_by_similarity() {
        // strong edge 0-1 (w=4, length 0.25); weak edge 0-2 (w=0.5, length 2)
        // plus 1-2 (w=1): path 0-1-2 has length 1.25 < 2.
        let g = Graph::build(3, &[(0, 1, 4.0), (0, 2, 0.5), (1, 2, 1.0)]).unwrap();
        let d = g.geodesic_with(GeodesicMetric::InverseWeight).unwrap();
        assert!((d[[0, 2]] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn piece_checks_connectivity() {
        let g = path_graph(4);
        assert!(Piece::new(&g, &[0, 1]).is_ok());
        assert!(matches!(Piece::new(&g, &[0, 2]), Err(Error::DisconnectedPiece)));
        assert!(matches!(Piece::new(&g, &[]), Err(Error::EmptyPiece)));
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = path_graph(4);
        let sub = g.induced_subgraph(&[1, 2, 3]).unwrap();
        assert_eq!(sub.graph.node_count(), 3);
        assert_eq!(sub.graph.edge_count(), 2);
        assert_eq!(sub.to_global(&[0, 2]), vec![1, 3]);
    }
}
