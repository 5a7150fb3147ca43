//! Shared helpers for the integration tests.

use gwdict_core::graph::Graph;
use gwdict_core::multires::WaveletBasis;
use gwdict_core::signals::{gen_graph, GraphFamily};

/// Deterministic mixed-family connected graph: ER above the connectivity
/// threshold, random geometric, or grid, with 2 ≤ N ≤ max_n.
pub fn random_connected_graph(seed: u64, max_n: usize) -> Graph {
    let kind = seed % 3;
    let n = 2 + (seed.wrapping_mul(0x9e3779b97f4a7c15) >> 33) as usize % (max_n - 1);
    match kind {
        0 => {
            let p = ((n as f64).ln() + 2.0) / n as f64;
            gen_graph(GraphFamily::ErdosRenyi { n, p: p.min(1.0) }, seed).unwrap()
        }
        1 => {
            let radius = (((n as f64).ln() + 3.0) / (std::f64::consts::PI * n as f64))
                .sqrt()
                .min(1.5);
            gen_graph(GraphFamily::RandomGeometric { n, radius }, seed).unwrap()
        }
        _ => {
            let rows = (1 + (seed >> 7) as usize % ((n as f64).sqrt() as usize + 1)).max(1);
            let cols = (n / rows).max(1);
            gen_graph(GraphFamily::Grid { rows, cols }, seed).unwrap()
        }
    }
}

/// Max-abs entry of `WᵀW − I`, accumulated row-wise (every node appears in
/// O(depth) columns, so this is near-linear).
pub fn gram_identity_error(basis: &WaveletBasis) -> f64 {
    let n = basis.size();
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (c, col) in basis.columns().iter().enumerate() {
        for (r, v) in col.iter() {
            per_row[r].push((c, v));
        }
    }
    let cols = basis.columns().len();
    let mut gram: std::collections::HashMap<(usize, usize), f64> = std::collections::HashMap::new();
    for entries in &per_row {
        for (ai, &(ci, vi)) in entries.iter().enumerate() {
            for &(cj, vj) in &entries[ai..] {
                *gram.entry((ci, cj)).or_insert(0.0) += vi * vj;
            }
        }
    }
    let mut max_err = 0.0f64;
    for c in 0..cols {
        let diag = gram.get(&(c, c)).copied().unwrap_or(0.0);
        max_err = max_err.max((diag - 1.0).abs());
    }
    for (&(i, j), &v) in &gram {
        if i != j {
            max_err = max_err.max(v.abs());
        }
    }
    max_err
}
