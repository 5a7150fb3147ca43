//! Randomized invariant checks across the pipeline: incidence algebra,
//! spectral structure, partition guarantees, basis orthonormality and the
//! sparsity bounds.

mod common;

use common::{gram_identity_error, random_connected_graph};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use gwdict_core::approx::{nmse, nonlinear_approx, omp, synthesize_selected};
use gwdict_core::dictionary::{
    build_pc_dict, build_ps_dict, dict_stats, wavelet_column_as_two_atoms,
};
use gwdict_core::graph::{cut_count, quadratic_variation, Graph, Piece};
use gwdict_core::multires::{decompose, highpass_template, lowpass_template, wavelet_basis};
use gwdict_core::partition::{bisect, verify_bisection};
use gwdict_core::signals::{gen_graph, gen_pc, gen_pieces, GraphFamily};
use gwdict_core::spectral::{gft, sym_eig};

#[test]
fn incidence_gram_matches_laplacian() {
    for seed in 0..50u64 {
        let g = random_connected_graph(seed, 128);
        let delta = g.incidence().to_dense();
        let gram = delta.t().dot(&delta);
        let lap = g.laplacian();
        let scale = lap.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for i in 0..g.node_count() {
            for j in 0..g.node_count() {
                assert!(
                    (gram[[i, j]] - lap[[i, j]]).abs() <= 1e-12 * scale,
                    "seed {seed} at ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn quadratic_form_equals_first_difference_energy() {
    for seed in 0..100u64 {
        let g = random_connected_graph(seed, 96);
        let n = g.node_count();
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xabcd);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let qv = quadratic_variation(&g, &x).unwrap();
        let dx = g.incidence().apply(&x).unwrap();
        let energy: f64 = dx.iter().map(|v| v * v).sum();
        assert!((qv - energy).abs() <= 1e-10 * energy.max(1.0), "seed {seed}");
        // and against the dense quadratic form
        let lap = g.laplacian();
        let lx: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| lap[[i, j]] * x[j]).sum())
            .collect();
        let dense_qv: f64 = x.iter().zip(&lx).map(|(a, b)| a * b).sum();
        assert!((qv - dense_qv).abs() <= 1e-9 * qv.abs().max(1.0));
    }
}

#[test]
fn cut_count_bounds_and_constancy() {
    for seed in 0..40u64 {
        let g = random_connected_graph(seed, 64);
        let n = g.node_count();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3i64..=3) as f64).collect();
        let cuts = cut_count(&g, &x).unwrap();
        assert!(cuts <= g.edge_count());
        // zero cut on a connected graph forces a constant signal
        if cuts == 0 {
            assert!(x.iter().all(|&v| v == x[0]));
        }
        assert_eq!(cut_count(&g, &vec![2.5; n]).unwrap(), 0);
    }
}

#[test]
fn geodesic_triangle_inequality() {
    for seed in [3u64, 17, 90] {
        let g = random_connected_graph(seed, 48);
        let d = g.geodesic_matrix().unwrap();
        let n = g.node_count();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let (u, m, v) =
                (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            assert!(d[[u, v]] <= d[[u, m]] + d[[m, v]]);
            assert_eq!(d[[u, v]], d[[v, u]]);
        }
        for u in 0..n {
            assert_eq!(d[[u, u]], 0.0);
        }
    }
}

#[test]
fn connected_graphs_have_simple_zero_eigenvalue() {
    for seed in 0..20u64 {
        let g = random_connected_graph(seed, 96);
        let e = sym_eig(&g.laplacian()).unwrap();
        assert!(e.values()[0].abs() < 1e-10, "seed {seed}");
        if g.node_count() > 1 {
            assert!(e.values()[1] > 1e-9, "seed {seed}: λ₂ = {}", e.values()[1]);
        }
    }
}

#[test]
fn eigen_reconstruction_on_random_symmetric() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for case in 0..100 {
        let n = rng.gen_range(2..24);
        let mut m = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-2.0..2.0);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        let e = sym_eig(&m).unwrap();
        let v = e.vectors();
        let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-12);
        let vtv = v.t().dot(v);
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[[i, j]] - id).abs() <= 1e-10, "case {case}");
            }
        }
        let lam = Array2::from_diag(&ndarray::Array1::from(e.values().to_vec()));
        let recon = v.dot(&lam).dot(&v.t());
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (recon[[i, j]] - m[[i, j]]).abs() <= 1e-8 * scale,
                    "case {case} ({i},{j})"
                );
            }
        }
        // ascending eigenvalues
        for w in e.values().windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}

#[test]
fn gft_full_width_satisfies_parseval() {
    for seed in [5u64, 23, 61] {
        let g = random_connected_graph(seed, 48);
        let n = g.node_count();
        let all: Vec<usize> = (0..n).collect();
        let basis = gft(&g.induced_subgraph(&all).unwrap(), n).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let coeffs = basis.analyze_local(&x).unwrap();
        let cn: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((cn - xn).abs() <= 1e-10 * xn.max(1.0), "seed {seed}");
    }
}

#[test]
fn bisect_guarantee_on_200_random_graphs() {
    let mut repairs = 0usize;
    for seed in 0..200u64 {
        let g = random_connected_graph(seed, 256);
        let b = bisect(&g).unwrap();
        let cert = verify_bisection(&g, &b).unwrap();
        assert!(cert.connected_left && cert.connected_right, "seed {seed}");
        assert!(cert.bound_holds, "seed {seed}");
        if cert.repair_fired {
            repairs += 1;
        }
    }
    println!("bisect repair fired on {repairs}/200 graphs");
}

#[test]
fn wavelet_orthonormality_random_graphs() {
    for seed in 0..20u64 {
        let g = random_connected_graph(seed, 128);
        let tree = decompose(&g).unwrap();
        tree.validate().unwrap();
        let w = wavelet_basis(&tree);
        assert_eq!(w.columns().len(), g.node_count());
        let err = gram_identity_error(&w);
        assert!(err <= 1e-10, "seed {seed}: gram error {err:e}");
        for col in &w.columns()[1..] {
            assert!(col.sum().abs() <= 1e-12);
        }
    }
}

#[test]
fn wavelet_sparsity_bound_holds() {
    let mut rng = ChaCha12Rng::seed_from_u64(4242);
    for case in 0..60u64 {
        let g = random_connected_graph(case, 128);
        let n = g.node_count();
        if n < 3 {
            continue;
        }
        let tree = decompose(&g).unwrap();
        let w = wavelet_basis(&tree);
        let c = rng.gen_range(2..=8.min(n));
        let pieces = gen_pieces(&tree, c, &mut rng).unwrap();
        let distinct = rng.gen_bool(0.5);
        let sig = gen_pc(&pieces, &mut rng, distinct).unwrap();
        let coeffs = w.analyze(&sig.values).unwrap();
        let l0 = coeffs.iter().filter(|a| a.abs() > 1e-10).count();
        let bound = 1 + cut_count(&g, &sig.values).unwrap() * tree.depth();
        assert!(l0 <= bound, "case {case}: ‖Wᵀx‖₀ = {l0} > bound {bound}");
    }
}

#[test]
fn near_bisection_depth_on_structured_graphs() {
    for l in 3..=9usize {
        let n = 1usize << l;
        let tree = decompose(&gen_graph(GraphFamily::Path { n }, 0).unwrap()).unwrap();
        assert!(tree.depth() <= l + 2, "path {n}: depth {}", tree.depth());
    }
    for side in [4usize, 8, 16] {
        let g = gen_graph(GraphFamily::Grid { rows: side, cols: side }, 0).unwrap();
        let tree = decompose(&g).unwrap();
        let l = (side * side).ilog2() as usize;
        assert!(tree.depth() <= l + 2, "grid {side}²: depth {}", tree.depth());
    }
}

#[test]
fn dictionary_counts_on_random_trees() {
    for seed in [2u64, 31, 77] {
        let g = random_connected_graph(seed, 64);
        let tree = decompose(&g).unwrap();
        let n = g.node_count();
        let pc = build_pc_dict(&tree);
        assert_eq!(pc.len(), 2 * n - 1);
        let k = 3;
        let ps = build_ps_dict(&g, &tree, k).unwrap();
        let expect: usize = tree.nodes().iter().map(|t| k.min(t.piece.len())).sum();
        assert_eq!(ps.len(), expect);
        assert!(ps.len() <= (2 * n - 1) * k);
        let stats = dict_stats(&pc);
        assert!(stats.coherence < 1.0);

        let err = wavelet_column_as_two_atoms(&tree, &pc, &wavelet_basis(&tree)).unwrap();
        assert!(err <= 1e-10, "seed {seed}: two-atom error {err:e}");
    }
}

#[test]
fn ps_and_pc_agree_at_bandwidth_one() {
    for seed in [13u64, 54] {
        let g = random_connected_graph(seed, 48);
        let tree = decompose(&g).unwrap();
        let pc = build_pc_dict(&tree);
        let ps = build_ps_dict(&g, &tree, 1).unwrap();
        assert_eq!(pc.len(), ps.len());
        for (a, b) in pc.atoms().iter().zip(ps.atoms()) {
            assert_eq!(a.vector.indices(), b.vector.indices());
            for (x, y) in a.vector.values().iter().zip(b.vector.values()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn omp_residual_monotone_on_random_problems() {
    let mut rng = ChaCha12Rng::seed_from_u64(808);
    for seed in 0..25u64 {
        let g = random_connected_graph(seed, 64);
        let tree = decompose(&g).unwrap();
        let d = build_pc_dict(&tree);
        let n = g.node_count();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if x.iter().all(|&v| v == 0.0) {
            continue;
        }
        let code = omp(&d, &x, n.min(12), 0.0).unwrap();
        for w in code.residual_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn nla_beats_random_subsets() {
    let g = random_connected_graph(8, 48);
    let n = g.node_count();
    let tree = decompose(&g).unwrap();
    let w = wavelet_basis(&tree);
    let mut rng = ChaCha12Rng::seed_from_u64(31337);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    for m in [1usize, 2, n / 4 + 1, n / 2 + 1, n - 1] {
        let (_, best) = nonlinear_approx(&w, &x, m).unwrap();
        let coeffs = w.analyze(&x).unwrap();
        for _ in 0..200 {
            // random m-subset reconstruction
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..m {
                let j = rng.gen_range(i..n);
                idx.swap(i, j);
            }
            let support = &idx[..m];
            let kept: Vec<f64> = support.iter().map(|&i| coeffs[i]).collect();
            let xhat = synthesize_selected(&w, support, &kept);
            let e = nmse(&xhat, &x).unwrap();
            assert!(best.nmse <= e + 1e-12, "m={m}: best {} vs random {e}", best.nmse);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn template_norm_and_orthogonality(split in 1usize..7, total in 2usize..8, seed in 0u64..500) {
        let n = total.max(split + 1);
        let g = gen_graph(GraphFamily::Path { n }, seed).unwrap();
        let split = split.min(n - 1);
        let s1 = Piece::new(&g, &(0..split).collect::<Vec<_>>()).unwrap();
        let s2 = Piece::new(&g, &(split..n).collect::<Vec<_>>()).unwrap();
        let low = lowpass_template(&s1, &s2, n).unwrap();
        let high = highpass_template(&s1, &s2, n).unwrap();
        prop_assert!((low.norm() - 1.0).abs() < 1e-12);
        prop_assert!((high.norm() - 1.0).abs() < 1e-12);
        prop_assert!(high.sum().abs() < 1e-12);
    }

    #[test]
    fn analyze_synthesize_round_trip(seed in 0u64..300) {
        let g = random_connected_graph(seed, 48);
        let n = g.node_count();
        let tree = decompose(&g).unwrap();
        let w = wavelet_basis(&tree);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let back = w.synthesize(&w.analyze(&x).unwrap()).unwrap();
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-10 * norm.max(1.0));
        }
    }

    #[test]
    fn graph_edge_validation_never_panics(
        n in 1usize..12,
        edges in prop::collection::vec((0usize..12, 0usize..12, -1.0f64..3.0), 0..30),
    ) {
        // arbitrary edge soup either builds a valid graph or errors cleanly
        match Graph::build(n, &edges) {
            Ok(g) => {
                prop_assert!(g.edges().iter().all(|e| e.j < e.k && e.w > 0.0));
                let degree_sum: f64 = g.degree().iter().sum();
                let weight_sum: f64 = g.edges().iter().map(|e| 2.0 * e.w).sum();
                prop_assert!((degree_sum - weight_sum).abs() < 1e-9);
            }
            Err(_) => {}
        }
    }
}
