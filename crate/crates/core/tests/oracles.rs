mod support;

use liberata::corpus::fixture;
use liberata::graph_spectral::{
    connected_components, eigendecompose, log_spanning_trees, zero_eigenvalue_count, End,
};
use liberata::references_graph::{betweenness_centrality, PathLength};
use liberata::shares_graph::{build_full, laplacian, square};
use liberata::sparse;
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

#[test]
fn lanczos_matches_dense_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..40 {
        let n = rng.random_range(3..40);
        let edges = random_edges(&mut rng, n, 0.25, case % 2 == 0);
        let l = laplacian(&symmetric(n, &edges));
        let dense = sparse::to_dense(&l).unwrap();
        let mut exact: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        exact.sort_by(f64::total_cmp);
        let scale = exact.last().unwrap().abs().max(1.0);
        let k = 3.min(n);
        let small = eigendecompose(&l, k, End::Smallest).unwrap();
        let large = eigendecompose(&l, k, End::Largest).unwrap();
        for i in 0..k {
            assert!((small.values[i] - exact[i]).abs() <= 1e-8 * scale, "case {case} smallest {i}");
            assert!((large.values[i] - exact[n - 1 - i]).abs() <= 1e-8 * scale, "case {case} largest {i}");
        }
        // eigenvector residuals
        for (val, v) in small.values.iter().zip(&small.vectors) {
            let lv = sparse::matvec(&l, v);
            let r: f64 = lv.iter().zip(v).map(|(a, b)| (a - val * b).powi(2)).sum::<f64>().sqrt();
            assert!(r <= 1e-6 * scale, "case {case} residual {r}");
        }
    }
}

#[test]
fn kirchhoff_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.random_range(2..=8);
        let edges = random_edges(&mut rng, n, 0.5, checked % 2 == 1);
        if component_count(n, &edges) != 1 {
            continue;
        }
        let brute = enumerate_spanning_trees(n, &edges);
        let kirchhoff = log_spanning_trees(&symmetric(n, &edges)).unwrap().exp();
        assert!((kirchhoff - brute).abs() <= 1e-9 * brute, "{kirchhoff} vs {brute}");
        checked += 1;
    }
    assert_eq!(log_spanning_trees(&symmetric(3, &complete(3))).unwrap().exp().round(), 3.0);
    assert_eq!(log_spanning_trees(&symmetric(8, &complete(8))).unwrap().exp().round(), 262144.0);
    assert_eq!(enumerate_spanning_trees(8, &complete(8)), 262144.0);
}

#[test]
fn disconnected_graph_has_no_spanning_tree() {
    let g = symmetric(4, &vec![(0, 1, 1.0), (2, 3, 1.0)]);
    assert_eq!(log_spanning_trees(&g).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn zero_eigenvalues_count_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let n = rng.random_range(1..=50);
        let p = rng.random_range(0.0..3.0) / n as f64;
        let edges = random_edges(&mut rng, n, p, case % 3 == 0);
        let l = laplacian(&symmetric(n, &edges));
        let expected = component_count(n, &edges);
        assert_eq!(zero_eigenvalue_count(&l, expected).unwrap(), expected, "case {case}");
        let c = connected_components(&l).unwrap();
        assert_eq!(c.count, expected);
        assert!(c.agrees());
    }
}

#[test]
fn squared_graph_is_two_hop_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..60 {
        let n = rng.random_range(1..=6);
        let a = symmetric(n, &random_edges(&mut rng, n, 0.6, true));
        let g2 = square(&a);
        let brute = two_hop(&a);
        for i in 0..n {
            for j in 0..n {
                assert!((sparse::get(&g2, i, j) - brute[i][j]).abs() <= 1e-12);
            }
        }
    }
    let full = build_full(&fixture::corpus());
    let g2 = full.two_step();
    let brute = two_hop(full.matrix());
    for (i, row) in brute.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((sparse::get(g2.matrix(), i, j) - v).abs() <= 1e-12);
        }
    }
}

#[test]
fn betweenness_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..30 {
        let n = rng.random_range(2..=8);
        let w = random_dag(&mut rng, n, 0.45);
        let fast = betweenness_centrality(&w, PathLength::Hops);
        let brute = enumerate_betweenness(&w);
        for y in 0..n {
            assert!((fast[y] - brute[y]).abs() <= 1e-12, "case {case} node {y}: {} vs {}", fast[y], brute[y]);
        }
    }
}
