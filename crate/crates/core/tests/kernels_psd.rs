mod common;

use common::random_graph;
use effbench_core::eval::kernels::{normalize_kernel, sp_kernel, wl_kernel};
use effbench_core::{seed, Graph};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

fn batch(seed_value: u64, count: usize) -> Vec<Graph> {
    let mut rng = seed::rng(seed_value);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..25);
            let p = rng.random_range(0.0..0.6);
            random_graph(&mut rng, n, p)
        })
        .collect()
}

fn min_eigenvalue(k: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(k.clone()).eigenvalues.min()
}

#[test]
fn kernels_are_symmetric_psd() {
    for s in 0..3 {
        let graphs = batch(s, 64);
        for h in 0..=3 {
            let k = wl_kernel(&graphs, h);
            assert_eq!(k, k.transpose());
            assert!(min_eigenvalue(&k) >= -1e-8, "WL h={h} seed {s}");
        }
        let k = sp_kernel(&graphs);
        assert_eq!(k, k.transpose());
        assert!(min_eigenvalue(&k) >= -1e-8, "SP seed {s}");
        assert!(min_eigenvalue(&normalize_kernel(&k)) >= -1e-8);
    }
}

#[test]
fn wl_values_are_monotone_in_h() {
    let graphs = batch(9, 16);
    let k1 = wl_kernel(&graphs, 1);
    let k2 = wl_kernel(&graphs, 2);
    assert!(k2.iter().zip(k1.iter()).all(|(a, b)| a >= b));
}

#[test]
fn c6_and_two_triangles_have_equal_rows() {
    let k3 = Graph::complete(3).unwrap();
    let mut graphs = vec![Graph::cycle(6).unwrap(), k3.disjoint_union(&k3)];
    graphs.extend(batch(4, 20));
    for h in 0..=3 {
        let k = wl_kernel(&graphs, h);
        assert_eq!(k.row(0), k.row(1), "h = {h}");
    }
}
