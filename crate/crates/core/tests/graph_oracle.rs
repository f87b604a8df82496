mod common;

use common::{adjacency, brute_clustering, brute_cycles, random_graph};
use effbench_core::graph::{average_clustering, count_cycles, extract_properties};
use effbench_core::seed;
use effbench_core::Graph;
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cycles_and_clustering_match_enumeration(g in arb_graph(8)) {
        for k in 3..=6 {
            prop_assert_eq!(count_cycles(&g, k).unwrap(), brute_cycles(&g, k));
        }
        prop_assert_eq!(average_clustering(&g), brute_clustering(&g));
    }

    #[test]
    fn trace_identities(g in arb_graph(10)) {
        let a = adjacency(&g);
        let a2 = &a * &a;
        let a3 = &a2 * &a;
        let a4 = &a2 * &a2;
        let m = g.edge_count() as f64;
        let wedges: f64 = (0..g.node_count()).map(|v| {
            let d = g.degree(v) as f64;
            d * (d - 1.0) / 2.0
        }).sum();
        prop_assert_eq!(count_cycles(&g, 3).unwrap() as f64, a3.trace() / 6.0);
        prop_assert_eq!(count_cycles(&g, 4).unwrap() as f64, (a4.trace() - 2.0 * m - 4.0 * wedges) / 8.0);
    }

    #[test]
    fn properties_are_consistent(g in arb_graph(9)) {
        let p = extract_properties(&g);
        prop_assert_eq!(p.nodes as usize, g.node_count());
        prop_assert_eq!(p.edges as usize, g.edge_count());
        prop_assert!((p.avg_degree - 2.0 * p.edges as f64 / p.nodes as f64).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&p.avg_cc));
    }
}

#[test]
fn complete_graph_counts() {
    let k7 = Graph::complete(7).unwrap();
    let expected = [35, 105, 252, 420];
    for (k, e) in (3..=6).zip(expected) {
        assert_eq!(count_cycles(&k7, k).unwrap(), e);
        assert_eq!(brute_cycles(&k7, k), e);
    }
}

#[test]
fn denser_random_graphs() {
    let mut rng = seed::rng(77);
    for i in 0..30 {
        let g = random_graph(&mut rng, 9 + i % 4, 0.5);
        for k in 3..=6 {
            assert_eq!(count_cycles(&g, k).unwrap(), brute_cycles(&g, k), "graph {i} k {k}");
        }
    }
}
