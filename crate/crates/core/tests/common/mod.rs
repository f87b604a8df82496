#![allow(dead_code)]

use effbench_core::Graph;
use nalgebra::DMatrix;
use rand::Rng;

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

/// Simple k-cycles by trying every ordered k-tuple whose first node is its
/// smallest and whose second node is smaller than its last.
pub fn brute_cycles(g: &Graph, k: usize) -> u64 {
    fn extend(g: &Graph, k: usize, path: &mut Vec<usize>, count: &mut u64) {
        if path.len() == k {
            if path[1] < path[k - 1] && g.has_edge(path[k - 1], path[0]) {
                *count += 1;
            }
            return;
        }
        for v in 0..g.node_count() {
            if v > path[0] && !path.contains(&v) && g.has_edge(*path.last().unwrap(), v) {
                path.push(v);
                extend(g, k, path, count);
                path.pop();
            }
        }
    }
    let mut count = 0;
    for s in 0..g.node_count() {
        extend(g, k, &mut vec![s], &mut count);
    }
    count
}

pub fn brute_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    let mut total = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| g.has_edge(u, v)).collect();
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut t = 0;
        for i in 0..d {
            for j in i + 1..d {
                if g.has_edge(nb[i], nb[j]) {
                    t += 1;
                }
            }
        }
        total += t as f64 / (d * (d - 1) / 2) as f64;
    }
    total / n as f64
}
