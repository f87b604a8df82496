use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::graph::Graph;

/// Sparse histogram sorted by key.
type Histogram = Vec<(u32, f64)>;

fn histogram(colors: impl Iterator<Item = u32>) -> Histogram {
    let mut counts: Vec<u32> = colors.collect();
    counts.sort_unstable();
    let mut out: Histogram = Vec::new();
    for c in counts {
        match out.last_mut() {
            Some((k, n)) if *k == c => *n += 1.0,
            _ => out.push((c, 1.0)),
        }
    }
    out
}

fn sparse_dot(a: &Histogram, b: &Histogram) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

fn gram(features: &[Histogram]) -> DMatrix<f64> {
    let n = features.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| sparse_dot(&features[i], &features[j])).collect())
        .collect();
    let mut k = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// WL subtree colour histograms for iterations `0..=h`. Iteration 0 colours
/// nodes by degree; colour ids are shared across the whole batch.
pub fn wl_features(graphs: &[Graph], h: usize) -> Vec<Vec<Histogram>> {
    let mut colors: Vec<Vec<u32>> = graphs
        .iter()
        .map(|g| (0..g.node_count()).map(|v| g.degree(v) as u32).collect())
        .collect();
    let mut per_iter = vec![colors.iter().map(|c| histogram(c.iter().copied())).collect::<Vec<_>>()];
    for _ in 0..h {
        let mut dict: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let mut next = Vec::with_capacity(graphs.len());
        for (g, c) in graphs.iter().zip(&colors) {
            let mut relabeled = Vec::with_capacity(g.node_count());
            for v in 0..g.node_count() {
                let mut sig: Vec<u32> = g.neighbors(v).iter().map(|&u| c[u]).collect();
                sig.sort_unstable();
                let fresh = dict.len() as u32;
                relabeled.push(*dict.entry((c[v], sig)).or_insert(fresh));
            }
            next.push(relabeled);
        }
        colors = next;
        per_iter.push(colors.iter().map(|c| histogram(c.iter().copied())).collect());
    }
    per_iter
}

/// Kernel contribution of each WL iteration; the kernel for `h` is the sum of
/// the first `h + 1` entries.
pub fn wl_kernel_per_iteration(graphs: &[Graph], h: usize) -> Vec<DMatrix<f64>> {
    wl_features(graphs, h).iter().map(|f| gram(f)).collect()
}

pub fn wl_kernel(graphs: &[Graph], h: usize) -> DMatrix<f64> {
    let n = graphs.len();
    wl_kernel_per_iteration(graphs, h)
        .into_iter()
        .fold(DMatrix::zeros(n, n), |acc, k| acc + k)
}

/// Histogram of shortest-path lengths over unordered reachable node pairs.
pub fn shortest_path_histogram(g: &Graph) -> Histogram {
    let n = g.node_count();
    let mut lengths = Vec::new();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        lengths.extend((s + 1..n).filter(|&t| dist[t] != u32::MAX).map(|t| dist[t]));
    }
    histogram(lengths.into_iter())
}

pub fn sp_kernel(graphs: &[Graph]) -> DMatrix<f64> {
    let features: Vec<Histogram> = graphs.par_iter().map(shortest_path_histogram).collect();
    gram(&features)
}

/// Cosine normalisation `K_ij / sqrt(K_ii K_jj)`; rows of zero-norm graphs
/// become zero.
pub fn normalize_kernel(k: &DMatrix<f64>) -> DMatrix<f64> {
    let d: Vec<f64> = k.diagonal().iter().map(|&v| if v > 0.0 { v.sqrt() } else { 0.0 }).collect();
    DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| {
        if d[i] == 0.0 || d[j] == 0.0 {
            0.0
        } else {
            k[(i, j)] / (d[i] * d[j])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sp_path_vs_triangle() {
        let p3 = Graph::path(3).unwrap();
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(shortest_path_histogram(&p3), vec![(1, 2.0), (2, 1.0)]);
        assert_eq!(shortest_path_histogram(&k3), vec![(1, 3.0)]);
        let k = sp_kernel(&[p3, k3]);
        assert_eq!(k[(0, 1)], 6.0);
        assert_eq!(k[(0, 0)], 5.0);
        assert_eq!(k[(1, 1)], 9.0);
    }

    #[test]
    fn sp_edgeless_is_zero() {
        let e = Graph::empty(4).unwrap();
        let k = sp_kernel(&[e.clone(), Graph::complete(4).unwrap(), e]);
        assert_eq!(k[(0, 1)], 0.0);
        assert_eq!(k[(0, 2)], 0.0);
        assert_eq!(k[(0, 0)], 0.0);
    }

    #[test]
    fn sp_skips_unreachable_pairs() {
        let g = Graph::complete(3).unwrap().disjoint_union(&Graph::path(2).unwrap());
        assert_eq!(shortest_path_histogram(&g), vec![(1, 4.0)]);
    }

    #[test]
    fn wl_zero_is_degree_histogram() {
        let graphs = [Graph::path(4).unwrap(), Graph::cycle(4).unwrap(), Graph::complete(3).unwrap()];
        let k = wl_kernel(&graphs, 0);
        // P4 degrees {1:2, 2:2}, C4 {2:4}, K3 {2:3}
        assert_eq!(k[(0, 1)], 8.0);
        assert_eq!(k[(0, 2)], 6.0);
        assert_eq!(k[(1, 2)], 12.0);
        assert_eq!(k[(0, 0)], 8.0);
    }

    #[test]
    fn wl_isomorphic_pair() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap();
        let relabeled = Graph::new(5, [(4, 3), (3, 2), (2, 1), (3, 0)]).unwrap();
        let k = wl_kernel(&[g, relabeled], 3);
        assert_eq!(k[(0, 0)], k[(0, 1)]);
        assert_eq!(k[(1, 1)], k[(0, 1)]);
    }

    #[test]
    fn wl_cannot_separate_c6_from_two_triangles() {
        let c6 = Graph::cycle(6).unwrap();
        let k3 = Graph::complete(3).unwrap();
        let two = k3.disjoint_union(&k3);
        let other = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap();
        let k = wl_kernel(&[c6, two, other], 2);
        for j in 0..3 {
            assert_eq!(k[(0, j)], k[(1, j)]);
        }
    }

    #[test]
    fn normalized_diagonal_is_one() {
        let graphs = [Graph::path(5).unwrap(), Graph::complete(4).unwrap(), Graph::empty(2).unwrap()];
        let k = normalize_kernel(&sp_kernel(&graphs));
        assert!((k[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((k[(1, 1)] - 1.0).abs() < 1e-12);
        assert_eq!(k[(2, 2)], 0.0);
        assert!(k[(0, 1)] < 1.0);
    }
}
