//! Simple undirected graphs and the eight per-graph statistics used for
//! property/label analysis: node and edge counts, average degree, average
//! clustering coefficient, and counts of simple cycles of length 3 to 6.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest cycle length tracked by [`PropertyVector`].
pub const MAX_CYCLE_LEN: usize = 6;

/// An immutable simple undirected graph.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted; adjacency lists are
/// sorted by node id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and endpoints
    /// outside `0..node_count`.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("node_count must be at least 1".into()));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{node_count}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unique(node_count, normalized))
    }

    /// Builds a graph from edges that may contain duplicates in either
    /// orientation; duplicates collapse to one edge. Self-loops are still
    /// rejected.
    pub fn new_dedup(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut normalized: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        normalized.sort_unstable();
        normalized.dedup();
        Self::new(node_count, normalized)
    }

    fn from_sorted_unique(node_count: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            node_count,
            edges,
            adjacency,
        }
    }

    pub fn empty(node_count: usize) -> Result<Self> {
        Self::new(node_count, [])
    }

    pub fn complete(node_count: usize) -> Result<Self> {
        let edges = (0..node_count).flat_map(|u| (u + 1..node_count).map(move |v| (u, v)));
        Self::new(node_count, edges)
    }

    pub fn cycle(node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::InvalidGraph("a cycle needs at least 3 nodes".into()));
        }
        Self::new(node_count, (0..node_count).map(|u| (u, (u + 1) % node_count)))
    }

    pub fn path(node_count: usize) -> Result<Self> {
        Self::new(node_count, (1..node_count).map(|u| (u - 1, u)))
    }

    /// Disjoint union; nodes of `other` are shifted past the nodes of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.node_count;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_sorted_unique(self.node_count + other.node_count, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.node_count as f64
    }

    /// Number of triangles through `node`.
    pub fn triangles_at(&self, node: usize) -> usize {
        let nbrs = &self.adjacency[node];
        let twice: usize = nbrs
            .iter()
            .map(|&u| sorted_intersection_len(nbrs, &self.adjacency[u]))
            .sum();
        twice / 2
    }

    pub fn local_clustering(&self, node: usize) -> f64 {
        let d = self.degree(node);
        if d < 2 {
            return 0.0;
        }
        let wedges = d * (d - 1) / 2;
        self.triangles_at(node) as f64 / wedges as f64
    }
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Mean local clustering coefficient; nodes of degree < 2 count as 0.
pub fn average_clustering(g: &Graph) -> f64 {
    let total: f64 = (0..g.node_count()).map(|v| g.local_clustering(v)).sum();
    total / g.node_count() as f64
}

/// Number of distinct simple cycles with exactly `k` nodes, `k` in 3..=6.
pub fn count_cycles(g: &Graph, k: usize) -> Result<u64> {
    if !(3..=MAX_CYCLE_LEN).contains(&k) {
        return Err(Error::InvalidCycleLength(k));
    }
    Ok(cycle_counts(g, k)[k])
}

/// Counts simple cycles of every length in `3..=max_len` in one pass.
/// Index `i` of the result holds the count for length `i`.
///
/// Each cycle is enumerated once: it is rooted at its smallest node, only
/// larger nodes are visited, and of the two traversal directions only the
/// one whose second node is smaller than its last node is kept.
fn cycle_counts(g: &Graph, max_len: usize) -> [u64; MAX_CYCLE_LEN + 1] {
    let n = g.node_count();
    let mut counts = [0u64; MAX_CYCLE_LEN + 1];
    let mut dist = vec![usize::MAX; n];
    let mut on_path = vec![false; n];
    let mut queue = Vec::with_capacity(n);
    let mut path = Vec::with_capacity(max_len);

    for root in 0..n {
        if g.degree(root) < 2 {
            continue;
        }
        // Distances back to `root` inside the subgraph induced by nodes >= root,
        // bounded by how far a cycle of max_len can stray.
        let reach = max_len / 2;
        queue.clear();
        queue.push(root);
        dist[root] = 0;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            if dist[u] == reach {
                continue;
            }
            for &w in g.neighbors(u) {
                if w > root && dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }

        path.clear();
        path.push(root);
        on_path[root] = true;
        extend_path(g, root, max_len, &dist, &mut on_path, &mut path, &mut counts);
        on_path[root] = false;

        for &u in &queue {
            dist[u] = usize::MAX;
        }
    }
    counts
}

fn extend_path(
    g: &Graph,
    root: usize,
    max_len: usize,
    dist: &[usize],
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    counts: &mut [u64; MAX_CYCLE_LEN + 1],
) {
    let last = *path.last().expect("path holds the root");
    let len = path.len();
    for &next in g.neighbors(last) {
        if next <= root || on_path[next] {
            continue;
        }
        // After pushing `next` the path has len + 1 nodes; closing a cycle of at
        // most max_len nodes needs at most max_len - len more edges.
        if dist[next] == usize::MAX || dist[next] > max_len - len {
            continue;
        }
        path.push(next);
        on_path[next] = true;
        let plen = len + 1;
        if plen >= 3 && path[1] < next && g.has_edge(next, root) {
            counts[plen] += 1;
        }
        if plen < max_len {
            extend_path(g, root, max_len, dist, on_path, path, counts);
        }
        on_path[next] = false;
        path.pop();
    }
}

/// The eight graph statistics tracked per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyName {
    Nodes,
    Edges,
    AvgDegree,
    AvgCc,
    Cyc3,
    Cyc4,
    Cyc5,
    Cyc6,
}

impl PropertyName {
    pub const ALL: [PropertyName; 8] = [
        PropertyName::Nodes,
        PropertyName::Edges,
        PropertyName::AvgDegree,
        PropertyName::AvgCc,
        PropertyName::Cyc3,
        PropertyName::Cyc4,
        PropertyName::Cyc5,
        PropertyName::Cyc6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyName::Nodes => "nodes",
            PropertyName::Edges => "edges",
            PropertyName::AvgDegree => "avg_degree",
            PropertyName::AvgCc => "avg_cc",
            PropertyName::Cyc3 => "cyc3",
            PropertyName::Cyc4 => "cyc4",
            PropertyName::Cyc5 => "cyc5",
            PropertyName::Cyc6 => "cyc6",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PropertyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '='], "_");
        let name = match key.as_str() {
            "nodes" => PropertyName::Nodes,
            "edges" => PropertyName::Edges,
            "avg_degree" | "degree" => PropertyName::AvgDegree,
            "avg_cc" | "cc" | "clustering" => PropertyName::AvgCc,
            "cyc3" | "cyc_3" => PropertyName::Cyc3,
            "cyc4" | "cyc_4" => PropertyName::Cyc4,
            "cyc5" | "cyc_5" => PropertyName::Cyc5,
            "cyc6" | "cyc_6" => PropertyName::Cyc6,
            _ => return Err(Error::UnknownProperty(s.to_string())),
        };
        Ok(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyVector {
    pub nodes: u64,
    pub edges: u64,
    pub avg_degree: f64,
    pub avg_cc: f64,
    pub cyc3: u64,
    pub cyc4: u64,
    pub cyc5: u64,
    pub cyc6: u64,
}

impl PropertyVector {
    pub fn get(&self, name: PropertyName) -> f64 {
        match name {
            PropertyName::Nodes => self.nodes as f64,
            PropertyName::Edges => self.edges as f64,
            PropertyName::AvgDegree => self.avg_degree,
            PropertyName::AvgCc => self.avg_cc,
            PropertyName::Cyc3 => self.cyc3 as f64,
            PropertyName::Cyc4 => self.cyc4 as f64,
            PropertyName::Cyc5 => self.cyc5 as f64,
            PropertyName::Cyc6 => self.cyc6 as f64,
        }
    }

    /// Values in [`PropertyName::ALL`] order.
    pub fn to_array(&self) -> [f64; 8] {
        PropertyName::ALL.map(|p| self.get(p))
    }
}

pub fn extract_properties(g: &Graph) -> PropertyVector {
    let cycles = cycle_counts(g, MAX_CYCLE_LEN);
    PropertyVector {
        nodes: g.node_count() as u64,
        edges: g.edge_count() as u64,
        avg_degree: g.average_degree(),
        avg_cc: average_clustering(g),
        cyc3: cycles[3],
        cyc4: cycles[4],
        cyc5: cycles[5],
        cyc6: cycles[6],
    }
}

/// One statistic evaluated on every graph of a dataset, in sample order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySequence {
    pub property: PropertyName,
    pub values: Vec<f64>,
}

pub type PropertyTable = BTreeMap<PropertyName, PropertySequence>;

/// Per-graph property vectors, computed in parallel but returned in input order.
pub fn extract_all(graphs: &[Graph]) -> Vec<PropertyVector> {
    graphs.par_iter().map(extract_properties).collect()
}

pub fn property_sequences(graphs: &[Graph]) -> Result<PropertyTable> {
    if graphs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(sequences_from_vectors(&extract_all(graphs)))
}

pub fn sequences_from_vectors(vectors: &[PropertyVector]) -> PropertyTable {
    PropertyName::ALL
        .iter()
        .map(|&p| {
            let values = vectors.iter().map(|v| v.get(p)).collect();
            (p, PropertySequence { property: p, values })
        })
        .collect()
}
