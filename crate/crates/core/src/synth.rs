//! Synthetic datasets whose labels correlate with one graph property by
//! construction.
//!
//! A correlated table supplies a per-sample property target and label; each
//! target is then realised as a graph:
//!
//! * average degree: an Erdős–Rényi `G(n, p)` draw with `p = d / (n - 1)`,
//!   redrawn until the realised average degree is within tolerance;
//! * average clustering: a `G(n, m)` base with `m` fixed by the degree level,
//!   followed by edge rewiring that either closes open wedges (raising
//!   clustering) or breaks triangles (lowering it). Rewiring preserves the
//!   edge count, so the average degree carries no label signal. The number of
//!   rewiring steps is chosen by bisection along a recorded trajectory.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    average_clustering, extract_all, Graph, PropertyName, PropertySequence, PropertyTable,
    PropertyVector, sequences_from_vectors,
};
use crate::io::manifest::{DatasetManifest, DatasetSource};
use crate::metrics::pearson;
use crate::sampler::{
    generate_correlated_table, CorrelatedTable, CorrelationSpec, Family, LatentFamily,
    PropertySpec,
};
use crate::seed;

const DEGREE_TAG: u64 = 0x4445_4752;
const CC_TAG: u64 = 0x4343_5447;
const NODES_TAG: u64 = 0x4e4f_4445;
const GRAPH_TAG: u64 = 0x4752_4150;

/// Random probes per rewiring step before the process counts as saturated.
const PROBES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynKind {
    SynDegree,
    SynCc,
}

impl SynKind {
    pub fn controlled_property(self) -> PropertyName {
        match self {
            SynKind::SynDegree => PropertyName::AvgDegree,
            SynKind::SynCc => PropertyName::AvgCc,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SynKind::SynDegree => "syn-degree",
            SynKind::SynCc => "syn-cc",
        }
    }
}

impl std::str::FromStr for SynKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "syn-degree" | "degree" => Ok(SynKind::SynDegree),
            "syn-cc" | "cc" => Ok(SynKind::SynCc),
            other => Err(Error::Config(format!("unknown dataset kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    /// Inclusive node-count range; counts are drawn independently of labels.
    pub node_count_range: (usize, usize),
    /// Allowed |realised - target| average degree.
    pub degree_tolerance: f64,
    /// Allowed |realised - target| average clustering coefficient.
    pub cc_tolerance: f64,
    pub max_retries: usize,
    pub seed: u64,
    /// Range of average-degree targets in Syn-Degree datasets.
    pub degree_range: (f64, f64),
    /// Range of clustering targets in Syn-CC datasets.
    pub cc_range: (f64, f64),
    /// Average degree held fixed across Syn-CC graphs.
    pub cc_degree_level: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            node_count_range: (20, 60),
            degree_tolerance: 0.5,
            cc_tolerance: 0.05,
            max_retries: 20,
            seed: 0,
            degree_range: (2.0, 8.0),
            cc_range: (0.05, 0.45),
            cc_degree_level: 4.5,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.node_count_range;
        if lo < 3 || lo > hi {
            return Err(Error::Config(format!("node_count_range ({lo}, {hi}) needs 3 <= lo <= hi")));
        }
        if !(self.degree_tolerance > 0.0) || !(self.cc_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be > 0".into()));
        }
        if self.max_retries < 1 {
            return Err(Error::Config("max_retries must be at least 1".into()));
        }
        let (dlo, dhi) = self.degree_range;
        if !(dlo > 0.0 && dlo < dhi && dhi <= (lo - 1) as f64) {
            return Err(Error::Config(format!(
                "degree_range ({dlo}, {dhi}) must satisfy 0 < lo < hi <= {}",
                lo - 1
            )));
        }
        let (clo, chi) = self.cc_range;
        if !(clo >= 0.0 && clo < chi && chi <= 1.0) {
            return Err(Error::Config(format!("cc_range ({clo}, {chi}) must lie in [0, 1]")));
        }
        if !(self.cc_degree_level > 0.0 && self.cc_degree_level <= (lo - 1) as f64) {
            return Err(Error::Config(format!(
                "cc_degree_level {} must lie in (0, {}]",
                self.cc_degree_level,
                lo - 1
            )));
        }
        Ok(())
    }
}

/// Erdős–Rényi graph whose average degree is within tolerance of `d_target`;
/// the closest of `max_retries` draws is returned if none qualifies.
pub fn graph_for_degree_target(
    n: usize,
    d_target: f64,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<Graph> {
    if n < 2 || !(d_target > 0.0 && d_target <= (n - 1) as f64) {
        return Err(Error::InfeasibleTarget(format!(
            "average degree {d_target} is outside (0, {}] for {n} nodes",
            n.saturating_sub(1)
        )));
    }
    let p = d_target / (n - 1) as f64;
    if p >= 1.0 {
        return Graph::complete(n);
    }
    let mut best: Option<(f64, Graph)> = None;
    for attempt in 0..config.max_retries.max(1) {
        let mut rng = seed::rng_for(seed, DEGREE_TAG, attempt as u64);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges)?;
        let err = (g.average_degree() - d_target).abs();
        if err <= config.degree_tolerance {
            return Ok(g);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, g));
        }
    }
    Ok(best.expect("at least one attempt").1)
}

/// Mutable graph used by the rewiring process.
#[derive(Clone)]
struct Rewirer {
    n: usize,
    matrix: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
struct Rewire {
    removed: (usize, usize),
    added: (usize, usize),
}

impl Rewirer {
    /// Uniform random graph with exactly `m` edges.
    fn random(n: usize, m: usize, rng: &mut seed::Rng) -> Self {
        let mut pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = m.min(pairs.len());
        let (chosen, _) = pairs.partial_shuffle(rng, m);
        let mut edges = chosen.to_vec();
        edges.sort_unstable();
        let mut r = Self {
            n,
            matrix: vec![false; n * n],
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
        };
        for (u, v) in edges {
            r.add(u, v);
        }
        r
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.n + v]
    }

    fn add(&mut self, u: usize, v: usize) {
        self.matrix[u * self.n + v] = true;
        self.matrix[v * self.n + u] = true;
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        self.edges.push((u.min(v), u.max(v)));
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.matrix[u * self.n + v] = false;
        self.matrix[v * self.n + u] = false;
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adjacency[a].iter().position(|&x| x == b).expect("edge present");
            self.adjacency[a].swap_remove(pos);
        }
        let key = (u.min(v), u.max(v));
        let pos = self.edges.iter().position(|&e| e == key).expect("edge present");
        self.edges.swap_remove(pos);
    }

    fn has_common_neighbor(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].iter().any(|&w| self.adjacent(w, b))
    }

    fn apply(&mut self, step: Rewire) {
        self.remove(step.removed.0, step.removed.1);
        self.add(step.added.0, step.added.1);
    }

    /// Closes a random open wedge, paying with an edge that lies on no triangle.
    fn close_wedge(&mut self, rng: &mut seed::Rng) -> Option<Rewire> {
        let wedge = (0..PROBES).find_map(|_| {
            let u = rng.random_range(0..self.n);
            let nbrs = &self.adjacency[u];
            if nbrs.len() < 2 {
                return None;
            }
            let i = rng.random_range(0..nbrs.len());
            let mut j = rng.random_range(0..nbrs.len() - 1);
            if j >= i {
                j += 1;
            }
            let (v, w) = (nbrs[i], nbrs[j]);
            (!self.adjacent(v, w)).then_some((u, v, w))
        })?;
        let (u, v, w) = wedge;
        let keep = |e: (usize, usize)| {
            let key = |a: usize, b: usize| (a.min(b), a.max(b));
            e == key(u, v) || e == key(u, w)
        };
        let removed = (0..PROBES).find_map(|_| {
            let e = self.edges[rng.random_range(0..self.edges.len())];
            (!keep(e) && !self.has_common_neighbor(e.0, e.1)).then_some(e)
        })?;
        let step = Rewire {
            removed,
            added: (v.min(w), v.max(w)),
        };
        self.apply(step);
        Some(step)
    }

    /// Removes a random triangle edge and adds an edge that closes no triangle.
    fn open_triangle(&mut self, rng: &mut seed::Rng) -> Option<Rewire> {
        if self.edges.is_empty() {
            return None;
        }
        let removed = (0..PROBES).find_map(|_| {
            let e = self.edges[rng.random_range(0..self.edges.len())];
            self.has_common_neighbor(e.0, e.1).then_some(e)
        })?;
        self.remove(removed.0, removed.1);
        let added = (0..PROBES).find_map(|_| {
            let a = rng.random_range(0..self.n);
            let b = rng.random_range(0..self.n);
            (a != b
                && (a.min(b), a.max(b)) != removed
                && !self.adjacent(a, b)
                && !self.has_common_neighbor(a, b))
            .then_some((a.min(b), a.max(b)))
        });
        let Some(added) = added else {
            self.add(removed.0, removed.1);
            return None;
        };
        self.add(added.0, added.1);
        Some(Rewire { removed, added })
    }

    fn to_graph(&self) -> Graph {
        Graph::new(self.n, self.edges.iter().copied()).expect("rewirer keeps a simple graph")
    }
}

/// A recorded rewiring run from a fixed base graph.
struct Trajectory {
    base: Rewirer,
    steps: Vec<Rewire>,
}

impl Trajectory {
    fn record(base: &Rewirer, closing: bool, max_steps: usize, rng: &mut seed::Rng) -> Self {
        let mut state = base.clone();
        let mut steps = Vec::new();
        while steps.len() < max_steps {
            let step = if closing {
                state.close_wedge(rng)
            } else {
                state.open_triangle(rng)
            };
            match step {
                Some(s) => steps.push(s),
                None => break,
            }
        }
        Self {
            base: base.clone(),
            steps,
        }
    }

    fn graph_at(&self, count: usize) -> Graph {
        let mut state = self.base.clone();
        for &s in &self.steps[..count] {
            state.apply(s);
        }
        state.to_graph()
    }

    /// Bisects for the step count whose clustering straddles `target`, given
    /// clustering trends up (closing) or down (opening) along the run.
    fn bisect(&self, target: f64, increasing: bool) -> (f64, Graph) {
        let below = |cc: f64| if increasing { cc < target } else { cc > target };
        let (mut lo, mut hi) = (0, self.steps.len());
        let hi_graph = self.graph_at(hi);
        let hi_cc = average_clustering(&hi_graph);
        if below(hi_cc) {
            return (hi_cc, hi_graph);
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if below(average_clustering(&self.graph_at(mid))) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        [lo, hi]
            .into_iter()
            .map(|s| {
                let g = self.graph_at(s);
                (average_clustering(&g), g)
            })
            .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
            .expect("two candidates")
    }
}

fn edge_budget(n: usize, degree_level: f64) -> usize {
    ((degree_level * n as f64 / 2.0).round() as usize).min(n * (n - 1) / 2)
}

/// Closest graph found to `cc_target`, and whether it is within tolerance.
fn realize_cc(
    n: usize,
    cc_target: f64,
    degree_level: f64,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<(Graph, bool)> {
    if n < 3 {
        return Err(Error::InfeasibleTarget(format!("{n} nodes cannot hold a triangle")));
    }
    if !(0.0..=1.0).contains(&cc_target) {
        return Err(Error::InfeasibleTarget(format!("clustering {cc_target} is outside [0, 1]")));
    }
    if !(degree_level > 0.0 && degree_level <= (n - 1) as f64) {
        return Err(Error::InfeasibleTarget(format!(
            "degree level {degree_level} is outside (0, {}]",
            n - 1
        )));
    }
    let m = edge_budget(n, degree_level);
    let mut best: Option<(f64, Graph)> = None;
    for attempt in 0..config.max_retries.max(1) {
        let mut rng = seed::rng_for(seed, CC_TAG, attempt as u64);
        let base = Rewirer::random(n, m, &mut rng);
        let base_graph = base.to_graph();
        let base_cc = average_clustering(&base_graph);
        let (cc, g) = if (base_cc - cc_target).abs() <= config.cc_tolerance {
            (base_cc, base_graph)
        } else {
            let closing = cc_target > base_cc;
            let max_steps = if closing { 4 * m } else { 2 * m };
            Trajectory::record(&base, closing, max_steps, &mut rng).bisect(cc_target, closing)
        };
        let err = (cc - cc_target).abs();
        if err <= config.cc_tolerance {
            return Ok((g, true));
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, g));
        }
    }
    Ok((best.expect("at least one attempt").1, false))
}

/// Graph with `n` nodes, `round(degree_level * n / 2)` edges and average
/// clustering within tolerance of `cc_target`.
pub fn graph_for_cc_target(
    n: usize,
    cc_target: f64,
    degree_level: f64,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<Graph> {
    let (g, hit) = realize_cc(n, cc_target, degree_level, config, seed)?;
    if hit {
        Ok(g)
    } else {
        Err(Error::UnreachableTarget(format!(
            "clustering {cc_target} not reached within ±{} after {} attempts (closest {:.4})",
            config.cc_tolerance,
            config.max_retries,
            average_clustering(&g)
        )))
    }
}

/// Mean clustering reached by saturating the wedge-closing process, over a
/// few calibration graphs with `n` nodes.
pub fn cc_ceiling(n: usize, degree_level: f64, seed: u64) -> f64 {
    const RUNS: u64 = 8;
    let m = edge_budget(n, degree_level);
    let total: f64 = (0..RUNS)
        .map(|run| {
            let mut rng = seed::rng_for(seed, CC_TAG ^ 0xffff, run);
            let base = Rewirer::random(n, m, &mut rng);
            let t = Trajectory::record(&base, true, 4 * m, &mut rng);
            average_clustering(&t.graph_at(t.steps.len()))
        })
        .sum();
    total / RUNS as f64
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub kind: SynKind,
    pub target_r: f64,
    pub graphs: Vec<Graph>,
    pub labels: Vec<usize>,
    /// Targets for the controlled property, in sample order.
    pub target_properties: Vec<PropertySequence>,
    pub realized: Vec<PropertyVector>,
    pub realized_properties: PropertyTable,
    pub spec: CorrelationSpec,
    pub config: GeneratorConfig,
    pub table: CorrelatedTable,
    /// Graphs whose realised property missed the tolerance; the closest
    /// attempt was kept.
    pub realization_misses: usize,
}

/// The correlation spec used for one dataset of a sweep.
pub fn synthetic_spec(
    kind: SynKind,
    r: f64,
    samples: usize,
    classes: usize,
    config: &GeneratorConfig,
) -> CorrelationSpec {
    let (low, high) = match kind {
        SynKind::SynDegree => config.degree_range,
        SynKind::SynCc => config.cc_range,
    };
    CorrelationSpec {
        properties: vec![PropertySpec {
            family: Family::Uniform { low, high },
            target_r: r,
        }],
        label_classes: classes,
        sigma_y: 1.0,
        sample_count: samples,
        noise: LatentFamily::Uniform,
    }
}

/// Builds one dataset. The correlated table is drawn from `config.seed`, so
/// datasets of a sweep that share a seed share their latents and graphs and
/// differ only in how strongly labels follow the property.
pub fn build_synthetic_dataset(
    kind: SynKind,
    r: f64,
    samples: usize,
    classes: usize,
    config: &GeneratorConfig,
) -> Result<SyntheticDataset> {
    config.validate()?;
    let spec = synthetic_spec(kind, r, samples, classes, config);
    let table = generate_correlated_table(&spec, config.seed)?;
    let targets = &table.property_targets[0];
    let (nlo, nhi) = config.node_count_range;

    let realized: Vec<(Graph, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let n = seed::rng_for(config.seed, NODES_TAG, i as u64).random_range(nlo..=nhi);
            let graph_seed = seed::derive(config.seed, GRAPH_TAG, i as u64);
            match kind {
                SynKind::SynDegree => {
                    let d = targets[i].min((n - 1) as f64);
                    let g = graph_for_degree_target(n, d, config, graph_seed)?;
                    let hit = (g.average_degree() - d).abs() <= config.degree_tolerance;
                    Ok((g, hit))
                }
                SynKind::SynCc => {
                    let cc = targets[i].clamp(0.0, 1.0);
                    realize_cc(n, cc, config.cc_degree_level, config, graph_seed)
                }
            }
        })
        .collect::<Result<_>>()?;

    let realization_misses = realized.iter().filter(|(_, hit)| !hit).count();
    if realization_misses > 0 {
        log::warn!(
            "{} r={r}: {realization_misses} of {samples} graphs missed their target tolerance",
            kind.as_str()
        );
    }
    let graphs: Vec<Graph> = realized.into_iter().map(|(g, _)| g).collect();
    let vectors = extract_all(&graphs);
    Ok(SyntheticDataset {
        kind,
        target_r: r,
        labels: table.labels.clone(),
        target_properties: vec![PropertySequence {
            property: kind.controlled_property(),
            values: targets.clone(),
        }],
        realized_properties: sequences_from_vectors(&vectors),
        realized: vectors,
        graphs,
        spec,
        config: config.clone(),
        table,
        realization_misses,
    })
}

/// One dataset per target correlation, all sharing `config.seed`.
pub fn build_sweep(
    kind: SynKind,
    rs: &[f64],
    samples: usize,
    classes: usize,
    config: &GeneratorConfig,
) -> Result<Vec<SyntheticDataset>> {
    rs.iter()
        .map(|&r| build_synthetic_dataset(kind, r, samples, classes, config))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedCorrelation {
    pub property: PropertyName,
    pub target_r: f64,
    /// `None` when the property or the labels are constant.
    pub realized_r: Option<f64>,
    /// `realized / target`; `None` when the target is 0 or realised is undefined.
    pub attenuation: Option<f64>,
}

pub fn verify_realized_correlation(ds: &SyntheticDataset, property: &str) -> Result<RealizedCorrelation> {
    let property: PropertyName = property.parse()?;
    let target_r = if property == ds.kind.controlled_property() {
        ds.target_r
    } else {
        0.0
    };
    let labels: Vec<f64> = ds.labels.iter().map(|&l| l as f64).collect();
    let realized_r = match pearson(&ds.realized_properties[&property].values, &labels) {
        Ok(r) => Some(r),
        Err(Error::UndefinedCorrelation(_)) => None,
        Err(e) => return Err(e),
    };
    let attenuation = match realized_r {
        Some(r) if target_r != 0.0 => Some(r / target_r),
        _ => None,
    };
    Ok(RealizedCorrelation {
        property,
        target_r,
        realized_r,
        attenuation,
    })
}

impl SyntheticDataset {
    pub fn name(&self) -> String {
        format!("{}_r{}", self.kind.as_str().replace('-', "_"), format_r(self.target_r))
    }

    pub fn class_count(&self) -> usize {
        self.spec.label_classes
    }

    pub fn manifest(&self) -> DatasetManifest {
        DatasetManifest {
            name: self.name(),
            graph_count: self.graphs.len(),
            class_count: self.spec.label_classes,
            has_attributes: false,
            source: DatasetSource::Synthetic,
            generation_spec: Some(serde_json::json!({
                "kind": self.kind,
                "target_r": self.target_r,
                "correlation_spec": self.spec,
                "generator_config": self.config,
            })),
        }
    }
}

/// Formats a correlation for file names: `0.1` -> `0.1`, `0.25` -> `0.25`.
pub fn format_r(r: f64) -> String {
    let s = format!("{r:.4}");
    let s = s.trim_end_matches('0');
    let s = s.strip_suffix('.').map(|t| format!("{t}.0")).unwrap_or_else(|| s.to_string());
    s
}
