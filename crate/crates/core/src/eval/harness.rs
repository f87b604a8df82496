use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{extract_all, Graph, PropertyVector};
use crate::io::{InfoType, MethodRole, MetricKind, ResultRecord};
use crate::metrics::{self, average_ranks, EffectivenessReport, GapRecord};
use crate::seed;

use super::folds::{stratified_holdout, stratified_kfold};
use super::kernels::{normalize_kernel, sp_kernel, wl_kernel_per_iteration};
use super::krr::{submatrix, KernelRidge};
use super::models::{LogisticRegression, Mlp, Standardizer};

const INNER_TAG: u64 = 0x494e_4e52;
const MLP_SEED_TAG: u64 = 0x4d4c_5053;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Logistic regression on average degree.
    DegreeBaseline,
    /// One-hidden-layer network on average degree.
    DegreeMlp,
    /// Logistic regression on the standardised property vector.
    PropertyFeatures,
    WlKernel,
    SpKernel,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::DegreeBaseline,
        ModelKind::DegreeMlp,
        ModelKind::PropertyFeatures,
        ModelKind::WlKernel,
        ModelKind::SpKernel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::DegreeBaseline => "degree-baseline",
            ModelKind::DegreeMlp => "degree-mlp-baseline",
            ModelKind::PropertyFeatures => "property-features",
            ModelKind::WlKernel => "wl-kernel",
            ModelKind::SpKernel => "sp-kernel",
        }
    }

    pub fn role(self) -> MethodRole {
        match self {
            ModelKind::DegreeBaseline | ModelKind::DegreeMlp => MethodRole::Baseline,
            _ => MethodRole::Graph,
        }
    }

    pub fn info_type(self) -> InfoType {
        InfoType::S
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "degree-baseline" | "degree" | "baseline" => Ok(ModelKind::DegreeBaseline),
            "degree-mlp" | "degree-mlp-baseline" | "mlp" => Ok(ModelKind::DegreeMlp),
            "property-features" | "properties" => Ok(ModelKind::PropertyFeatures),
            "wl-kernel" | "wl" => Ok(ModelKind::WlKernel),
            "sp-kernel" | "sp" => Ok(ModelKind::SpKernel),
            other => Err(Error::Config(format!("unknown roster entry `{other}`"))),
        }
    }
}

/// Candidate hyperparameters searched during model selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperGrid {
    pub wl_iterations: Vec<usize>,
    pub ridge_alpha: Vec<f64>,
    pub learning_rate: Vec<f64>,
    pub epochs: usize,
    pub hidden_units: usize,
}

impl Default for HyperGrid {
    fn default() -> Self {
        Self {
            wl_iterations: vec![1, 2, 3],
            ridge_alpha: vec![1e-3, 1e-1, 10.0],
            learning_rate: vec![0.1, 0.01],
            epochs: 500,
            hidden_units: 8,
        }
    }
}

/// One grid point; only the fields the model uses are set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HyperPoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wl_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge_alpha: Option<f64>,
}

impl HyperGrid {
    pub fn validate(&self) -> Result<()> {
        if self.wl_iterations.is_empty() || self.ridge_alpha.is_empty() || self.learning_rate.is_empty() {
            return Err(Error::Config("hyperparameter grid has an empty candidate list".into()));
        }
        if self.epochs == 0 || self.hidden_units == 0 {
            return Err(Error::Config("epochs and hidden_units must be positive".into()));
        }
        if self.ridge_alpha.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Config("ridge alphas must be positive".into()));
        }
        if self.learning_rate.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        Ok(())
    }

    pub fn points(&self, model: ModelKind) -> Vec<HyperPoint> {
        match model {
            ModelKind::DegreeBaseline | ModelKind::DegreeMlp | ModelKind::PropertyFeatures => self
                .learning_rate
                .iter()
                .map(|&lr| HyperPoint {
                    learning_rate: Some(lr),
                    ..Default::default()
                })
                .collect(),
            ModelKind::WlKernel => self
                .wl_iterations
                .iter()
                .flat_map(|&h| {
                    self.ridge_alpha.iter().map(move |&a| HyperPoint {
                        wl_iterations: Some(h),
                        ridge_alpha: Some(a),
                        ..Default::default()
                    })
                })
                .collect(),
            ModelKind::SpKernel => self
                .ridge_alpha
                .iter()
                .map(|&a| HyperPoint {
                    ridge_alpha: Some(a),
                    ..Default::default()
                })
                .collect(),
        }
    }
}

/// Roster, grid and protocol settings, readable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub roster: Vec<ModelKind>,
    pub grid: HyperGrid,
    pub k: usize,
    pub holdout_fraction: f64,
    /// Metric the effectiveness report is computed from.
    pub metric: MetricKind,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            roster: vec![
                ModelKind::DegreeBaseline,
                ModelKind::PropertyFeatures,
                ModelKind::WlKernel,
                ModelKind::SpKernel,
            ],
            grid: HyperGrid::default(),
            k: 10,
            holdout_fraction: 0.1,
            metric: MetricKind::Accuracy,
        }
    }
}

impl EvalConfig {
    /// Degree baseline against the property-feature classifier only.
    pub fn fast() -> Self {
        Self {
            roster: vec![ModelKind::DegreeBaseline, ModelKind::PropertyFeatures],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::Config("holdout_fraction must lie in (0, 1)".into()));
        }
        let mut seen = self.roster.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.roster.len() {
            return Err(Error::Config("roster lists a model twice".into()));
        }
        let baselines = self.roster.iter().filter(|m| m.role() == MethodRole::Baseline).count();
        if baselines != 1 {
            return Err(Error::Config(format!(
                "roster needs exactly one baseline per information type, found {baselines}"
            )));
        }
        if self.roster.iter().all(|m| m.role() == MethodRole::Baseline) {
            return Err(Error::Config("roster has no graph-aware model".into()));
        }
        Ok(())
    }
}

/// Graphs, labels and their property vectors.
#[derive(Debug, Clone)]
pub struct EvalDataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub labels: Vec<usize>,
    pub classes: usize,
    pub properties: Vec<PropertyVector>,
}

impl EvalDataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        let properties = extract_all(&graphs);
        Self::with_properties(name, graphs, labels, classes, properties)
    }

    pub fn with_properties(
        name: impl Into<String>,
        graphs: Vec<Graph>,
        labels: Vec<usize>,
        classes: usize,
        properties: Vec<PropertyVector>,
    ) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if graphs.len() != labels.len() || graphs.len() != properties.len() {
            return Err(Error::Config("graphs, labels and properties differ in length".into()));
        }
        if classes < 2 {
            return Err(Error::InvalidClassCount(classes));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::Config(format!("label {l} out of range for {classes} classes")));
        }
        Ok(Self {
            name: name.into(),
            graphs,
            labels,
            classes,
            properties,
        })
    }

    /// Subset in the order of `indices`.
    pub fn select(&self, name: impl Into<String>, indices: &[usize]) -> Result<Self> {
        Self::with_properties(
            name,
            indices.iter().map(|&i| self.graphs[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.classes,
            indices.iter().map(|&i| self.properties[i]).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub model: ModelKind,
    pub fold_accuracy: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_auc: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auc_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auc_std: Option<f64>,
    pub selected: Vec<HyperPoint>,
}

impl ModelResult {
    pub fn record(&self, dataset: &str, metric: MetricKind) -> Option<ResultRecord> {
        let (mean, std) = match metric {
            MetricKind::Accuracy => (self.mean, self.std),
            MetricKind::AucRoc => (self.auc_mean?, self.auc_std?),
        };
        Some(
            ResultRecord::new(dataset, self.model.as_str(), self.model.info_type(), self.model.role(), mean, std)
                .with_metric(metric),
        )
    }
}

/// Mean and population standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Rank-based area under the ROC curve; tied scores count one half.
/// Labels must be 0 or 1.
pub fn compute_auc(scores: &[f64], labels: &[usize]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Config("scores and labels differ in length".into()));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Config("AUC needs binary labels".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Degenerate("AUC needs both classes present".into()));
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l == 1).map(|(r, _)| r).sum();
    let p = pos as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * neg as f64))
}

enum Inputs {
    Features(Vec<Vec<f64>>),
    /// Normalised kernel per WL iteration count; SP uses key 0.
    Kernels(BTreeMap<usize, DMatrix<f64>>),
}

struct Prediction {
    labels: Vec<usize>,
    /// Score of class 1, for AUC.
    positive: Vec<f64>,
}

fn prepare(data: &EvalDataset, model: ModelKind, grid: &HyperGrid) -> Inputs {
    match model {
        ModelKind::DegreeBaseline | ModelKind::DegreeMlp => {
            let x: Vec<Vec<f64>> = data.properties.iter().map(|p| vec![p.avg_degree]).collect();
            if x.windows(2).all(|w| w[0][0] == w[1][0]) {
                log::warn!("{}: average degree is constant; {model} falls back to the class prior", data.name);
            }
            Inputs::Features(x)
        }
        ModelKind::PropertyFeatures => {
            Inputs::Features(data.properties.iter().map(|p| p.to_array().to_vec()).collect())
        }
        ModelKind::WlKernel => {
            let h_max = grid.wl_iterations.iter().copied().max().unwrap_or(0);
            let per_iter = wl_kernel_per_iteration(&data.graphs, h_max);
            let mut out = BTreeMap::new();
            let mut acc = DMatrix::zeros(data.graphs.len(), data.graphs.len());
            for (h, k) in per_iter.into_iter().enumerate() {
                acc += k;
                if grid.wl_iterations.contains(&h) {
                    out.insert(h, normalize_kernel(&acc));
                }
            }
            Inputs::Kernels(out)
        }
        ModelKind::SpKernel => Inputs::Kernels(BTreeMap::from([(0, normalize_kernel(&sp_kernel(&data.graphs)))])),
    }
}

#[allow(clippy::too_many_arguments)]
fn fit_predict(
    data: &EvalDataset,
    inputs: &Inputs,
    model: ModelKind,
    point: &HyperPoint,
    grid: &HyperGrid,
    train: &[usize],
    test: &[usize],
    seed: u64,
) -> Result<Prediction> {
    let train_labels: Vec<usize> = train.iter().map(|&i| data.labels[i]).collect();
    match inputs {
        Inputs::Features(x) => {
            let rows: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let std = Standardizer::fit(&rows)?;
            let z = std.transform_all(&rows);
            let lr = point.learning_rate.unwrap_or(grid.learning_rate[0]);
            let scores: Vec<Vec<f64>> = if model == ModelKind::DegreeMlp {
                let m = Mlp::fit(&z, &train_labels, data.classes, grid.hidden_units, lr, grid.epochs, seed)?;
                test.iter().map(|&i| m.scores(&std.transform(&x[i]))).collect()
            } else {
                let m = LogisticRegression::fit(&z, &train_labels, data.classes, lr, grid.epochs)?;
                test.iter().map(|&i| m.scores(&std.transform(&x[i]))).collect()
            };
            Ok(Prediction {
                labels: scores.iter().map(|s| super::models::argmax(s)).collect(),
                positive: scores.iter().map(|s| s[1]).collect(),
            })
        }
        Inputs::Kernels(kernels) => {
            let key = point.wl_iterations.unwrap_or(0);
            let k = kernels
                .get(&key)
                .ok_or_else(|| Error::Config(format!("no kernel prepared for h = {key}")))?;
            let alpha = point.ridge_alpha.unwrap_or(grid.ridge_alpha[0]);
            let m = KernelRidge::fit(&submatrix(k, train, train), &train_labels, data.classes, alpha)?;
            let s = m.scores(&submatrix(k, test, train));
            let scores: Vec<Vec<f64>> = s.row_iter().map(|r| r.iter().copied().collect()).collect();
            Ok(Prediction {
                labels: scores.iter().map(|s| super::models::argmax(s)).collect(),
                positive: scores.iter().map(|s| s[1] - s[0]).collect(),
            })
        }
    }
}

fn accuracy(predicted: &[usize], data: &EvalDataset, idx: &[usize]) -> f64 {
    let hits = predicted.iter().zip(idx).filter(|(p, &i)| **p == data.labels[i]).count();
    hits as f64 / idx.len() as f64
}

struct FoldOutcome {
    accuracy: f64,
    auc: Option<f64>,
    selected: HyperPoint,
}

/// Outer k-fold risk assessment. Within each training portion a stratified
/// holdout picks the grid point with the best validation accuracy (first in
/// grid order on ties); the winner is refit on the whole training portion and
/// scored on the test fold.
pub fn run_risk_assessment(
    data: &EvalDataset,
    model: ModelKind,
    config: &EvalConfig,
    seed: u64,
) -> Result<ModelResult> {
    config.grid.validate()?;
    let plan = stratified_kfold(&data.labels, config.k, seed)?;
    let inputs = prepare(data, model, &config.grid);
    let points = config.grid.points(model);
    let binary = data.classes == 2;

    let outcomes = (0..config.k)
        .into_par_iter()
        .map(|fold| -> Result<FoldOutcome> {
            let train = plan.train_indices(fold);
            let test = plan.test_indices(fold);
            let fold_seed = seed::derive(seed, MLP_SEED_TAG, fold as u64);
            let (inner_train, inner_val) = stratified_holdout(
                &data.labels,
                &train,
                config.holdout_fraction,
                seed::derive(seed, INNER_TAG, fold as u64),
            );
            let mut selected = points[0];
            if points.len() > 1 && !inner_val.is_empty() {
                let mut best = f64::NEG_INFINITY;
                for p in &points {
                    let pred = fit_predict(data, &inputs, model, p, &config.grid, &inner_train, &inner_val, fold_seed)?;
                    let acc = accuracy(&pred.labels, data, &inner_val);
                    if acc > best {
                        best = acc;
                        selected = *p;
                    }
                }
            }
            let pred = fit_predict(data, &inputs, model, &selected, &config.grid, &train, &test, fold_seed)?;
            let auc = if binary {
                let truth: Vec<usize> = test.iter().map(|&i| data.labels[i]).collect();
                Some(compute_auc(&pred.positive, &truth)?)
            } else {
                None
            };
            Ok(FoldOutcome {
                accuracy: accuracy(&pred.labels, data, &test),
                auc,
                selected,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let fold_accuracy: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    let (mean, std) = mean_std(&fold_accuracy);
    let fold_auc: Option<Vec<f64>> = outcomes.iter().map(|o| o.auc).collect();
    let (auc_mean, auc_std) = match &fold_auc {
        Some(v) => {
            let (m, s) = mean_std(v);
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    Ok(ModelResult {
        model,
        fold_accuracy,
        mean,
        std,
        fold_auc,
        auc_mean,
        auc_std,
        selected: outcomes.iter().map(|o| o.selected).collect(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapMeasurement {
    pub dataset: String,
    pub seed: u64,
    pub results: Vec<ModelResult>,
    /// Accuracy records for every model, plus AUC records on binary tasks.
    pub records: Vec<ResultRecord>,
    pub gaps: Vec<GapRecord>,
    pub report: EffectivenessReport,
}

impl GapMeasurement {
    pub fn result(&self, model: ModelKind) -> Option<&ModelResult> {
        self.results.iter().find(|r| r.model == model)
    }
}

/// Risk assessment for every model of the roster (all on the same folds),
/// then best gap per information type and effectiveness.
pub fn measure_gaps(data: &EvalDataset, config: &EvalConfig, seed: u64) -> Result<GapMeasurement> {
    config.validate()?;
    let results = config
        .roster
        .iter()
        .map(|&m| run_risk_assessment(data, m, config, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ResultRecord> =
        results.iter().filter_map(|r| r.record(&data.name, MetricKind::Accuracy)).collect();
    records.extend(results.iter().filter_map(|r| r.record(&data.name, MetricKind::AucRoc)));
    let scored: Vec<ResultRecord> = records.iter().filter(|r| r.metric == config.metric).cloned().collect();
    if scored.is_empty() {
        return Err(Error::Config(format!("metric {} is unavailable for this dataset", config.metric)));
    }
    let mut gaps = Vec::new();
    for t in [InfoType::A, InfoType::S] {
        if scored.iter().any(|r| r.info_type == t) {
            gaps.push(metrics::select_best_gap(&scored, t)?);
        }
    }
    let mut report = metrics::effectiveness(&gaps, data.classes)?;
    report.dataset = data.name.clone();
    Ok(GapMeasurement {
        dataset: data.name.clone(),
        seed,
        results,
        records,
        gaps,
        report,
    })
}
