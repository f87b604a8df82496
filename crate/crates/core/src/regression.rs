//! Predicting dataset effectiveness from cheap dataset statistics.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{mean_std, measure_gaps, EvalConfig, EvalDataset, Standardizer};
use crate::graph::PropertyName;
use crate::metrics::{pearson, spearman};
use crate::seed;

const SPLIT_TAG: u64 = 0x5350_4c54;
const MEASURE_TAG: u64 = 0x4d45_4153;
const REPEAT_TAG: u64 = 0x5245_5054;
const PERMUTE_TAG: u64 = 0x5045_524d;

pub const FEATURE_COUNT: usize = 26;

/// Feature names in vector order: mean, std and label correlation for each
/// property, then log10 of the graph count and the class count.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_COUNT);
    for p in PropertyName::ALL {
        names.push(format!("{p}_mean"));
        names.push(format!("{p}_std"));
        names.push(format!("{p}_label_r"));
    }
    names.push("log10_graphs".into());
    names.push("classes".into());
    names
}

/// Splits into `parts` disjoint stratified subsets whose sizes differ by at
/// most one. Each subset keeps the original sample order.
pub fn split_into_subsets(
    data: &EvalDataset,
    parts: usize,
    min_size: usize,
    seed: u64,
) -> Result<Vec<EvalDataset>> {
    if parts == 0 {
        return Err(Error::Config("parts must be positive".into()));
    }
    let n = data.labels.len();
    if n < parts * min_size {
        return Err(Error::TooSmall(format!(
            "{} has {n} graphs, need at least {} for {parts} subsets of {min_size}",
            data.name,
            parts * min_size
        )));
    }
    let mut by_class = vec![Vec::new(); data.classes];
    for (i, &l) in data.labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = seed::rng_for(seed, SPLIT_TAG, 0);
    let mut members = vec![Vec::new(); parts];
    let mut position = 0;
    for mut class in by_class {
        class.shuffle(&mut rng);
        for i in class {
            members[position % parts].push(i);
            position += 1;
        }
    }
    members
        .into_iter()
        .enumerate()
        .map(|(s, mut idx)| {
            idx.sort_unstable();
            data.select(format!("{}#{s}", data.name), &idx)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFeatures {
    pub values: Vec<f64>,
    /// Properties whose label correlation was undefined and encoded as 0.
    pub undefined_correlations: Vec<PropertyName>,
}

pub fn dataset_features(data: &EvalDataset) -> Result<DatasetFeatures> {
    let first = data.labels[0];
    if data.labels.iter().all(|&l| l == first) {
        return Err(Error::Degenerate(format!("{} has a single class", data.name)));
    }
    let y: Vec<f64> = data.labels.iter().map(|&l| l as f64).collect();
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    let mut undefined = Vec::new();
    for p in PropertyName::ALL {
        let x: Vec<f64> = data.properties.iter().map(|v| v.get(p)).collect();
        let (m, s) = mean_std(&x);
        values.push(m);
        values.push(s);
        match pearson(&x, &y) {
            Ok(r) => values.push(r),
            Err(Error::UndefinedCorrelation(_)) => {
                undefined.push(p);
                values.push(0.0);
            }
            Err(e) => return Err(e),
        }
    }
    values.push((data.labels.len() as f64).log10());
    values.push(data.classes as f64);
    if !undefined.is_empty() {
        log::debug!("{}: undefined label correlation for {undefined:?}", data.name);
    }
    Ok(DatasetFeatures {
        values,
        undefined_correlations: undefined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub alpha: f64,
}

/// Closed-form ridge on z-scored features; the intercept is the target mean
/// and is not penalised.
pub fn ridge_fit(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Result<RidgeModel> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::EmptyDataset);
    }
    if !(alpha > 0.0) {
        return Err(Error::Config(format!("ridge alpha must be positive, got {alpha}")));
    }
    let standardizer = Standardizer::fit(x)?;
    let z = standardizer.transform_all(x);
    let (n, d) = (z.len(), z[0].len());
    let zm = DMatrix::from_fn(n, d, |i, j| z[i][j]);
    let intercept = y.iter().sum::<f64>() / n as f64;
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - intercept));
    let gram = zm.transpose() * &zm + DMatrix::identity(d, d) * alpha;
    let rhs = zm.transpose() * yc;
    let w = gram
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("ridge normal equations with alpha = {alpha}")))?
        .solve(&rhs);
    Ok(RidgeModel {
        standardizer,
        weights: w.iter().copied().collect(),
        intercept,
        alpha,
    })
}

pub fn ridge_predict(model: &RidgeModel, x: &[Vec<f64>]) -> Vec<f64> {
    x.iter()
        .map(|row| {
            let z = model.standardizer.transform(row);
            model.intercept + z.iter().zip(&model.weights).map(|(a, b)| a * b).sum::<f64>()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionScore {
    pub pearson: f64,
    /// Two-sided permutation p-value, `(1 + hits) / (1 + permutations)`.
    pub p_value: f64,
    pub spearman: f64,
}

pub fn evaluate_regression(
    predictions: &[f64],
    targets: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<RegressionScore> {
    if predictions.len() != targets.len() {
        return Err(Error::Config("predictions and targets differ in length".into()));
    }
    if targets.len() < 3 {
        return Err(Error::TooSmall(format!("{} test samples, need at least 3", targets.len())));
    }
    let r = pearson(predictions, targets)?;
    let mut rng = seed::rng_for(seed, PERMUTE_TAG, 0);
    let mut shuffled = targets.to_vec();
    let mut hits = 0usize;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        if pearson(predictions, &shuffled)?.abs() >= r.abs() - 1e-12 {
            hits += 1;
        }
    }
    Ok(RegressionScore {
        pearson: r,
        p_value: (1 + hits) as f64 / (1 + permutations) as f64,
        spearman: spearman(predictions, targets)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionConfig {
    pub parts: usize,
    pub min_subset_size: usize,
    pub alpha: f64,
    pub test_fraction: f64,
    pub repeats: usize,
    pub permutations: usize,
    pub eval: EvalConfig,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            parts: 10,
            min_subset_size: 50,
            alpha: 1.0,
            test_fraction: 0.3,
            repeats: 10,
            permutations: 10_000,
            eval: EvalConfig::fast(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSample {
    pub source: String,
    pub subset: usize,
    pub features: DatasetFeatures,
    pub target_effectiveness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatOutcome {
    pub test_sources: Vec<String>,
    pub score: RegressionScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub regressor: String,
    pub alpha: f64,
    pub seed: u64,
    pub samples: usize,
    pub pearson_mean: f64,
    pub pearson_std: f64,
    pub p_value_mean: f64,
    pub p_value_max: f64,
    pub spearman_mean: f64,
    pub spearman_std: f64,
    pub repeats: Vec<RepeatOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRun {
    pub samples: Vec<RegressionSample>,
    pub summary: RegressionSummary,
    /// Predictions of the first repeat's model for every sample.
    pub first_predictions: Vec<f64>,
    pub first_test: Vec<bool>,
}

/// Seed used to split dataset `index` of a pipeline run.
pub fn split_seed(master: u64, index: usize) -> u64 {
    seed::derive(master, SPLIT_TAG, index as u64)
}

/// Seed of the gap measurement on subset `subset` of dataset `index`.
pub fn measure_seed(master: u64, index: usize, subset: usize, parts: usize) -> u64 {
    seed::derive(master, MEASURE_TAG, (index * parts + subset) as u64)
}

/// Measures effectiveness on every subset of every dataset.
pub fn build_samples(
    datasets: &[EvalDataset],
    config: &RegressionConfig,
    seed: u64,
) -> Result<Vec<RegressionSample>> {
    config.eval.validate()?;
    let subsets: Vec<(usize, usize, EvalDataset)> = datasets
        .iter()
        .enumerate()
        .map(|(d, data)| {
            Ok(split_into_subsets(data, config.parts, config.min_subset_size, split_seed(seed, d))?
                .into_iter()
                .enumerate()
                .map(move |(s, sub)| (d, s, sub)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    subsets
        .par_iter()
        .map(|(d, s, sub)| {
            let m = measure_gaps(sub, &config.eval, measure_seed(seed, *d, *s, config.parts))?;
            Ok(RegressionSample {
                source: datasets[*d].name.clone(),
                subset: *s,
                features: dataset_features(sub)?,
                target_effectiveness: m.report.total_effectiveness,
            })
        })
        .collect()
}

/// Repeated source-grouped train/test splits: every subset of a test dataset
/// is held out together.
pub fn fit_and_score(samples: &[RegressionSample], config: &RegressionConfig, seed: u64) -> Result<RegressionRun> {
    let mut sources: Vec<String> = Vec::new();
    for s in samples {
        if !sources.contains(&s.source) {
            sources.push(s.source.clone());
        }
    }
    if sources.len() < 2 {
        return Err(Error::TooSmall("regression needs at least two source datasets".into()));
    }
    if config.repeats == 0 {
        return Err(Error::Config("repeats must be positive".into()));
    }
    let test_count = ((sources.len() as f64 * config.test_fraction).round() as usize).clamp(1, sources.len() - 1);
    let x: Vec<Vec<f64>> = samples.iter().map(|s| s.features.values.clone()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.target_effectiveness).collect();

    let mut repeats = Vec::with_capacity(config.repeats);
    let mut first_predictions = Vec::new();
    let mut first_test = Vec::new();
    for rep in 0..config.repeats {
        let mut order = sources.clone();
        order.shuffle(&mut seed::rng_for(seed, REPEAT_TAG, rep as u64));
        let mut test_sources = order[..test_count].to_vec();
        test_sources.sort();
        let is_test: Vec<bool> = samples.iter().map(|s| test_sources.contains(&s.source)).collect();
        let pick = |want: bool| -> (Vec<Vec<f64>>, Vec<f64>) {
            let idx = (0..samples.len()).filter(|&i| is_test[i] == want);
            idx.map(|i| (x[i].clone(), y[i])).unzip()
        };
        let (xtr, ytr) = pick(false);
        let (xte, yte) = pick(true);
        let model = ridge_fit(&xtr, &ytr, config.alpha)?;
        let pred = ridge_predict(&model, &xte);
        let score = evaluate_regression(&pred, &yte, config.permutations, seed::derive(seed, PERMUTE_TAG, rep as u64))?;
        if rep == 0 {
            first_predictions = ridge_predict(&model, &x);
            first_test = is_test;
        }
        repeats.push(RepeatOutcome { test_sources, score });
    }
    let pearsons: Vec<f64> = repeats.iter().map(|r| r.score.pearson).collect();
    let spearmans: Vec<f64> = repeats.iter().map(|r| r.score.spearman).collect();
    let ps: Vec<f64> = repeats.iter().map(|r| r.score.p_value).collect();
    let (pearson_mean, pearson_std) = mean_std(&pearsons);
    let (spearman_mean, spearman_std) = mean_std(&spearmans);
    Ok(RegressionRun {
        samples: samples.to_vec(),
        summary: RegressionSummary {
            regressor: "Ridge".into(),
            alpha: config.alpha,
            seed,
            samples: samples.len(),
            pearson_mean,
            pearson_std,
            p_value_mean: mean_std(&ps).0,
            p_value_max: ps.iter().cloned().fold(0.0, f64::max),
            spearman_mean,
            spearman_std,
            repeats,
        },
        first_predictions,
        first_test,
    })
}

pub fn run_pipeline(datasets: &[EvalDataset], config: &RegressionConfig, seed: u64) -> Result<RegressionRun> {
    let samples = build_samples(datasets, config, seed)?;
    fit_and_score(&samples, config, seed)
}

impl RegressionRun {
    /// One row per sample: source, subset, the 26 features, target, the first
    /// repeat's prediction and whether the sample was in its test split.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "source,subset")?;
        for name in feature_names() {
            write!(out, ",{name}")?;
        }
        writeln!(out, ",target,prediction,split")?;
        for (i, s) in self.samples.iter().enumerate() {
            write!(out, "{},{}", s.source, s.subset)?;
            for v in &s.features.values {
                write!(out, ",{v}")?;
            }
            let split = if self.first_test[i] { "test" } else { "train" };
            writeln!(out, ",{},{},{split}", s.target_effectiveness, self.first_predictions[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::Rng as _;

    fn triangles(n: usize) -> EvalDataset {
        let graphs = vec![Graph::complete(3).unwrap(); n];
        let labels = (0..n).map(|i| i % 2).collect();
        EvalDataset::new("k3", graphs, labels, 2).unwrap()
    }

    #[test]
    fn feature_names_count() {
        let names = feature_names();
        assert_eq!(names.len(), FEATURE_COUNT);
        assert_eq!(names[0], "nodes_mean");
        assert_eq!(names[11], "avg_cc_label_r");
    }

    #[test]
    fn subsets_partition() {
        let data = triangles(4096);
        let subs = split_into_subsets(&data, 10, 50, 3).unwrap();
        let mut sizes: Vec<usize> = subs.iter().map(|s| s.labels.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes[0], 409);
        assert_eq!(sizes[9], 410);
        assert_eq!(sizes.iter().sum::<usize>(), 4096);
        assert!(matches!(split_into_subsets(&triangles(40), 10, 50, 3), Err(Error::TooSmall(_))));
    }

    #[test]
    fn constant_subset_features() {
        let f = dataset_features(&triangles(20)).unwrap();
        assert_eq!(f.values.len(), FEATURE_COUNT);
        for p in 0..8 {
            assert_eq!(f.values[3 * p + 1], 0.0);
            assert_eq!(f.values[3 * p + 2], 0.0);
        }
        assert_eq!(f.undefined_correlations.len(), 8);
        assert_eq!(f.values[0], 3.0);
        assert_eq!(f.values[25], 2.0);
        assert_eq!(f, dataset_features(&triangles(20)).unwrap());
    }

    #[test]
    fn single_class_subset_is_rejected() {
        let data = EvalDataset::with_properties(
            "one",
            vec![Graph::path(3).unwrap(); 4],
            vec![1; 4],
            2,
            crate::graph::extract_all(&vec![Graph::path(3).unwrap(); 4]),
        )
        .unwrap();
        assert!(matches!(dataset_features(&data), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ridge_recovers_linear_target() {
        let mut rng = seed::rng(5);
        let x: Vec<Vec<f64>> = (0..60).map(|_| (0..26).map(|_| rng.random::<f64>()).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[4] - 1.0).collect();
        let m = ridge_fit(&x, &y, 1e-8).unwrap();
        let pred = ridge_predict(&m, &x);
        assert!(pearson(&pred, &y).unwrap() >= 0.999);
    }

    #[test]
    fn perfect_predictions_are_significant() {
        let t: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let s = evaluate_regression(&t, &t, 10_000, 1).unwrap();
        assert!((s.pearson - 1.0).abs() < 1e-12);
        assert!(s.p_value <= 1e-4);
        assert!(evaluate_regression(&t[..2], &t[..2], 10, 1).is_err());
    }

    #[test]
    fn noise_is_not_significant() {
        let mut rng = seed::rng(11);
        let a: Vec<f64> = (0..30).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..30).map(|_| rng.random()).collect();
        let s = evaluate_regression(&a, &b, 2000, 2).unwrap();
        assert!(s.p_value >= 0.05, "{s:?}");
    }
}
