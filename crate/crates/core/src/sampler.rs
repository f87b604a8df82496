//! Sampling of property targets and class labels with prescribed Pearson
//! correlations.
//!
//! Each property `k` is driven by an independent unit-variance latent `n_k`
//! of the property's family, and the continuous label is
//!
//! ```text
//! y = sigma_y * (sum_k r_k * n_k + n_0 * sqrt(1 - sum_k r_k^2))
//! ```
//!
//! with `n_0` an extra independent latent. Because the latents are
//! independent with unit variance, `corr(P_k, y) = r_k` exactly in the
//! population and `var(y) = sigma_y^2`. Labels are the min-max normalised
//! `y` scaled by the class count and floored, with the maximum clamped to
//! the top class.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

const SQRT_3: f64 = 1.732_050_807_568_877_2;
const SQRT_12: f64 = 3.464_101_615_137_754_6;

/// Slack allowed on the `sum r^2 <= 1` boundary for rounding in user input.
const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Seed-stream namespace for latent draws.
const LATENT_TAG: u64 = 0x4c41_5445_4e54;
const RETRY_TAG: u64 = 0x5245_5452_59;

/// Latent screening threshold in units of `1 / sqrt(N)`.
const SCREEN_Z: f64 = 3.2;
const SCREEN_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gaussian { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
}

impl Family {
    fn latent(&self) -> LatentFamily {
        match self {
            Family::Gaussian { .. } => LatentFamily::Gaussian,
            Family::Uniform { .. } => LatentFamily::Uniform,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Family::Gaussian { mean, .. } => mean,
            Family::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn std(&self) -> f64 {
        match *self {
            Family::Gaussian { std, .. } => std,
            Family::Uniform { low, high } => (high - low) / SQRT_12,
        }
    }

    /// Maps a unit-variance latent to the property scale.
    pub fn realize(&self, latent: f64) -> f64 {
        self.mean() + self.std() * latent
    }

    fn validate(&self, index: usize) -> Result<()> {
        match *self {
            Family::Gaussian { mean, std } => {
                if !mean.is_finite() || !std.is_finite() || std <= 0.0 {
                    return Err(Error::constraint(
                        format!("properties[{index}].std"),
                        format!("gaussian needs finite mean and std > 0 (got mean {mean}, std {std})"),
                    ));
                }
            }
            Family::Uniform { low, high } => {
                if !low.is_finite() || !high.is_finite() || low >= high {
                    return Err(Error::constraint(
                        format!("properties[{index}].low/high"),
                        format!("uniform needs low < high (got {low}, {high})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Shape of a zero-mean, unit-variance latent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentFamily {
    /// Standard normal.
    #[default]
    Gaussian,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    Uniform,
}

impl LatentFamily {
    fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            LatentFamily::Gaussian => rng.sample(StandardNormal),
            LatentFamily::Uniform => rng.random_range(-SQRT_3..=SQRT_3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertySpec {
    #[serde(flatten)]
    pub family: Family,
    pub target_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub properties: Vec<PropertySpec>,
    pub label_classes: usize,
    pub sigma_y: f64,
    pub sample_count: usize,
    /// Family of the extra latent that carries the label's unexplained
    /// variance. Bounded noise keeps the min-max label thresholds stable.
    #[serde(default)]
    pub noise: LatentFamily,
}

impl CorrelationSpec {
    pub fn sum_r_squared(&self) -> f64 {
        self.properties.iter().map(|p| p.target_r * p.target_r).sum()
    }

    /// Weight of the independent latent in the label variable.
    pub fn noise_weight(&self) -> f64 {
        (1.0 - self.sum_r_squared()).max(0.0).sqrt()
    }
}

/// Checks distribution parameters and the admissibility constraint
/// `sum r_k^2 <= 1`.
pub fn validate_spec(spec: &CorrelationSpec) -> Result<()> {
    if spec.properties.is_empty() {
        return Err(Error::constraint("properties", "at least one property is required"));
    }
    for (i, p) in spec.properties.iter().enumerate() {
        p.family.validate(i)?;
        if !p.target_r.is_finite() || !(-1.0..=1.0).contains(&p.target_r) {
            return Err(Error::constraint(
                format!("properties[{i}].target_r"),
                format!("must lie in [-1, 1], got {}", p.target_r),
            ));
        }
    }
    let total = spec.sum_r_squared();
    if total > 1.0 + ADMISSIBILITY_SLACK {
        return Err(Error::constraint(
            "sum of squared target correlations",
            format!("{total} exceeds 1"),
        ));
    }
    if spec.label_classes < 2 {
        return Err(Error::constraint(
            "label_classes",
            format!("need at least 2, got {}", spec.label_classes),
        ));
    }
    if !spec.sigma_y.is_finite() || spec.sigma_y <= 0.0 {
        return Err(Error::constraint(
            "sigma_y",
            format!("must be > 0, got {}", spec.sigma_y),
        ));
    }
    if spec.sample_count < 2 {
        return Err(Error::constraint(
            "sample_count",
            format!("need at least 2, got {}", spec.sample_count),
        ));
    }
    Ok(())
}

/// Independent unit-variance latent sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Latents {
    /// `n_0`, the label's independent component.
    pub noise: Vec<f64>,
    /// `n_1..n_K`, one per property.
    pub properties: Vec<Vec<f64>>,
}

/// Draws `n_0..n_K`. Each sequence comes from its own seed stream, so adding
/// a property leaves the existing sequences unchanged. A sequence whose
/// sample correlation with an earlier one exceeds `SCREEN_Z / sqrt(N)` is
/// redrawn from a fresh sub-stream (at most `SCREEN_ATTEMPTS` times, keeping
/// the least correlated draw), which keeps the finite-sample latents
/// pairwise uncorrelated at the `|r| <= 0.05` level for `N = 4096`.
pub fn sample_latents(spec: &CorrelationSpec, seed: u64) -> Result<Latents> {
    validate_spec(spec)?;
    let n = spec.sample_count;
    let bound = SCREEN_Z / (n as f64).sqrt();
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(spec.properties.len() + 1);
    let families = std::iter::once(spec.noise).chain(spec.properties.iter().map(|p| p.family.latent()));
    for (stream, family) in families.enumerate() {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for attempt in 0..SCREEN_ATTEMPTS {
            let mut rng = if attempt == 0 {
                seed::rng_for(seed, LATENT_TAG, stream as u64)
            } else {
                seed::rng_for(seed::derive(seed, RETRY_TAG, attempt), LATENT_TAG, stream as u64)
            };
            let draw: Vec<f64> = (0..n).map(|_| family.draw(&mut rng)).collect();
            let worst = accepted.iter().map(|a| abs_corr(a, &draw)).fold(0.0, f64::max);
            if best.as_ref().is_none_or(|(w, _)| worst < *w) {
                best = Some((worst, draw));
            }
            if worst <= bound || n < 3 {
                break;
            }
        }
        accepted.push(best.expect("at least one attempt").1);
    }
    let noise = accepted.remove(0);
    Ok(Latents {
        noise,
        properties: accepted,
    })
}

fn abs_corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        (sab / (saa * sbb).sqrt()).abs()
    }
}

pub fn realize_properties(spec: &CorrelationSpec, latents: &Latents) -> Vec<Vec<f64>> {
    spec.properties
        .iter()
        .zip(&latents.properties)
        .map(|(p, n)| n.iter().map(|&x| p.family.realize(x)).collect())
        .collect()
}

pub fn compose_label_variable(spec: &CorrelationSpec, latents: &Latents) -> Vec<f64> {
    let noise_weight = spec.noise_weight();
    (0..latents.noise.len())
        .map(|i| {
            let signal: f64 = spec
                .properties
                .iter()
                .zip(&latents.properties)
                .map(|(p, n)| p.target_r * n[i])
                .sum();
            spec.sigma_y * (signal + noise_weight * latents.noise[i])
        })
        .collect()
}

/// Min-max normalises `y`, scales by `classes` and floors; the maximum maps to
/// `classes - 1`.
pub fn discretize_labels(y: &[f64], classes: usize) -> Result<Vec<usize>> {
    if classes < 2 {
        return Err(Error::InvalidClassCount(classes));
    }
    if y.len() < 2 {
        return Err(Error::Degenerate("need at least two values to discretize".into()));
    }
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        return Err(Error::Degenerate("label variable is constant".into()));
    }
    let top = classes - 1;
    Ok(y.iter()
        .map(|&v| {
            let scaled = (v - lo) / (hi - lo) * classes as f64;
            (scaled.floor() as usize).min(top)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedTable {
    pub property_targets: Vec<Vec<f64>>,
    pub continuous_label: Vec<f64>,
    pub labels: Vec<usize>,
}

impl CorrelatedTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Writes columns `p_1..p_K, y_cont, label`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let k = self.property_targets.len();
        let mut header: Vec<String> = (1..=k).map(|i| format!("p_{i}")).collect();
        header.push("y_cont".into());
        header.push("label".into());
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            for column in &self.property_targets {
                write!(out, "{},", column[i])?;
            }
            writeln!(out, "{},{}", self.continuous_label[i], self.labels[i])?;
        }
        Ok(())
    }
}

pub fn generate_correlated_table(spec: &CorrelationSpec, seed: u64) -> Result<CorrelatedTable> {
    let latents = sample_latents(spec, seed)?;
    let property_targets = realize_properties(spec, &latents);
    let continuous_label = compose_label_variable(spec, &latents);
    let labels = discretize_labels(&continuous_label, spec.label_classes)?;
    Ok(CorrelatedTable {
        property_targets,
        continuous_label,
        labels,
    })
}
