use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

const MLP_TAG: u64 = 0x4d4c_50;

/// Column-wise z-scoring with statistics taken from the training rows.
/// Constant columns map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut scale = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                scale[j] += (r[j] - mean[j]).powi(2);
            }
        }
        for s in &mut scale {
            *s = (*s / n).sqrt();
            if !(*s > 1e-12) {
                *s = 0.0;
            }
        }
        Ok(Self { mean, scale })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(x, (m, s))| if *s == 0.0 { 0.0 } else { (x - m) / s })
            .collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.scale.iter().all(|&s| s == 0.0)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot_bias(w: &[f64], x: &[f64]) -> f64 {
    w[0] + w[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
}

fn class_count_of(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Binary logistic regression, one-vs-rest for more classes. Full-batch
/// gradient descent from zero weights, so the fit is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub classes: usize,
    /// One weight vector per scored class, bias first. Binary problems keep
    /// a single vector for class 1.
    pub weights: Vec<Vec<f64>>,
}

impl LogisticRegression {
    pub fn fit(
        x: &[Vec<f64>],
        labels: &[usize],
        classes: usize,
        learning_rate: f64,
        epochs: usize,
    ) -> Result<Self> {
        if x.is_empty() || x.len() != labels.len() {
            return Err(Error::EmptyDataset);
        }
        if classes < 2 {
            return Err(Error::InvalidClassCount(classes));
        }
        let scored: Vec<usize> = if classes == 2 { vec![1] } else { (0..classes).collect() };
        let weights = scored
            .iter()
            .map(|&c| {
                let y: Vec<f64> = labels.iter().map(|&l| f64::from(u8::from(l == c))).collect();
                fit_binary(x, &y, learning_rate, epochs)
            })
            .collect();
        Ok(Self { classes, weights })
    }

    /// Per-class scores; for binary problems `[1 - p, p]`.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        if self.classes == 2 {
            let p = sigmoid(dot_bias(&self.weights[0], x));
            vec![1.0 - p, p]
        } else {
            self.weights.iter().map(|w| sigmoid(dot_bias(w, x))).collect()
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

fn fit_binary(x: &[Vec<f64>], y: &[f64], lr: f64, epochs: usize) -> Vec<f64> {
    let d = x[0].len();
    let n = x.len() as f64;
    let mut w = vec![0.0; d + 1];
    let mut grad = vec![0.0; d + 1];
    for _ in 0..epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (row, &t) in x.iter().zip(y) {
            let err = sigmoid(dot_bias(&w, row)) - t;
            grad[0] += err;
            for j in 0..d {
                grad[j + 1] += err * row[j];
            }
        }
        for (wj, g) in w.iter_mut().zip(&grad) {
            *wj -= lr * g / n;
        }
    }
    w
}

/// Ties resolve to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// One hidden tanh layer with a softmax output, trained by full-batch
/// gradient descent on cross-entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub classes: usize,
    /// hidden × (inputs + 1), bias first.
    pub hidden: Vec<Vec<f64>>,
    /// classes × (hidden + 1), bias first.
    pub output: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn fit(
        x: &[Vec<f64>],
        labels: &[usize],
        classes: usize,
        hidden_units: usize,
        learning_rate: f64,
        epochs: usize,
        seed: u64,
    ) -> Result<Self> {
        if x.is_empty() || x.len() != labels.len() {
            return Err(Error::EmptyDataset);
        }
        if classes < 2 || class_count_of(labels) > classes {
            return Err(Error::InvalidClassCount(classes));
        }
        if hidden_units == 0 {
            return Err(Error::Config("hidden_units must be positive".into()));
        }
        let d = x[0].len();
        let mut rng = seed::rng_for(seed, MLP_TAG, 0);
        let a = 1.0 / ((d + 1) as f64).sqrt();
        let mut hidden: Vec<Vec<f64>> = (0..hidden_units)
            .map(|_| (0..=d).map(|_| rng.random_range(-a..a)).collect())
            .collect();
        let b = 1.0 / ((hidden_units + 1) as f64).sqrt();
        let mut output: Vec<Vec<f64>> = (0..classes)
            .map(|_| (0..=hidden_units).map(|_| rng.random_range(-b..b)).collect())
            .collect();

        let n = x.len() as f64;
        let mut gh = vec![vec![0.0; d + 1]; hidden_units];
        let mut go = vec![vec![0.0; hidden_units + 1]; classes];
        let mut h = vec![0.0; hidden_units];
        let mut p = vec![0.0; classes];
        let mut dh = vec![0.0; hidden_units];
        for _ in 0..epochs {
            gh.iter_mut().flatten().for_each(|g| *g = 0.0);
            go.iter_mut().flatten().for_each(|g| *g = 0.0);
            for (row, &label) in x.iter().zip(labels) {
                forward(&hidden, &output, row, &mut h, &mut p);
                p[label] -= 1.0;
                dh.iter_mut().for_each(|v| *v = 0.0);
                for c in 0..classes {
                    go[c][0] += p[c];
                    for j in 0..hidden_units {
                        go[c][j + 1] += p[c] * h[j];
                        dh[j] += p[c] * output[c][j + 1];
                    }
                }
                for j in 0..hidden_units {
                    let dz = dh[j] * (1.0 - h[j] * h[j]);
                    gh[j][0] += dz;
                    for (g, xi) in gh[j][1..].iter_mut().zip(row) {
                        *g += dz * xi;
                    }
                }
            }
            for (w, g) in hidden.iter_mut().flatten().zip(gh.iter().flatten()) {
                *w -= learning_rate * g / n;
            }
            for (w, g) in output.iter_mut().flatten().zip(go.iter().flatten()) {
                *w -= learning_rate * g / n;
            }
        }
        Ok(Self { classes, hidden, output })
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.hidden.len()];
        let mut p = vec![0.0; self.classes];
        forward(&self.hidden, &self.output, x, &mut h, &mut p);
        p
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

fn forward(hidden: &[Vec<f64>], output: &[Vec<f64>], x: &[f64], h: &mut [f64], p: &mut [f64]) {
    for (hj, w) in h.iter_mut().zip(hidden) {
        *hj = dot_bias(w, x).tanh();
    }
    for (pc, w) in p.iter_mut().zip(output) {
        *pc = dot_bias(w, h);
    }
    let max = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in p.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    p.iter_mut().for_each(|v| *v /= total);
}
