use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::models::argmax;

/// Kernel ridge regression onto centred one-hot class targets.
#[derive(Debug, Clone)]
pub struct KernelRidge {
    pub classes: usize,
    /// train × classes dual coefficients.
    pub coefficients: DMatrix<f64>,
}

impl KernelRidge {
    /// Solves `(K + alpha I) C = Y` where `Y[i][c] = [y_i = c] - 1/classes`.
    pub fn fit(k_train: &DMatrix<f64>, labels: &[usize], classes: usize, alpha: f64) -> Result<Self> {
        let n = labels.len();
        if k_train.nrows() != n || k_train.ncols() != n {
            return Err(Error::Config(format!(
                "kernel is {}x{}, expected {n}x{n}",
                k_train.nrows(),
                k_train.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if classes < 2 {
            return Err(Error::InvalidClassCount(classes));
        }
        if !(alpha >= 0.0) {
            return Err(Error::Config(format!("ridge alpha must be non-negative, got {alpha}")));
        }
        let offset = 1.0 / classes as f64;
        let y = DMatrix::from_fn(n, classes, |i, c| f64::from(u8::from(labels[i] == c)) - offset);
        let system = k_train + DMatrix::identity(n, n) * alpha;
        let chol = system
            .cholesky()
            .ok_or_else(|| Error::Singular(format!("kernel system with alpha = {alpha}")))?;
        Ok(Self {
            classes,
            coefficients: chol.solve(&y),
        })
    }

    /// Scores for each row of the test × train cross kernel.
    pub fn scores(&self, k_cross: &DMatrix<f64>) -> DMatrix<f64> {
        k_cross * &self.coefficients
    }

    pub fn predict(&self, k_cross: &DMatrix<f64>) -> Vec<usize> {
        let s = self.scores(k_cross);
        s.row_iter()
            .map(|r| argmax(&r.iter().copied().collect::<Vec<_>>()))
            .collect()
    }
}

/// Rows `rows` and columns `cols` of `k`.
pub fn submatrix(k: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| k[(rows[i], cols[j])])
}
