use serde::{Deserialize, Serialize};

use super::ModelSelError;
use crate::matrix::Matrix;

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerState {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ScalerState {
    pub fn fit(x: &Matrix) -> Result<ScalerState, ModelSelError> {
        if x.rows() == 0 {
            return Err(ModelSelError::Params("cannot scale an empty matrix".into()));
        }
        if !x.all_finite() {
            return Err(ModelSelError::NonFinite);
        }
        let n = x.rows() as f64;
        let mut mean = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(ScalerState { mean, std })
    }

    /// Columns with zero spread; they scale to all zeros.
    pub fn zero_variance(&self) -> Vec<bool> {
        self.std.iter().map(|&s| s == 0.0).collect()
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix, ModelSelError> {
        if x.cols() != self.mean.len() {
            return Err(ModelSelError::Shape(format!("scaler fitted on {} columns, got {}", self.mean.len(), x.cols())));
        }
        if !x.all_finite() {
            return Err(ModelSelError::NonFinite);
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.std) {
                *v = if *s == 0.0 { 0.0 } else { (*v - m) / s };
            }
        }
        Ok(out)
    }
}

/// Standardizes every column of `x` with its own statistics.
pub fn zscore_fit_apply(x: &Matrix) -> Result<(Matrix, ScalerState), ModelSelError> {
    let state = ScalerState::fit(x)?;
    Ok((state.transform(x)?, state))
}
