use super::ModelSelError;
use crate::matrix::Matrix;

/// `1 − SS_res/SS_tot` with `SS_tot` taken about the mean of `y_true`.
pub fn r_squared(y_true: &[f64], y_pred: &[f64]) -> Result<f64, ModelSelError> {
    if y_true.len() != y_pred.len() {
        return Err(ModelSelError::Shape(format!("{} targets vs {} predictions", y_true.len(), y_pred.len())));
    }
    if y_true.len() < 2 {
        return Err(ModelSelError::Params("R² needs at least two observations".into()));
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(ModelSelError::ZeroVariance);
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Unweighted average of the per-column R².
pub fn r_squared_multi(y_true: &Matrix, y_pred: &Matrix) -> Result<f64, ModelSelError> {
    if y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols() || y_true.cols() == 0 {
        return Err(ModelSelError::Shape("target and prediction matrices differ in shape".into()));
    }
    let mut total = 0.0;
    for j in 0..y_true.cols() {
        total += r_squared(&y_true.column(j), &y_pred.column(j))?;
    }
    Ok(total / y_true.cols() as f64)
}
