//! Split criteria.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CriterionError {
    #[error("probabilities must be non-negative and sum to 1 (sum = {0})")]
    NotADistribution(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("both children of a split must be non-empty")]
    EmptyChild,
}

/// `1 − Σ p_i²`.
pub fn gini_impurity(p: &[f64]) -> Result<f64, CriterionError> {
    let sum: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&q| !(q >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(CriterionError::NotADistribution(sum));
    }
    Ok(1.0 - p.iter().map(|q| q * q).sum::<f64>())
}

/// Mean squared error.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64, CriterionError> {
    if y_true.len() != y_pred.len() {
        return Err(CriterionError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(CriterionError::Empty);
    }
    Ok(y_true.iter().zip(y_pred).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y_true.len() as f64)
}

fn population_variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// `Var(parent) − [n_L·Var(L) + n_R·Var(R)]/n` for one target column.
pub fn variance_reduction(left: &[f64], right: &[f64]) -> Result<f64, CriterionError> {
    if left.is_empty() || right.is_empty() {
        return Err(CriterionError::EmptyChild);
    }
    let n = (left.len() + right.len()) as f64;
    let parent: Vec<f64> = left.iter().chain(right).copied().collect();
    Ok(population_variance(&parent)
        - (left.len() as f64 * population_variance(left) + right.len() as f64 * population_variance(right)) / n)
}

/// Sum of per-target reductions; each child is a list of target vectors.
pub fn variance_reduction_multi(left: &[&[f64]], right: &[&[f64]]) -> Result<f64, CriterionError> {
    let (Some(l0), Some(r0)) = (left.first(), right.first()) else {
        return Err(CriterionError::EmptyChild);
    };
    let t = l0.len();
    if left.iter().chain(right).any(|r| r.len() != t) || r0.len() != t {
        return Err(CriterionError::LengthMismatch(t, r0.len()));
    }
    let mut total = 0.0;
    for j in 0..t {
        let l: Vec<f64> = left.iter().map(|r| r[j]).collect();
        let r: Vec<f64> = right.iter().map(|r| r[j]).collect();
        total += variance_reduction(&l, &r)?;
    }
    Ok(total)
}
