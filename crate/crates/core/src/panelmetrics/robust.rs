use serde::Serialize;

use super::PanelError;

/// Order statistic at position `round(q · (n − 1))` of an already sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

fn sorted_copy(v: &[f64]) -> Result<Vec<f64>, PanelError> {
    if v.is_empty() {
        return Err(PanelError::Empty);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(PanelError::NonFinite);
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Clamps to the `p` and `1 − p` order statistics.
pub fn winsorize(v: &[f64], p: f64) -> Result<Vec<f64>, PanelError> {
    if !(0.0..0.5).contains(&p) {
        return Err(PanelError::Spec(format!("winsorization level {p} outside [0, 0.5)")));
    }
    let s = sorted_copy(v)?;
    let lo = quantile_sorted(&s, p);
    let hi = quantile_sorted(&s, 1.0 - p);
    Ok(v.iter().map(|x| x.clamp(lo, hi)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single observation.
    pub std: f64,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

pub fn summary_stats(v: &[f64]) -> Result<SummaryStats, PanelError> {
    let s = sorted_copy(v)?;
    let n = s.len();
    let mean = s.iter().sum::<f64>() / n as f64;
    let std = if n > 1 { (s.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt() } else { 0.0 };
    Ok(SummaryStats {
        n,
        mean,
        std,
        min: s[0],
        p25: quantile_sorted(&s, 0.25),
        p50: quantile_sorted(&s, 0.5),
        p75: quantile_sorted(&s, 0.75),
        max: s[n - 1],
    })
}
