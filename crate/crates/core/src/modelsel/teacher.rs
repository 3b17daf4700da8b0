//! Synthetic feature-level teacher data with known signal.
//!
//! Four latent factors drive the 24 named columns. Four "anchor" columns
//! track one factor each almost exactly; every other column is a noisy
//! proxy of one factor with small cross-loadings. Targets are bounded
//! logistic transforms of nonlinear functions of the anchors plus Gaussian
//! noise whose variance fixes the share of explained variance an oracle
//! attains.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::ModelSelError;
use crate::featureset::{FeatureMatrix, FeatureName, RowKey, N_FEATURES, TARGET_NAMES};
use crate::matrix::Matrix;
use crate::rng;
use crate::tickdata::SynthConfig;

const N_LATENT: usize = 4;

/// Columns that carry the signal, one per latent factor.
pub const ANCHORS: [FeatureName; N_LATENT] =
    [FeatureName::TOTAL_DOLLAR_M, FeatureName::QUOTEDSPREAD_PERCENT_TW, FeatureName::IVOL_Q, FeatureName::HINDEX];

#[derive(Debug, Clone, PartialEq)]
pub struct TeacherConfig {
    pub n_rows: usize,
    pub n_stocks: usize,
    pub seed: u64,
    /// Share of target variance explained by the noise-free signal.
    pub oracle_r2: f64,
    pub anchor_noise: f64,
    pub proxy_noise: f64,
    pub cross_loading: f64,
}

impl Default for TeacherConfig {
    fn default() -> Self {
        TeacherConfig { n_rows: 30_000, n_stocks: 120, seed: 0, oracle_r2: 0.85, anchor_noise: 0.05, proxy_noise: 0.5, cross_loading: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeacherData {
    /// Noisy targets in `y`.
    pub data: FeatureMatrix,
    /// Noise-free targets.
    pub signal: Matrix,
    /// R² of `signal` against the noisy targets, averaged over targets.
    pub oracle_r2: f64,
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Noise-free `(hft_d, hft_s)` as a function of the four anchors.
pub fn teacher_signal(a: [f64; N_LATENT]) -> [f64; 2] {
    let [s, q, v, h] = a;
    let eta_d = 1.5 * (1.5 * s).tanh() + 1.2 * f64::from(q > 0.3) - 0.8 * s * v + 0.6 * h.abs();
    let eta_s = -1.2 * q.tanh() + v.abs() * f64::from(s > 0.0) - 0.7 * f64::from(h > 0.0);
    [0.1 + 0.5 * logistic(eta_d), 0.05 + 0.45 * logistic(eta_s)]
}

fn population_var(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    let m = v.clone().sum::<f64>() / n;
    v.map(|x| (x - m) * (x - m)).sum::<f64>() / n
}

pub fn teacher_dataset(cfg: &TeacherConfig) -> Result<TeacherData, ModelSelError> {
    if cfg.n_rows < 2 || cfg.n_stocks == 0 || !(cfg.oracle_r2 > 0.0 && cfg.oracle_r2 <= 1.0) {
        return Err(ModelSelError::Params("teacher needs n_rows ≥ 2, n_stocks ≥ 1 and oracle_r2 in (0, 1]".into()));
    }
    let mut lr = rng::stream(cfg.seed, &[0]);
    let anchor_idx: Vec<usize> = ANCHORS.iter().map(|f| f.index()).collect();
    let mut primary = [0usize; N_FEATURES];
    let mut loadings = vec![[0.0; N_LATENT]; N_FEATURES];
    let mut next = 0;
    for f in 0..N_FEATURES {
        if let Some(k) = anchor_idx.iter().position(|&a| a == f) {
            primary[f] = k;
            loadings[f][k] = 1.0;
        } else {
            primary[f] = next % N_LATENT;
            next += 1;
            for (k, l) in loadings[f].iter_mut().enumerate() {
                let e: f64 = lr.sample(StandardNormal);
                *l = cfg.cross_loading * e + if k == primary[f] { 1.0 } else { 0.0 };
            }
        }
    }

    let rows: Vec<([f64; N_FEATURES], [f64; 2])> = (0..cfg.n_rows)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[1, i as u64]);
            let z: [f64; N_LATENT] = std::array::from_fn(|_| r.sample(StandardNormal));
            let x: [f64; N_FEATURES] = std::array::from_fn(|f| {
                let noise: f64 = r.sample(StandardNormal);
                let sd = if anchor_idx.contains(&f) { cfg.anchor_noise } else { cfg.proxy_noise };
                loadings[f].iter().zip(&z).map(|(l, z)| l * z).sum::<f64>() + sd * noise
            });
            let anchors = std::array::from_fn(|k| x[anchor_idx[k]]);
            (x, teacher_signal(anchors))
        })
        .collect();

    let mut noise_sd = [0.0; 2];
    for (t, sd) in noise_sd.iter_mut().enumerate() {
        let var = population_var(rows.iter().map(|r| r.1[t]));
        *sd = (var * (1.0 - cfg.oracle_r2) / cfg.oracle_r2).sqrt();
    }
    let mut nr = rng::stream(cfg.seed, &[2]);
    let mut x = Matrix::zeros(cfg.n_rows, N_FEATURES);
    let mut y = Matrix::zeros(cfg.n_rows, 2);
    let mut signal = Matrix::zeros(cfg.n_rows, 2);
    for (i, (xr, f)) in rows.iter().enumerate() {
        x.row_mut(i).copy_from_slice(xr);
        signal.row_mut(i).copy_from_slice(f);
        for t in 0..2 {
            let e: f64 = nr.sample(StandardNormal);
            y.set(i, t, (f[t] + noise_sd[t] * e).clamp(0.0, 1.0));
        }
    }
    let oracle_r2 = super::score::r_squared_multi(&y, &signal)?;

    let dates = SynthConfig { n_days: cfg.n_rows.div_ceil(cfg.n_stocks), ..SynthConfig::default() }.dates();
    let keys = (0..cfg.n_rows).map(|i| RowKey { stock: SynthConfig::stock_symbol(i % cfg.n_stocks), date: dates[i / cfg.n_stocks] }).collect();
    let data = FeatureMatrix::new(keys, FeatureName::column_names(), x, TARGET_NAMES.iter().map(|s| s.to_string()).collect(), Some(y))
        .map_err(|e| ModelSelError::Shape(e.to_string()))?;
    Ok(TeacherData { data, signal, oracle_r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_calibrated() {
        let cfg = TeacherConfig { n_rows: 4000, seed: 3, ..Default::default() };
        let a = teacher_dataset(&cfg).unwrap();
        assert_eq!(a, teacher_dataset(&cfg).unwrap());
        assert!((a.oracle_r2 - 0.85).abs() < 0.02, "{}", a.oracle_r2);
        assert_eq!(a.data.n_features(), 24);
    }
}
