use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::linear::LinearModel;
use super::scaling::ScalerState;
use super::score::r_squared_multi;
use super::ModelSelError;
use crate::featureset::FeatureMatrix;
use crate::forest::{Ensemble, EnsembleParams};
use crate::matrix::Matrix;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvSettings {
    pub n_iter: usize,
    /// Rows drawn without replacement in every iteration.
    pub sample_size: usize,
    pub test_fraction: f64,
    pub seed: u64,
    /// z-score features with statistics of the training rows.
    pub scale: bool,
}

impl Default for CvSettings {
    fn default() -> Self {
        CvSettings { n_iter: 10, sample_size: 10_000, test_fraction: 0.25, seed: 0, scale: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub label: String,
    pub scores: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of the scores (0 for one iteration).
    pub std: f64,
    pub params: Option<EnsembleParams>,
    pub n_iterations: usize,
    pub sample_size: usize,
    pub test_fraction: f64,
    pub seed: u64,
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

impl CvReport {
    pub fn from_scores(label: &str, scores: Vec<f64>, params: Option<EnsembleParams>, s: &CvSettings) -> CvReport {
        let (mean, std) = mean_std(&scores);
        CvReport {
            label: label.to_string(),
            n_iterations: scores.len(),
            scores,
            mean,
            std,
            params,
            sample_size: s.sample_size,
            test_fraction: s.test_fraction,
            seed: s.seed,
        }
    }
}

/// Train/test index sets of every iteration. Iteration `i` samples from the
/// stream `(seed, i)`; the first `round(test_fraction · sample_size)` drawn
/// rows form the test set.
pub fn cv_splits(n_rows: usize, s: &CvSettings) -> Result<Vec<Split>, ModelSelError> {
    if s.n_iter == 0 {
        return Err(ModelSelError::Params("n_iter must be at least 1".into()));
    }
    if !(s.test_fraction > 0.0 && s.test_fraction < 1.0) {
        return Err(ModelSelError::Params(format!("test_fraction {} outside (0, 1)", s.test_fraction)));
    }
    if s.sample_size > n_rows {
        return Err(ModelSelError::Params(format!("sample_size {} exceeds {} rows", s.sample_size, n_rows)));
    }
    let n_test = (s.test_fraction * s.sample_size as f64).round() as usize;
    if n_test < 2 || s.sample_size - n_test < 2 {
        return Err(ModelSelError::Params(format!("sample of {} rows is too small to split", s.sample_size)));
    }
    Ok((0..s.n_iter)
        .map(|i| {
            let mut r = rng::stream(s.seed, &[i as u64]);
            let drawn = index::sample(&mut r, n_rows, s.sample_size).into_vec();
            Split { test: drawn[..n_test].to_vec(), train: drawn[n_test..].to_vec() }
        })
        .collect())
}

/// Training and test design matrices of one split, scaled when requested.
pub(crate) fn split_design(data: &FeatureMatrix, split: &Split, scale: bool) -> Result<(Matrix, Matrix, Matrix, Matrix), ModelSelError> {
    let y = data.targets().map_err(|_| ModelSelError::NoTargets)?;
    let mut xtr = data.x.select_rows(&split.train);
    let mut xte = data.x.select_rows(&split.test);
    if scale {
        let s = ScalerState::fit(&xtr)?;
        xtr = s.transform(&xtr)?;
        xte = s.transform(&xte)?;
    }
    Ok((xtr, y.select_rows(&split.train), xte, y.select_rows(&split.test)))
}

/// Model seed used in iteration `iter`.
pub fn iteration_seed(model_seed: u64, iter: usize) -> u64 {
    rng::child_seed(model_seed, iter as u64)
}

/// Runs `fit_predict(train_x, train_y, test_x, iter)` over the splits and
/// scores each test set.
pub fn cross_validate<F>(data: &FeatureMatrix, splits: &[Split], scale: bool, mut fit_predict: F) -> Result<Vec<f64>, ModelSelError>
where
    F: FnMut(&Matrix, &Matrix, &Matrix, usize) -> Result<Matrix, ModelSelError>,
{
    splits
        .iter()
        .enumerate()
        .map(|(i, split)| {
            let (xtr, ytr, xte, yte) = split_design(data, split, scale)?;
            let pred = fit_predict(&xtr, &ytr, &xte, i)?;
            r_squared_multi(&yte, &pred)
        })
        .collect()
}

fn fit_ensemble(data: &FeatureMatrix, x: &Matrix, y: &Matrix, params: &EnsembleParams) -> Result<Ensemble, ModelSelError> {
    Ok(Ensemble::fit_arrays(x, y, &data.columns, &data.target_names, params)?)
}

/// Repeated random sub-sampling validation of a tree ensemble.
pub fn monte_carlo_cv(data: &FeatureMatrix, params: &EnsembleParams, s: &CvSettings) -> Result<CvReport, ModelSelError> {
    let splits = cv_splits(data.n_rows(), s)?;
    let scores = cross_validate(data, &splits, s.scale, |xtr, ytr, xte, i| {
        let p = EnsembleParams { seed: iteration_seed(params.seed, i), ..*params };
        Ok(fit_ensemble(data, xtr, ytr, &p)?.predict_matrix(xte)?)
    })?;
    Ok(CvReport::from_scores("ensemble", scores, Some(*params), s))
}

/// The same protocol for a linear least-squares baseline.
pub fn linear_cv(data: &FeatureMatrix, s: &CvSettings) -> Result<CvReport, ModelSelError> {
    let splits = cv_splits(data.n_rows(), s)?;
    let scores = cross_validate(data, &splits, s.scale, |xtr, ytr, xte, _| Ok(LinearModel::fit(xtr, ytr)?.predict(xte)))?;
    Ok(CvReport::from_scores("OLS", scores, None, s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub rank: usize,
    pub min_split: usize,
    pub n_trees: usize,
    pub report: CvReport,
}

/// Every `(min_split, n_trees)` pair, ranked by descending mean R²; ties go
/// to fewer trees, then to the larger `min_split`.
///
/// For each `min_split` and iteration a single ensemble with the largest
/// tree count is trained and its prefixes are scored; tree `i` depends only
/// on `(seed, i)`, so a prefix is exactly the smaller ensemble.
pub fn grid_search(data: &FeatureMatrix, split_values: &[usize], tree_values: &[usize], base: &EnsembleParams, s: &CvSettings) -> Result<Vec<GridCell>, ModelSelError> {
    if split_values.is_empty() || tree_values.is_empty() {
        return Err(ModelSelError::Params("grid axes must be non-empty".into()));
    }
    let max_trees = *tree_values.iter().max().expect("non-empty");
    let splits = cv_splits(data.n_rows(), s)?;
    let mut cells = Vec::new();
    for &min_split in split_values {
        let params = EnsembleParams { min_split_samples: min_split, n_trees: max_trees, ..*base };
        let mut scores = vec![Vec::with_capacity(splits.len()); tree_values.len()];
        for (i, split) in splits.iter().enumerate() {
            let (xtr, ytr, xte, yte) = split_design(data, split, s.scale)?;
            let p = EnsembleParams { seed: iteration_seed(base.seed, i), ..params };
            let e = fit_ensemble(data, &xtr, &ytr, &p)?;
            for (k, pred) in e.predict_prefixes(&xte, tree_values)?.iter().enumerate() {
                scores[k].push(r_squared_multi(&yte, pred)?);
            }
            log::debug!("grid min_split={min_split} iteration {i} done");
        }
        for (&n_trees, sc) in tree_values.iter().zip(scores) {
            let p = EnsembleParams { n_trees, ..params };
            cells.push(GridCell { rank: 0, min_split, n_trees, report: CvReport::from_scores("grid", sc, Some(p), s) });
        }
    }
    cells.sort_by(|a, b| {
        b.report.mean.total_cmp(&a.report.mean).then(a.n_trees.cmp(&b.n_trees)).then(b.min_split.cmp(&a.min_split))
    });
    for (r, c) in cells.iter_mut().enumerate() {
        c.rank = r + 1;
    }
    Ok(cells)
}

/// Labels of the compared setups, in output order.
pub const COMPARED_METHODS: [&str; 4] = ["RF-MM", "RF", "ET-MM", "ET"];

/// Random forest and extra trees, each as one model per target ("-MM") and
/// as one multi-target model, scored on shared splits.
pub fn compare_methods(data: &FeatureMatrix, base: &EnsembleParams, s: &CvSettings) -> Result<Vec<CvReport>, ModelSelError> {
    use crate::forest::Method;
    let setups = [(Method::Forest, false), (Method::Forest, true), (Method::Extra, false), (Method::Extra, true)];
    let splits = cv_splits(data.n_rows(), s)?;
    COMPARED_METHODS
        .iter()
        .zip(setups)
        .map(|(label, (method, multi_target))| {
            let params = EnsembleParams { method, multi_target, ..*base };
            let scores = cross_validate(data, &splits, s.scale, |xtr, ytr, xte, i| {
                let p = EnsembleParams { seed: iteration_seed(params.seed, i), ..params };
                Ok(fit_ensemble(data, xtr, ytr, &p)?.predict_matrix(xte)?)
            })?;
            Ok(CvReport::from_scores(label, scores, Some(params), s))
        })
        .collect()
}
