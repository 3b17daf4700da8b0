//! Extremely randomized trees and random forests for single- and
//! multi-target regression.
//!
//! Trees are grown without a depth limit; a node becomes a leaf when it holds
//! fewer than `min_split_samples` rows, when every target is constant on it,
//! or when no candidate split reduces variance. The split score is the
//! variance reduction summed over the targets a tree predicts.
//!
//! Tree `i` of an ensemble uses the seed `path_seed(seed, [i])`; node `j` of
//! that tree draws from the stream `(tree seed, j)` and a bootstrap sample
//! from a dedicated stream, so a model is reproducible bit for bit whatever
//! the number of worker threads.

mod criteria;
mod io;
mod tree;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::featureset::{schema_fingerprint, FeatureMatrix};
use crate::matrix::Matrix;
use crate::rng;

pub use criteria::{gini_impurity, mse, variance_reduction, variance_reduction_multi, CriterionError};
pub use io::{MODEL_MAGIC, MODEL_VERSION};
pub use tree::{GrowParams, Method, Tree, TreeNode};

#[derive(Debug, thiserror::Error)]
pub enum ForestError {
    #[error("training data has no rows")]
    NoRows,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("feature schema mismatch: model {expected}, input {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("model file: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleParams {
    pub n_trees: usize,
    pub min_split_samples: usize,
    pub method: Method,
    /// Candidate features per node; `None` means `ceil(sqrt(p))`.
    pub k_features: Option<usize>,
    /// One ensemble for all targets, or one per target.
    pub multi_target: bool,
    pub seed: u64,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        EnsembleParams { n_trees: 100, min_split_samples: 2, method: Method::Extra, k_features: None, multi_target: true, seed: 0 }
    }
}

impl EnsembleParams {
    pub fn resolved_k(&self, n_features: usize) -> usize {
        self.k_features.unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
    }

    pub fn validate(&self, n_features: usize) -> Result<(), ForestError> {
        let bad = |m: String| Err(ForestError::InvalidParams(m));
        if self.n_trees == 0 {
            return bad("n_trees must be at least 1".into());
        }
        if self.min_split_samples < 2 {
            return bad("min_split_samples must be at least 2".into());
        }
        let k = self.resolved_k(n_features);
        if k == 0 || k > n_features {
            return bad(format!("k_features = {k} outside 1..={n_features}"));
        }
        Ok(())
    }
}

/// Trees that jointly predict a subset of the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub targets: Vec<usize>,
    pub trees: Vec<Tree>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    /// Parameters with `k_features` resolved.
    pub params: EnsembleParams,
    pub feature_names: Vec<String>,
    pub fingerprint: String,
    pub target_names: Vec<String>,
    pub members: Vec<Member>,
}

impl Ensemble {
    pub fn fit(data: &FeatureMatrix, params: &EnsembleParams) -> Result<Ensemble, ForestError> {
        let y = data.y.as_ref().ok_or_else(|| ForestError::Shape("feature matrix has no targets".into()))?;
        Self::fit_arrays(&data.x, y, &data.columns, &data.target_names, params)
    }

    pub fn fit_arrays(x: &Matrix, y: &Matrix, feature_names: &[String], target_names: &[String], params: &EnsembleParams) -> Result<Ensemble, ForestError> {
        if x.rows() == 0 {
            return Err(ForestError::NoRows);
        }
        if y.rows() != x.rows() || y.cols() == 0 {
            return Err(ForestError::Shape(format!("x has {} rows, y is {}x{}", x.rows(), y.rows(), y.cols())));
        }
        if feature_names.len() != x.cols() || target_names.len() != y.cols() {
            return Err(ForestError::Shape("names do not match matrix widths".into()));
        }
        if !x.all_finite() {
            return Err(ForestError::NonFinite("features"));
        }
        if !y.all_finite() {
            return Err(ForestError::NonFinite("targets"));
        }
        params.validate(x.cols())?;
        let mut params = *params;
        params.k_features = Some(params.resolved_k(x.cols()));

        let xcols = x.to_columns();
        let ycols = y.to_columns();
        let groups: Vec<Vec<usize>> = if params.multi_target || y.cols() == 1 {
            vec![(0..y.cols()).collect()]
        } else {
            (0..y.cols()).map(|t| vec![t]).collect()
        };
        let members = groups
            .into_iter()
            .map(|targets| {
                let view = tree::TrainView { x: &xcols, y: targets.iter().map(|&t| ycols[t].as_slice()).collect() };
                let trees = fit_trees(&view, x.rows(), &params, 0..params.n_trees);
                Member { targets, trees }
            })
            .collect();
        Ok(Ensemble {
            params,
            feature_names: feature_names.to_vec(),
            fingerprint: schema_fingerprint(feature_names),
            target_names: target_names.to_vec(),
            members,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_targets(&self) -> usize {
        self.target_names.len()
    }

    pub fn n_trees(&self) -> usize {
        self.params.n_trees
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.members.iter().flat_map(|m| m.trees.iter())
    }

    fn check_row(&self, x: &[f64]) -> Result<(), ForestError> {
        if x.len() != self.n_features() {
            return Err(ForestError::Shape(format!("expected {} features, got {}", self.n_features(), x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ForestError::NonFinite("prediction input"));
        }
        Ok(())
    }

    fn predict_unchecked(&self, x: &[f64], out: &mut [f64]) {
        for m in &self.members {
            let mut acc = vec![0.0; m.targets.len()];
            for t in &m.trees {
                for (a, v) in acc.iter_mut().zip(t.predict(x)) {
                    *a += v;
                }
            }
            for (&j, a) in m.targets.iter().zip(acc) {
                out[j] = a / m.trees.len() as f64;
            }
        }
    }

    /// Mean over trees of the leaf means `x` falls into.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, ForestError> {
        self.check_row(x)?;
        let mut out = vec![0.0; self.n_targets()];
        self.predict_unchecked(x, &mut out);
        Ok(out)
    }

    pub fn predict_matrix(&self, x: &Matrix) -> Result<Matrix, ForestError> {
        if x.cols() != self.n_features() {
            return Err(ForestError::Shape(format!("expected {} features, got {}", self.n_features(), x.cols())));
        }
        if !x.all_finite() {
            return Err(ForestError::NonFinite("prediction input"));
        }
        let t = self.n_targets();
        let mut out = Matrix::zeros(x.rows(), t);
        if t > 0 {
            out.as_mut_slice().par_chunks_mut(t).enumerate().for_each(|(i, row)| self.predict_unchecked(x.row(i), row));
        }
        Ok(out)
    }

    /// Predicts a feature matrix after checking it carries the training schema.
    pub fn predict_features(&self, data: &FeatureMatrix) -> Result<Matrix, ForestError> {
        let found = data.fingerprint();
        if found != self.fingerprint {
            return Err(ForestError::SchemaMismatch { expected: self.fingerprint.clone(), found });
        }
        self.predict_matrix(&data.x)
    }

    /// Predictions of the ensembles made of the first `sizes[k]` trees of
    /// every member, one matrix per size.
    pub fn predict_prefixes(&self, x: &Matrix, sizes: &[usize]) -> Result<Vec<Matrix>, ForestError> {
        if sizes.iter().any(|&s| s == 0 || s > self.n_trees()) {
            return Err(ForestError::InvalidParams(format!("prefix sizes must lie in 1..={}", self.n_trees())));
        }
        if x.cols() != self.n_features() || !x.all_finite() {
            return Err(ForestError::Shape("prediction input does not match the model".into()));
        }
        let t = self.n_targets();
        let rows: Vec<Vec<Vec<f64>>> = (0..x.rows())
            .into_par_iter()
            .map(|i| {
                let xi = x.row(i);
                let mut per_size = vec![vec![0.0; t]; sizes.len()];
                for m in &self.members {
                    let mut acc = vec![0.0; m.targets.len()];
                    for (k, tree) in m.trees.iter().enumerate() {
                        for (a, v) in acc.iter_mut().zip(tree.predict(xi)) {
                            *a += v;
                        }
                        for (s, &size) in sizes.iter().enumerate() {
                            if size == k + 1 {
                                for (&j, a) in m.targets.iter().zip(&acc) {
                                    per_size[s][j] = a / size as f64;
                                }
                            }
                        }
                    }
                }
                per_size
            })
            .collect();
        Ok((0..sizes.len())
            .map(|s| {
                let mut m = Matrix::zeros(x.rows(), t);
                for (i, r) in rows.iter().enumerate() {
                    m.row_mut(i).copy_from_slice(&r[s]);
                }
                m
            })
            .collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        io::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Ensemble, ForestError> {
        io::decode(bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), ForestError> {
        std::fs::write(path, self.to_bytes()).map_err(|source| ForestError::Io { path: path.display().to_string(), source })
    }

    pub fn load(path: &Path) -> Result<Ensemble, ForestError> {
        let bytes = std::fs::read(path).map_err(|source| ForestError::Io { path: path.display().to_string(), source })?;
        Self::from_bytes(&bytes)
    }
}

fn fit_trees(view: &tree::TrainView<'_>, n_rows: usize, params: &EnsembleParams, range: std::ops::Range<usize>) -> Vec<Tree> {
    let grow = GrowParams {
        min_split_samples: params.min_split_samples,
        method: params.method,
        k_features: params.k_features.expect("resolved"),
    };
    range
        .into_par_iter()
        .map(|i| {
            let seed = rng::child_seed(params.seed, i as u64);
            let rows = match params.method {
                Method::Extra => (0..n_rows).collect(),
                Method::Forest => tree::bootstrap_rows(n_rows, seed),
            };
            tree::grow_tree(view, rows, grow, seed)
        })
        .collect()
}

/// Single tree on all rows of `x`, seeded like tree 0 of an ensemble with
/// the same seed (without the bootstrap draw).
pub fn fit_tree(x: &Matrix, y: &Matrix, grow: GrowParams, seed: u64) -> Result<Tree, ForestError> {
    if x.rows() == 0 {
        return Err(ForestError::NoRows);
    }
    if y.rows() != x.rows() || y.cols() == 0 {
        return Err(ForestError::Shape("targets do not align with rows".into()));
    }
    if grow.k_features == 0 || grow.k_features > x.cols() || grow.min_split_samples < 2 {
        return Err(ForestError::InvalidParams("k_features or min_split_samples out of range".into()));
    }
    if !x.all_finite() || !y.all_finite() {
        return Err(ForestError::NonFinite("training data"));
    }
    let xcols = x.to_columns();
    let ycols = y.to_columns();
    let view = tree::TrainView { x: &xcols, y: ycols.iter().map(|c| c.as_slice()).collect() };
    Ok(tree::grow_tree(&view, (0..x.rows()).collect(), grow, rng::child_seed(seed, 0)))
}
