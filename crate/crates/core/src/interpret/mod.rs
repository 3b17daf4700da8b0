//! Impurity-based feature importance and partial dependence.

use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::forest::{Ensemble, ForestError, Tree, TreeNode};
use crate::matrix::Matrix;
use crate::rng;

#[derive(Debug, thiserror::Error)]
pub enum InterpretError {
    #[error("data has no rows")]
    EmptyData,
    #[error("feature index {0} outside the model schema")]
    FeatureOutOfRange(usize),
    #[error("data has {found} columns, model expects {expected}")]
    Shape { expected: usize, found: usize },
    #[error(transparent)]
    Forest(#[from] ForestError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceReport {
    pub features: Vec<String>,
    pub mean: Vec<f64>,
    /// Population standard deviation across the trees that were averaged.
    pub std: Vec<f64>,
    /// Trees with at least one split; only these are averaged.
    pub n_trees_used: usize,
    /// Set when no tree has a split; `mean` and `std` are then zero.
    pub degenerate: bool,
}

/// Per-feature share of the weighted variance reduction of one tree, or
/// `None` for a single-leaf tree.
pub fn tree_importance(tree: &Tree, n_features: usize) -> Option<Vec<f64>> {
    let n_root = tree.nodes()[0].n_samples() as f64;
    let mut imp = vec![0.0; n_features];
    for node in tree.nodes() {
        if let TreeNode::Internal { feature, n_samples, gain, .. } = *node {
            imp[feature] += n_samples as f64 / n_root * gain;
        }
    }
    let total: f64 = imp.iter().sum();
    (total > 0.0).then(|| imp.into_iter().map(|v| v / total).collect())
}

/// Normalizes per tree, then averages over trees.
pub fn feature_importance(e: &Ensemble) -> ImportanceReport {
    let p = e.n_features();
    let per_tree: Vec<Vec<f64>> = e.trees().filter_map(|t| tree_importance(t, p)).collect();
    let n = per_tree.len();
    let mut mean = vec![0.0; p];
    let mut std = vec![0.0; p];
    if n > 0 {
        for imp in &per_tree {
            for (m, v) in mean.iter_mut().zip(imp) {
                *m += v / n as f64;
            }
        }
        for imp in &per_tree {
            for ((s, v), m) in std.iter_mut().zip(imp).zip(&mean) {
                *s += (v - m) * (v - m) / n as f64;
            }
        }
        std.iter_mut().for_each(|s| *s = s.sqrt());
    }
    ImportanceReport { features: e.feature_names.clone(), mean, std, n_trees_used: n, degenerate: n == 0 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdpCurve {
    pub feature: String,
    pub grid: Vec<f64>,
    /// `response[k][t]`: mean prediction of target `t` at `grid[k]`.
    pub response: Vec<Vec<f64>>,
    /// The feature takes a single value in the data; the curve has one point.
    pub constant_feature: bool,
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Average response over the rows of `data` with column `feature` set to
/// each grid value. `sample = Some((m, seed))` marginalizes over `m` rows
/// drawn without replacement instead of all rows.
pub fn partial_dependence(e: &Ensemble, data: &Matrix, feature: usize, n_grid: usize, sample: Option<(usize, u64)>) -> Result<PdpCurve, InterpretError> {
    if data.rows() == 0 {
        return Err(InterpretError::EmptyData);
    }
    if data.cols() != e.n_features() {
        return Err(InterpretError::Shape { expected: e.n_features(), found: data.cols() });
    }
    if feature >= e.n_features() {
        return Err(InterpretError::FeatureOutOfRange(feature));
    }
    let col = data.column(feature);
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let constant_feature = lo == hi;
    let grid = if constant_feature { vec![lo] } else { linspace(lo, hi, n_grid.max(1)) };
    let rows = match sample {
        Some((m, seed)) if m < data.rows() => {
            let mut r = rng::stream(seed, &[feature as u64]);
            data.select_rows(&index::sample(&mut r, data.rows(), m).into_vec())
        }
        _ => data.clone(),
    };
    let base: Vec<f64> = rows.as_slice().to_vec();
    let response = grid
        .par_iter()
        .map(|&v| {
            let mut x = Matrix::from_row_major(rows.rows(), rows.cols(), base.clone());
            for i in 0..x.rows() {
                x.row_mut(i)[feature] = v;
            }
            let pred = e.predict_matrix(&x)?;
            let t = pred.cols();
            let mut mean = vec![0.0; t];
            for row in pred.iter_rows() {
                for (m, p) in mean.iter_mut().zip(row) {
                    *m += p;
                }
            }
            Ok(mean.into_iter().map(|m| m / pred.rows() as f64).collect())
        })
        .collect::<Result<Vec<Vec<f64>>, ForestError>>()?;
    Ok(PdpCurve { feature: e.feature_names[feature].clone(), grid, response, constant_feature })
}

/// `feature,mean,std`.
pub fn write_importance_csv<W: Write>(w: W, r: &ImportanceReport) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["feature", "mean", "std"])?;
    for ((f, m), s) in r.features.iter().zip(&r.mean).zip(&r.std) {
        wtr.write_record([f.clone(), m.to_string(), s.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `feature,grid_value,response_<target>...`.
pub fn write_pdp_csv<W: Write>(w: W, curves: &[PdpCurve], target_names: &[String]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["feature".to_string(), "grid_value".to_string()];
    header.extend(target_names.iter().map(|t| format!("response_{t}")));
    wtr.write_record(&header)?;
    for c in curves {
        for (v, resp) in c.grid.iter().zip(&c.response) {
            let mut rec = vec![c.feature.clone(), v.to_string()];
            rec.extend(resp.iter().map(|r| r.to_string()));
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{EnsembleParams, Method};

    fn fit(x: &Matrix, y: &Matrix, n_trees: usize, method: Method) -> Ensemble {
        let names: Vec<String> = (0..x.cols()).map(|i| format!("f{i}")).collect();
        let tn: Vec<String> = (0..y.cols()).map(|i| format!("t{i}")).collect();
        Ensemble::fit_arrays(x, y, &names, &tn, &EnsembleParams { n_trees, method, k_features: Some(x.cols()), seed: 1, ..Default::default() }).unwrap()
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 3.0, 5), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(linspace(1.0, 3.0, 1), vec![1.0]);
    }

    #[test]
    fn degenerate_importance() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 2.0], [2.0, 0.5]]);
        let y = Matrix::column_vector(vec![0.4; 3]);
        let r = feature_importance(&fit(&x, &y, 3, Method::Extra));
        assert!(r.degenerate);
        assert_eq!(r.mean, vec![0.0, 0.0]);
    }

    #[test]
    fn importance_and_pdp_on_step() {
        let n = 200;
        let mut r = rng::stream(5, &[]);
        let x = Matrix::from_row_major(n, 3, (0..3 * n).map(|_| rand::Rng::random_range(&mut r, 0.0..211.0)).collect());
        let y = Matrix::column_vector((0..n).map(|i| if x.get(i, 1) > 100.0 { 1.0 } else { 0.0 }).collect());
        let r = feature_importance(&fit(&x, &y, 20, Method::Extra));
        assert!((r.mean.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.mean[1] > 0.9);
        let e = fit(&x, &y, 20, Method::Forest);
        let c = partial_dependence(&e, &x, 0, 7, None).unwrap();
        assert_eq!(c.grid.len(), 7);
        let flat: Vec<f64> = c.response.iter().map(|r| r[0]).collect();
        let range = flat.iter().cloned().fold(f64::MIN, f64::max) - flat.iter().cloned().fold(f64::MAX, f64::min);
        assert!(range < 1e-9);
        let mut consts = x.clone();
        for i in 0..n {
            consts.set(i, 2, 4.0);
        }
        let c = partial_dependence(&e, &consts, 2, 7, None).unwrap();
        assert!(c.constant_feature && c.grid == vec![4.0]);
        assert!(partial_dependence(&e, &x, 3, 7, None).is_err());
    }
}
