//! Scaling, R² scoring, Monte Carlo cross-validation, grid search over
//! `(min_split_samples, n_trees)` and the RF/ET comparison.
//!
//! Iterations run one after another; training parallelizes over trees and
//! prediction over rows, which keeps one ensemble in memory at a time.

mod cv;
mod linear;
mod report;
mod scaling;
mod score;
pub mod teacher;

pub use cv::{
    compare_methods, cross_validate, cv_splits, grid_search, iteration_seed, linear_cv, mean_std, monte_carlo_cv, CvReport, CvSettings,
    GridCell, Split, COMPARED_METHODS,
};
pub use linear::LinearModel;
pub use report::{write_comparison_csv, write_cv_csv, write_grid_csv, write_summary_csv};
pub use scaling::{zscore_fit_apply, ScalerState};
pub use score::{r_squared, r_squared_multi};

use crate::forest::ForestError;

/// Grid values used on both axes by default.
pub const DEFAULT_GRID: [usize; 8] = [5, 10, 20, 40, 80, 160, 320, 640];

#[derive(Debug, thiserror::Error)]
pub enum ModelSelError {
    #[error("invalid settings: {0}")]
    Params(String),
    #[error("target has zero variance; R² is undefined")]
    ZeroVariance,
    #[error("non-finite input")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("data has no target columns")]
    NoTargets,
    #[error(transparent)]
    Forest(#[from] ForestError),
}
