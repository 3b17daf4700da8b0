//! Measuring liquidity-demanding and liquidity-supplying HFT activity from
//! public tick data.
//!
//! The crate is organised along the pipeline:
//!
//! * [`tickdata`] – trade/quote records, the tick CSV schema, a synthetic
//!   labeled-market generator and the HFT volume-fraction targets.
//! * [`featureset`] – the 24 daily microstructure features and the feature
//!   matrix.
//! * [`forest`] – extremely randomized trees and random forests with
//!   single- and multi-target regression.
//! * [`modelsel`] – scaling, R², Monte Carlo cross-validation, grid search and
//!   method comparison.
//! * [`interpret`] – impurity importance and partial dependence.
//! * [`latarb`] – stale-quote latency-arbitrage detection.
//! * [`panelmetrics`] – winsorization, summary statistics, two-way fixed
//!   effects with double-clustered errors, DiD, 2SLS, market-model abnormal
//!   returns, the JUMP ratio and event studies.

pub mod featureset;
pub mod forest;
pub mod interpret;
pub mod latarb;
pub mod matrix;
pub mod modelsel;
pub mod panelmetrics;
pub mod rng;
pub mod tickdata;

pub use featureset::{FeatureMatrix, FeatureName, StockDayFeatures};
pub use forest::{Ensemble, EnsembleParams, Method};
pub use matrix::Matrix;
pub use tickdata::{Price, Quote, Session, TargetPair, TickSeries, Trade};
