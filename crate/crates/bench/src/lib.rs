//! Shared fixtures for the benchmarks.

use hftml_core::modelsel::teacher::{teacher_dataset, TeacherConfig};
use hftml_core::tickdata::{synth_market, SynthConfig};
use hftml_core::{FeatureMatrix, TickSeries};

/// Synthetic stock-days with the default generator settings.
pub fn tick_days(n_stocks: usize, n_days: usize, seed: u64) -> Vec<TickSeries> {
    synth_market(&SynthConfig { n_stocks, n_days, seed, ..SynthConfig::default() })
        .expect("valid synth config")
        .into_iter()
        .map(|d| d.series)
        .collect()
}

/// Feature-level teacher rows for model fitting.
pub fn teacher_rows(n_rows: usize, seed: u64) -> FeatureMatrix {
    teacher_dataset(&TeacherConfig { n_rows, seed, ..TeacherConfig::default() }).expect("teacher data").data
}

pub fn tick_count(days: &[TickSeries]) -> u64 {
    days.iter().map(|d| d.tick_count() as u64).sum()
}
