//! Panel econometrics: winsorization and summary statistics, OLS with
//! absorbed two-way fixed effects and double-clustered errors,
//! difference-in-differences, 2SLS, market-model abnormal returns, the JUMP
//! ratio and event-window tests.

mod did;
pub mod events;
mod io;
mod iv;
mod panel;
mod robust;

pub use did::{did_estimate, DidRow, DID_TERM};
pub use events::{
    abnormal_returns, car, event_study, jump_ratio, log_price_instrument, winsorize_jumps, AbnormalReturns, DropTally, EventObs, EventStudy,
    JumpRecord, PathPoint,
};
pub use io::{event_position, read_daily_csv, read_events_csv, read_panel_csv, DailySeries, EventRecord};
pub use iv::{two_sls, IvResult, WEAK_INSTRUMENT_R2};
pub use panel::{demean_columns, panel_ols, FitResult, PanelRow, PanelSpec, DEMEAN_TOL};
pub use robust::{quantile_sorted, summary_stats, winsorize, SummaryStats};

#[derive(Debug, thiserror::Error)]
pub enum PanelError {
    #[error("empty input")]
    Empty,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("{0}")]
    Spec(String),
    #[error("regressors are collinear after absorbing fixed effects")]
    Collinear,
    #[error("fixed-effect demeaning did not converge")]
    NoConvergence,
    #[error("weak or invalid instrument (partial R² = {0:e})")]
    WeakInstrument(f64),
    #[error("need at least {needed} observations, found {found}")]
    InsufficientObservations { needed: usize, found: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("abnormal return missing on relative day {0}")]
    MissingDay(i64),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_panel(f: impl Fn(usize, usize) -> (f64, Vec<f64>), ne: usize, nt: usize) -> Vec<PanelRow> {
        let mut rows = Vec::new();
        for e in 0..ne {
            for t in 0..nt {
                let (y, x) = f(e, t);
                rows.push(PanelRow::new(format!("e{e}"), format!("t{t}"), y, x));
            }
        }
        rows
    }

    #[test]
    fn pooled_exact_line() {
        let rows: Vec<PanelRow> = (0..6).map(|i| PanelRow::new(format!("e{i}"), format!("t{i}"), 2.0 * i as f64, vec![i as f64])).collect();
        let r = panel_ols(&rows, &["x".into()], &PanelSpec::POOLED).unwrap();
        assert!((r.coef[0] - 2.0).abs() < 1e-12 && r.coef[1].abs() < 1e-12);
        assert!(r.se[0] < 1e-10);
    }

    #[test]
    fn fixed_effects_are_absorbed() {
        let rows = grid_panel(|e, t| {
            let x = ((e * 7 + t * 3) % 5) as f64 + 0.1 * (e * t) as f64;
            (x * 1.5 + e as f64 * 2.0 - t as f64, vec![x])
        }, 5, 6);
        let r = panel_ols(&rows, &["x".into()], &PanelSpec::TWO_WAY).unwrap();
        assert!((r.coef[0] - 1.5).abs() < 1e-10);
        assert_eq!(r.n_clusters_entity, Some(5));
    }

    #[test]
    fn collinear_and_single_cluster_errors() {
        let rows = grid_panel(|e, t| ((e + t) as f64, vec![e as f64, 2.0 * e as f64 + t as f64]), 3, 3);
        assert!(matches!(panel_ols(&rows, &["a".into(), "b".into()], &PanelSpec::TWO_WAY), Err(PanelError::Collinear)));
        let one: Vec<PanelRow> = (0..5).map(|i| PanelRow::new("e", format!("t{i}"), i as f64, vec![(i * i) as f64])).collect();
        let spec = PanelSpec { entity_fe: false, cluster_entity: true, ..PanelSpec::POOLED };
        assert!(panel_ols(&one, &["x".into()], &spec).is_err());
    }

    #[test]
    fn did_exact_recovery() {
        let rows: Vec<DidRow> = (0..6)
            .flat_map(|e| {
                (0..8).map(move |t| {
                    let (treated, post) = (e < 3, t >= 4);
                    let y = 0.3 + 0.01 * e as f64 - 0.002 * t as f64 + if treated && post { -0.008 } else { 0.0 };
                    DidRow { entity: format!("e{e}"), time: format!("t{t}"), y, treated, post, controls: vec![] }
                })
            })
            .collect();
        let r = did_estimate(&rows, &[]).unwrap();
        assert!((r.coef[0] + 0.008).abs() < 1e-10, "{}", r.coef[0]);
        let none: Vec<DidRow> = rows.iter().cloned().map(|r| DidRow { treated: false, ..r }).collect();
        assert!(did_estimate(&none, &[]).is_err());
    }

    #[test]
    fn iv_identity_and_weak() {
        let rows: Vec<PanelRow> = (0..40)
            .map(|i| {
                let x = ((i * 13) % 17) as f64;
                let c = ((i * 5) % 7) as f64;
                PanelRow::new(format!("e{}", i % 8), format!("t{}", i / 8), 0.7 * x - 0.2 * c + ((i * 3) % 11) as f64 * 0.01, vec![x, c, x])
            })
            .collect();
        let names: Vec<String> = ["x", "c", "z"].map(String::from).to_vec();
        let iv = two_sls(&rows, &names, "x", "z", &PanelSpec::POOLED).unwrap();
        let ols = panel_ols(&rows.iter().map(|r| PanelRow { x: r.x[..2].to_vec(), ..r.clone() }).collect::<Vec<_>>(), &names[..2], &PanelSpec::POOLED).unwrap();
        for (a, b) in iv.second_stage.coef.iter().zip(&ols.coef) {
            assert!((a - b).abs() < 1e-8);
        }
        let weak: Vec<PanelRow> = rows.iter().map(|r| PanelRow { x: vec![r.x[0], r.x[1], 0.0], ..r.clone() }).collect();
        assert!(matches!(two_sls(&weak, &names, "x", "z", &PanelSpec::POOLED), Err(PanelError::WeakInstrument(_))));
    }
}
