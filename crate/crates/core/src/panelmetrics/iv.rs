use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::panel::{assemble, bread, build_design, covariance, panel_ols, FitResult, PanelRow, PanelSpec};
use super::PanelError;

/// Partial R² below which an instrument counts as irrelevant.
pub const WEAK_INSTRUMENT_R2: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvResult {
    pub first_stage: FitResult,
    pub second_stage: FitResult,
}

fn residualize(v: &DVector<f64>, w: &DMatrix<f64>) -> DVector<f64> {
    if w.ncols() == 0 {
        return v.clone();
    }
    let svd = w.clone().svd(true, true);
    let coef = svd.solve(v, 1e-12).expect("svd with vectors");
    v - w * coef
}

/// Just-identified 2SLS: `endog` is instrumented by `instrument`; every
/// other named column is an exogenous control. `rows[i].x` holds all named
/// columns, the instrument included. An instrument equal to `endog`
/// reproduces OLS.
pub fn two_sls(rows: &[PanelRow], names: &[String], endog: &str, instrument: &str, spec: &PanelSpec) -> Result<IvResult, PanelError> {
    let find = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| PanelError::Spec(format!("no column named {s}")));
    let (ie, iz) = (find(endog)?, find(instrument)?);
    let d = build_design(rows, names, spec)?;
    let n = d.x.nrows();
    let controls: Vec<usize> = (0..d.x.ncols()).filter(|&j| j != ie && j != iz).collect();
    let w = d.x.select_columns(&controls);
    let xe = d.x.column(ie).into_owned();
    let z = d.x.column(iz).into_owned();

    let rz = residualize(&z, &w);
    let rx = residualize(&xe, &w);
    let (zz, xx) = (rz.norm_squared(), rx.norm_squared());
    let partial_r2 = if zz > 0.0 && xx > 0.0 { rz.dot(&rx).powi(2) / (zz * xx) } else { 0.0 };
    if zz <= 1e-24 * z.norm_squared().max(f64::MIN_POSITIVE) || partial_r2 < WEAK_INSTRUMENT_R2 {
        return Err(PanelError::WeakInstrument(partial_r2));
    }
    let k1 = controls.len() + 1;
    let rss_u = xx * (1.0 - partial_r2);
    let partial_f = if rss_u > 0.0 { (xx - rss_u) / (rss_u / (n - k1) as f64) } else { f64::INFINITY };

    let first_names: Vec<String> = std::iter::once(instrument.to_string())
        .chain(names.iter().enumerate().filter(|(j, _)| *j != ie && *j != iz).map(|(_, s)| s.clone()))
        .collect();
    let first_rows: Vec<PanelRow> = rows
        .iter()
        .map(|r| {
            let x = std::iter::once(r.x[iz]).chain(r.x.iter().enumerate().filter(|(j, _)| *j != ie && *j != iz).map(|(_, v)| *v)).collect();
            PanelRow { y: r.x[ie], x, ..r.clone() }
        })
        .collect();
    let mut first_stage = panel_ols(&first_rows, &first_names, spec)?;
    first_stage.first_stage_f = Some(partial_f);
    first_stage.first_stage_partial_r2 = Some(partial_r2);

    let pi_hat = xe.clone() - &rx + &rz * (rz.dot(&rx) / zz);
    let stage2: Vec<usize> = (0..d.x.ncols()).filter(|&j| j != iz || j == ie).collect();
    let mut xhat = d.x.select_columns(&stage2);
    let mut xact = xhat.clone();
    let pos = stage2.iter().position(|&j| j == ie).expect("endog kept");
    xhat.set_column(pos, &pi_hat);
    xact.set_column(pos, &xe);
    let b = bread(&xhat)?;
    let beta = &b * (xhat.transpose() * &d.y);
    let e = &d.y - &xact * &beta;
    let mut d2 = d;
    d2.names = stage2.iter().map(|&j| d2.names[j].clone()).collect();
    let cov = covariance(&d2, &xhat, &e, &b, spec)?;
    let mut second_stage = assemble(&d2, spec, &beta, cov, &d2.y, &e);
    second_stage.first_stage_f = Some(partial_f);
    second_stage.first_stage_partial_r2 = Some(partial_r2);
    Ok(IvResult { first_stage, second_stage })
}
