//! Market-model abnormal returns, the JUMP ratio, event-window tests and
//! the pre-event log-price instrument.
//!
//! Series are aligned by trading day: position `i` of a slice is one trading
//! day, `NaN` marks a missing observation, and windows are given in trading
//! days relative to the event position.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{robust, PanelError};

/// Market-model estimation window relative to the event, inclusive.
pub const ESTIMATION_WINDOW: (i64, i64) = (-252, -22);
pub const MIN_ESTIMATION_OBS: usize = 60;
pub const NARROW_WINDOW: (i64, i64) = (-1, 1);
pub const WIDE_WINDOW: (i64, i64) = (-21, 1);
/// Records with `|CAR_wide|` below this are dropped.
pub const MIN_WIDE_CAR: f64 = 1e-8;
pub const LOG_PRICE_WINDOW: (i64, i64) = (-42, -22);
pub const LOG_PRICE_MIN_OBS: usize = 10;
/// Relative days of the announcement window.
pub const ANNOUNCEMENT_DAYS: [i64; 3] = [0, 1, 2];

fn at(v: &[f64], event: usize, rel: i64) -> Option<f64> {
    let i = event as i64 + rel;
    (i >= 0 && (i as usize) < v.len()).then(|| v[i as usize]).filter(|x| x.is_finite())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbnormalReturns {
    pub alpha: f64,
    pub beta: f64,
    pub n_estimation: usize,
    /// First relative day of `ar`.
    pub start: i64,
    /// `None` where either return is missing.
    pub ar: Vec<Option<f64>>,
}

impl AbnormalReturns {
    pub fn get(&self, rel: i64) -> Option<f64> {
        let i = rel - self.start;
        if i < 0 {
            return None;
        }
        self.ar.get(i as usize).copied().flatten()
    }
}

/// Fits `r = α + β·r_m` on `est` and returns `AR_t = r_t − α̂ − β̂·r_{m,t}`
/// over `window`, both relative to `event`.
pub fn abnormal_returns(stock: &[f64], market: &[f64], event: usize, est: (i64, i64), window: (i64, i64), min_obs: usize) -> Result<AbnormalReturns, PanelError> {
    if stock.len() != market.len() {
        return Err(PanelError::Spec("stock and market series must be aligned".into()));
    }
    let pairs: Vec<(f64, f64)> = (est.0..=est.1).filter_map(|r| Some((at(stock, event, r)?, at(market, event, r)?))).collect();
    if pairs.len() < min_obs.max(2) {
        return Err(PanelError::InsufficientObservations { needed: min_obs, found: pairs.len() });
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.1 - mx) * (p.1 - mx)).sum();
    if sxx == 0.0 {
        return Err(PanelError::ZeroVariance("market returns"));
    }
    let sxy: f64 = pairs.iter().map(|p| (p.1 - mx) * (p.0 - my)).sum();
    let beta = sxy / sxx;
    let alpha = my - beta * mx;
    let ar = (window.0..=window.1).map(|r| Some(at(stock, event, r)? - alpha - beta * at(market, event, r)?)).collect();
    Ok(AbnormalReturns { alpha, beta, n_estimation: pairs.len(), start: window.0, ar })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub stock: String,
    pub quarter: String,
    pub jump: f64,
    pub car_narrow: f64,
    pub car_wide: f64,
}

/// Sum of simple abnormal returns over an inclusive window.
pub fn car(ar: &AbnormalReturns, window: (i64, i64)) -> Result<f64, PanelError> {
    (window.0..=window.1).map(|r| ar.get(r).ok_or(PanelError::MissingDay(r))).sum()
}

/// `CAR[−1, 1] / CAR[−21, 1]`.
pub fn jump_ratio(ar: &AbnormalReturns, stock: &str, quarter: &str) -> Result<JumpRecord, PanelError> {
    let car_narrow = car(ar, NARROW_WINDOW)?;
    let car_wide = car(ar, WIDE_WINDOW)?;
    if car_wide.abs() < MIN_WIDE_CAR {
        return Err(PanelError::ZeroVariance("wide-window CAR"));
    }
    Ok(JumpRecord { stock: stock.into(), quarter: quarter.into(), jump: car_narrow / car_wide, car_narrow, car_wide })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DropTally {
    pub insufficient_estimation: usize,
    pub missing_days: usize,
    pub zero_wide_car: usize,
}

/// Winsorizes the JUMP values of a batch in place at level `p`.
pub fn winsorize_jumps(records: &mut [JumpRecord], p: f64) -> Result<(), PanelError> {
    if records.is_empty() {
        return Ok(());
    }
    let w = robust::winsorize(&records.iter().map(|r| r.jump).collect::<Vec<_>>(), p)?;
    records.iter_mut().zip(w).for_each(|(r, j)| r.jump = j);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventObs {
    pub event: usize,
    pub rel_day: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPoint {
    pub rel_day: i64,
    pub mean: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventStudy {
    pub path: Vec<PathPoint>,
    pub window_mean: f64,
    pub other_mean: f64,
    pub difference: f64,
    pub percent_change: f64,
    pub n_window: usize,
    pub n_other: usize,
    /// Welch t statistic, its Satterthwaite degrees of freedom and two-sided p-value.
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    if v.iter().all(|&x| x == v[0]) {
        return (v[0], 0.0);
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
}

/// Mean path over `[−pre, post]` and a Welch test of announcement days
/// against the other days of the window.
pub fn event_study(obs: &[EventObs], pre: i64, post: i64) -> Result<EventStudy, PanelError> {
    let inside: Vec<&EventObs> = obs.iter().filter(|o| (-pre..=post).contains(&o.rel_day) && o.value.is_finite()).collect();
    let path = (-pre..=post)
        .map(|d| {
            let v: Vec<f64> = inside.iter().filter(|o| o.rel_day == d).map(|o| o.value).collect();
            PathPoint { rel_day: d, n: v.len(), mean: (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64) }
        })
        .collect();
    let (win, other): (Vec<&EventObs>, Vec<&EventObs>) = inside.iter().partition(|o| ANNOUNCEMENT_DAYS.contains(&o.rel_day));
    let win: Vec<f64> = win.iter().map(|o| o.value).collect();
    let other: Vec<f64> = other.iter().map(|o| o.value).collect();
    if win.len() < 2 || other.len() < 2 {
        return Err(PanelError::InsufficientObservations { needed: 2, found: win.len().min(other.len()) });
    }
    let (m1, v1) = mean_var(&win);
    let (m0, v0) = mean_var(&other);
    let (n1, n0) = (win.len() as f64, other.len() as f64);
    let (a, b) = (v1 / n1, v0 / n0);
    let se = (a + b).sqrt();
    let diff = m1 - m0;
    let (t, df, p) = if se == 0.0 {
        if diff == 0.0 {
            (0.0, n1 + n0 - 2.0, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), n1 + n0 - 2.0, 0.0)
        }
    } else {
        let df = (a + b).powi(2) / (a * a / (n1 - 1.0) + b * b / (n0 - 1.0));
        let t = diff / se;
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| PanelError::Spec(e.to_string()))?;
        (t, df, 2.0 * (1.0 - dist.cdf(t.abs())))
    };
    Ok(EventStudy {
        path,
        window_mean: m1,
        other_mean: m0,
        difference: diff,
        percent_change: if m0 != 0.0 { 100.0 * diff / m0 } else { f64::NAN },
        n_window: win.len(),
        n_other: other.len(),
        t,
        df,
        p,
    })
}

/// Natural log of the mean price over `window` relative to `event`.
pub fn log_price_instrument(prices: &[f64], event: usize, window: (i64, i64), min_obs: usize) -> Result<f64, PanelError> {
    let v: Vec<f64> = (window.0..=window.1).filter_map(|r| at(prices, event, r)).collect();
    if v.is_empty() || v.len() < min_obs {
        return Err(PanelError::InsufficientObservations { needed: min_obs.max(1), found: v.len() });
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if !(mean > 0.0) {
        return Err(PanelError::Spec("prices must be positive".into()));
    }
    Ok(mean.ln())
}
