//! Features built on the per-second midquote grid and intraday buckets:
//! the signed-root-dollar price impact slope, quote volatility, the
//! Herfindahl concentration of dollar volume and the variance ratio.

use super::matching::{MatchedTrade, Side};
use super::FeatureConfig;
use crate::tickdata::{Quote, Session, Trade, NS_PER_SEC};

/// Midquote sampled at every whole second `open + s` for `s = 0..=len`,
/// carrying the last quote forward. Seconds before the first quote are
/// undefined.
#[derive(Debug, Clone)]
pub struct MidGrid {
    first: usize,
    mids: Vec<f64>,
}

impl MidGrid {
    pub fn build(quotes: &[Quote], session: &Session) -> Self {
        let n_secs = (session.length_ns() / NS_PER_SEC) as usize;
        let mut mids = Vec::with_capacity(n_secs + 1);
        let mut first = n_secs + 1;
        let mut qi = 0usize;
        for s in 0..=n_secs {
            let t = session.open_ns + s as i64 * NS_PER_SEC;
            while qi < quotes.len() && quotes[qi].ts_ns <= t {
                qi += 1;
            }
            if qi > 0 {
                if first > n_secs {
                    first = s;
                }
                mids.push(quotes[qi - 1].mid());
            }
        }
        MidGrid { first, mids }
    }

    #[inline]
    pub fn at(&self, s: usize) -> Option<f64> {
        if s < self.first {
            None
        } else {
            self.mids.get(s - self.first).copied()
        }
    }

    /// Log returns between consecutive defined seconds.
    pub fn second_returns(&self) -> Vec<f64> {
        self.mids.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
    }

    /// `ln(M(end)/M(start))` if both ends are defined.
    pub fn log_return(&self, start: usize, end: usize) -> Option<f64> {
        Some((self.at(end)? / self.at(start)?).ln())
    }
}

/// `[start, end)` buckets in seconds from the open, aligned to the open.
/// A trailing partial bucket is kept when at least `min_partial` long.
pub fn buckets(session_secs: usize, width: usize, min_partial: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(session_secs / width + 1);
    let mut start = 0;
    while start < session_secs {
        let end = (start + width).min(session_secs);
        if end - start == width || end - start >= min_partial {
            out.push((start, end));
        }
        start += width;
    }
    out
}

/// Log returns over each bucket with both endpoints defined.
pub fn bucket_returns(grid: &MidGrid, spans: &[(usize, usize)]) -> Vec<f64> {
    spans.iter().filter_map(|&(a, b)| grid.log_return(a, b)).collect()
}

/// `sgn(x)·√|x|`.
#[inline]
pub fn signed_sqrt(x: f64) -> f64 {
    x.signum() * x.abs().sqrt()
}

/// Slope of `returns` on `sgn(imb)·√|imb|` with an intercept. `None` with
/// fewer than three nonzero imbalances or no regressor variation.
pub fn impact_regression(returns: &[f64], imbalances: &[f64]) -> Option<f64> {
    debug_assert_eq!(returns.len(), imbalances.len());
    if imbalances.iter().filter(|v| **v != 0.0).count() < 3 {
        return None;
    }
    let n = returns.len() as f64;
    let xs: Vec<f64> = imbalances.iter().map(|&v| signed_sqrt(v)).collect();
    let x_bar = xs.iter().sum::<f64>() / n;
    let y_bar = returns.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(returns) {
        sxx += (x - x_bar) * (x - x_bar);
        sxy += (x - x_bar) * (y - y_bar);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Sum of squared first differences of per-second returns divided by one
/// less than the number of differences.
pub fn quote_volatility(second_returns: &[f64]) -> Option<f64> {
    let terms = second_returns.len().checked_sub(1)?;
    if terms < 2 {
        return None;
    }
    let ss: f64 = second_returns.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    Some(ss / (terms - 1) as f64)
}

/// `Σ_b D_b² / (Σ_b D_b)²` over bucket dollar volumes.
pub fn herfindahl(bucket_dollars: &[f64]) -> Option<f64> {
    let total: f64 = bucket_dollars.iter().sum();
    (total > 0.0).then(|| bucket_dollars.iter().map(|d| d * d).sum::<f64>() / (total * total))
}

/// Sample variance (n − 1 denominator).
pub fn sample_variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    Some(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0))
}

/// `|Var(long) / (ratio · Var(short)) − 1|`; `None` when the short-horizon
/// variance is zero or either series has fewer than two returns.
pub fn variance_ratio(short: &[f64], long: &[f64], ratio: f64) -> Option<f64> {
    let vs = sample_variance(short)?;
    let vl = sample_variance(long)?;
    (vs > 0.0).then(|| (vl / (ratio * vs) - 1.0).abs())
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DynamicsFeatures {
    pub lambda: Option<f64>,
    pub ivol: Option<f64>,
    pub hindex: Option<f64>,
    pub var_ratio: Option<f64>,
}

pub fn price_dynamics_features(
    quotes: &[Quote],
    trades: &[Trade],
    matched: &[MatchedTrade],
    sides: &[Option<Side>],
    cfg: &FeatureConfig,
) -> DynamicsFeatures {
    let session = &cfg.session;
    let session_secs = (session.length_ns() / NS_PER_SEC) as usize;
    let grid = MidGrid::build(quotes, session);
    let bucket_of = |ts: i64, width: usize| ((ts - session.open_ns) / (width as i64 * NS_PER_SEC)) as usize;

    // price impact slope over impact buckets
    let spans = buckets(session_secs, cfg.impact_bucket_secs, cfg.min_partial_bucket_secs);
    let mut imbalance = vec![0.0; session_secs / cfg.impact_bucket_secs + 1];
    for (m, side) in matched.iter().zip(sides) {
        if let Some(side) = side {
            imbalance[bucket_of(m.trade.ts_ns, cfg.impact_bucket_secs)] += side.sign() * m.trade.dollar_value();
        }
    }
    let mut rets = Vec::with_capacity(spans.len());
    let mut imbs = Vec::with_capacity(spans.len());
    for (k, &(a, b)) in spans.iter().enumerate() {
        if let Some(r) = grid.log_return(a, b) {
            rets.push(r);
            imbs.push(imbalance[k]);
        }
    }
    let lambda = impact_regression(&rets, &imbs);

    let ivol = quote_volatility(&grid.second_returns());

    let mut dollars = vec![0.0; session_secs.div_ceil(cfg.hindex_bucket_secs).max(1)];
    for t in trades {
        dollars[bucket_of(t.ts_ns, cfg.hindex_bucket_secs)] += t.dollar_value();
    }
    let hindex = herfindahl(&dollars);

    let short = bucket_returns(&grid, &buckets(session_secs, cfg.var_short_secs, cfg.min_partial_bucket_secs));
    let long = bucket_returns(&grid, &buckets(session_secs, cfg.var_long_secs, cfg.min_partial_bucket_secs));
    let var_ratio = variance_ratio(&short, &long, cfg.var_long_secs as f64 / cfg.var_short_secs as f64);

    DynamicsFeatures { lambda, ivol, hindex, var_ratio }
}
