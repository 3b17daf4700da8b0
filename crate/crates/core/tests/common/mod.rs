//! Straight-line reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod nlao_cases;

use hftml_core::featureset::{FeatureConfig, FeatureName, N_FEATURES};
use hftml_core::tickdata::{Quote, TickSeries, Trade};

const NS: i64 = 1_000_000_000;

fn dollars(micros: i64) -> f64 {
    micros as f64 / 1e6
}

fn mid_of(q: &Quote) -> f64 {
    (q.bid.micros() + q.ask.micros()) as f64 / 2e6
}

/// Last quote with `ts ≤ t`, found by binary search.
fn last_at_or_before(quotes: &[Quote], t: i64) -> Option<&Quote> {
    let i = quotes.partition_point(|q| q.ts_ns <= t);
    (i > 0).then(|| &quotes[i - 1])
}

/// +1 / −1 / None by quote rule, then the last differing earlier price.
fn lee_ready(trades: &[Trade], i: usize, q: &Quote) -> Option<f64> {
    let p2 = 2 * trades[i].price.micros();
    let m2 = q.bid.micros() + q.ask.micros();
    if p2 != m2 {
        return Some(if p2 > m2 { 1.0 } else { -1.0 });
    }
    let p = trades[i].price;
    let prior = trades[..i].iter().rev().find(|t| t.price != p)?;
    Some(if p > prior.price { 1.0 } else { -1.0 })
}

fn variance(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    Some(v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64)
}

/// Every in-session trade with its prevailing quote and side.
struct Signed<'a> {
    trade: &'a Trade,
    quote: &'a Quote,
    side: Option<f64>,
    ahead: Option<f64>,
}

pub fn brute_features(series: &TickSeries, cfg: &FeatureConfig) -> [Option<f64>; N_FEATURES] {
    use FeatureName::*;
    let (open, close) = (cfg.session.open_ns, cfg.session.close_ns);
    let trades: Vec<Trade> = series.trades.iter().filter(|t| t.ts_ns >= open && t.ts_ns < close).copied().collect();
    let quotes: Vec<Quote> = series.quotes.iter().filter(|q| q.ts_ns >= open && q.ts_ns < close).copied().collect();
    let mut f = [None; N_FEATURES];
    let mut set = |n: FeatureName, v: Option<f64>| f[n.index()] = v;

    let dv = |t: &Trade| dollars(t.price.micros()) * t.size as f64;
    let has_trades = !trades.is_empty();
    set(TOTAL_TRADE, Some(trades.len() as f64));
    if has_trades {
        set(AVG_PRICE_M, Some(trades.iter().map(|t| dollars(t.price.micros())).sum::<f64>() / trades.len() as f64));
        set(RET_MKT_M, Some((dollars(trades[trades.len() - 1].price.micros()) / dollars(trades[0].price.micros())).ln()));
        set(TOTAL_DOLLAR_M, Some(trades.iter().map(dv).sum()));
        set(ISO_DOLLAR, Some(trades.iter().filter(|t| t.iso).map(dv).sum()));
    }
    if let Some(q) = quotes.last() {
        set(NBOQTY_BEFORE_CLOSE, Some(q.ask_sz as f64));
        set(NBBQTY_BEFORE_CLOSE, Some(q.bid_sz as f64));
    }

    // time weights
    let life = |i: usize| -> f64 {
        let end = if i + 1 < quotes.len() { quotes[i + 1].ts_ns.min(close) } else { close };
        (end - quotes[i].ts_ns).max(0) as f64
    };
    let total_life: f64 = (0..quotes.len()).map(life).sum();
    if total_life > 0.0 {
        let tw = |g: &dyn Fn(&Quote) -> f64| (0..quotes.len()).map(|i| life(i) * g(&quotes[i])).sum::<f64>() / total_life;
        set(QUOTEDSPREAD_PERCENT_TW, Some(tw(&|q| 200.0 * (q.ask.micros() - q.bid.micros()) as f64 / (q.ask.micros() + q.bid.micros()) as f64)));
        set(BESTOFRDEPTH_DOLLAR_TW, Some(tw(&|q| dollars(q.ask.micros()) * q.ask_sz as f64)));
        set(BESTBIDDEPTH_DOLLAR_TW, Some(tw(&|q| dollars(q.bid.micros()) * q.bid_sz as f64)));
        set(BESTOFRDEPTH_SHARE_TW, Some(tw(&|q| q.ask_sz as f64)));
        set(BESTBIDDEPTH_SHARE_TW, Some(tw(&|q| q.bid_sz as f64)));
    }

    let signed: Vec<Signed> = (0..trades.len())
        .filter_map(|i| {
            let quote = last_at_or_before(&quotes, trades[i].ts_ns)?;
            let target = trades[i].ts_ns + cfg.impact_horizon_ns;
            let ahead = if target < close { last_at_or_before(&quotes, target).map(mid_of) } else { None };
            Some(Signed { trade: &trades[i], quote, side: lee_ready(&trades, i, quote), ahead })
        })
        .collect();

    let (mut w, mut eff, mut w5, mut real, mut imp) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in &signed {
        let Some(d) = s.side else { continue };
        let p = dollars(s.trade.price.micros());
        let m = mid_of(s.quote);
        let wt = dv(s.trade);
        w += wt;
        eff += wt * 2.0 * d * (p - m) / m * 100.0;
        if let Some(m5) = s.ahead {
            w5 += wt;
            real += wt * 2.0 * d * (p - m5) / m * 100.0;
            imp += wt * 2.0 * d * (m5 - m) / m * 100.0;
        }
    }
    if w > 0.0 {
        set(EFFECTIVESPREAD_PERCENT_DW, Some(eff / w));
    }
    if w5 > 0.0 {
        set(PERCENTREALIZEDSPREAD_LR_DW, Some(real / w5));
        set(PERCENTPRICEIMPACT_LR_DW, Some(imp / w5));
    }

    let ratio = |buy: f64, sell: f64| (buy + sell > 0.0).then(|| (buy - sell).abs() / (buy + sell));
    let flow = |pred: &dyn Fn(&Signed) -> bool| {
        let buy: f64 = signed.iter().filter(|s| s.side == Some(1.0) && pred(s)).map(|s| s.trade.size as f64).sum();
        let sell: f64 = signed.iter().filter(|s| s.side == Some(-1.0) && pred(s)).map(|s| s.trade.size as f64).sum();
        ratio(buy, sell)
    };
    set(BS_RATIO_VOL, flow(&|_| true));
    set(BS_RATIO_INST20K_VOL, flow(&|s| dv(s.trade) > cfg.institutional_cutoff));

    let rem = |t: &Trade| t.price.micros() % 10_000;
    let is_retail_sell = |t: &Trade| t.venue == cfg.retail_venue && rem(t) > 0 && rem(t) < cfg.retail_sell_max_micros;
    let is_retail_buy = |t: &Trade| t.venue == cfg.retail_venue && rem(t) > cfg.retail_buy_min_micros && rem(t) < 10_000;
    let rbuy: f64 = trades.iter().filter(|t| is_retail_buy(t)).map(|t| t.size as f64).sum();
    let rsell: f64 = trades.iter().filter(|t| is_retail_sell(t)).map(|t| t.size as f64).sum();
    set(BS_RATIO_RETAIL_VOL, ratio(rbuy, rsell));
    if has_trades {
        set(TOTAL_DV_RETAIL, Some(trades.iter().filter(|t| is_retail_buy(t) || is_retail_sell(t)).map(dv).sum()));
        set(TOTAL_DV_INST20K, Some(trades.iter().filter(|t| dv(t) > cfg.institutional_cutoff).map(dv).sum()));
    }

    // second-grid mid, None before the first quote
    let secs = ((close - open) / NS) as usize;
    let grid: Vec<Option<f64>> = (0..=secs).map(|s| last_at_or_before(&quotes, open + s as i64 * NS).map(mid_of)).collect();
    let span_return = |a: usize, b: usize| Some((grid[b.min(secs)]? / grid[a]?).ln());
    let spans = |width: usize| -> Vec<(usize, usize)> {
        (0..secs.div_ceil(width))
            .map(|k| (k * width, ((k + 1) * width).min(secs)))
            .filter(|(a, b)| b - a == width || b - a >= cfg.min_partial_bucket_secs)
            .collect()
    };

    let width = cfg.impact_bucket_secs;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (a, b) in spans(width) {
        let Some(r) = span_return(a, b) else { continue };
        let lo = open + a as i64 * NS;
        let hi = open + (a + width) as i64 * NS;
        let imb: f64 = signed.iter().filter(|s| s.trade.ts_ns >= lo && s.trade.ts_ns < hi).filter_map(|s| Some(s.side? * dv(s.trade))).sum();
        xs.push(imb);
        ys.push(r);
    }
    if xs.iter().filter(|x| **x != 0.0).count() >= 3 {
        let sx: Vec<f64> = xs.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() * x.abs().sqrt() }).collect();
        let n = sx.len() as f64;
        let (mx, my) = (sx.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxx: f64 = sx.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = sx.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 {
            set(TSIGNSQRTDVOL1, Some(sxy / sxx));
        }
    }

    let mids: Vec<f64> = grid.iter().flatten().copied().collect();
    let rets: Vec<f64> = (1..mids.len()).map(|i| (mids[i] / mids[i - 1]).ln()).collect();
    let diffs: Vec<f64> = (1..rets.len()).map(|i| rets[i] - rets[i - 1]).collect();
    if diffs.len() >= 2 {
        set(IVOL_Q, Some(diffs.iter().map(|d| d * d).sum::<f64>() / (diffs.len() - 1) as f64));
    }

    let hw = cfg.hindex_bucket_secs as i64 * NS;
    let n_h = secs.div_ceil(cfg.hindex_bucket_secs);
    let bucket_dv: Vec<f64> = (0..n_h as i64).map(|k| trades.iter().filter(|t| (t.ts_ns - open) / hw == k).map(dv).sum()).collect();
    let total: f64 = bucket_dv.iter().sum();
    if total > 0.0 {
        set(HINDEX, Some(bucket_dv.iter().map(|d| d * d).sum::<f64>() / (total * total)));
    }

    let short: Vec<f64> = spans(cfg.var_short_secs).into_iter().filter_map(|(a, b)| span_return(a, b)).collect();
    let long: Vec<f64> = spans(cfg.var_long_secs).into_iter().filter_map(|(a, b)| span_return(a, b)).collect();
    if let (Some(vs), Some(vl)) = (variance(&short), variance(&long)) {
        if vs > 0.0 {
            let k = cfg.var_long_secs as f64 / cfg.var_short_secs as f64;
            set(VAR_RATIO3, Some((vl / (k * vs) - 1.0).abs()));
        }
    }
    f
}

/// `|a − b| ≤ tol · max(|a|, |b|)`, with both-missing counted as equal.
pub fn rel_close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => a == b || (a - b).abs() <= tol * a.abs().max(b.abs()),
        _ => false,
    }
}

/// Removes the first `k` quotes so early trades have no prevailing quote.
pub fn drop_leading_quotes(series: &mut TickSeries, k: usize) {
    let k = k.min(series.quotes.len().saturating_sub(1));
    series.quotes.drain(..k);
}
