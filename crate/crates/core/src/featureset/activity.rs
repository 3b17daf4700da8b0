//! Price, volume and time-weighted depth features.

use super::quote_lifetimes;
use crate::tickdata::{Quote, Trade};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ActivityFeatures {
    pub avg_price: Option<f64>,
    pub ret_open_close: Option<f64>,
    pub total_trade: f64,
    pub nbo_qty_before_close: Option<f64>,
    pub nbb_qty_before_close: Option<f64>,
    pub total_dollar: Option<f64>,
    pub iso_dollar: Option<f64>,
    pub ofr_depth_dollar_tw: Option<f64>,
    pub bid_depth_dollar_tw: Option<f64>,
    pub ofr_depth_share_tw: Option<f64>,
    pub bid_depth_share_tw: Option<f64>,
}

/// Expects session-filtered, time-sorted inputs. The first and last trade
/// prices stand in for the official open and close.
pub fn depth_and_activity_features(trades: &[Trade], quotes: &[Quote], close_ns: i64) -> ActivityFeatures {
    let mut f = ActivityFeatures { total_trade: trades.len() as f64, ..Default::default() };
    if let (Some(first), Some(last)) = (trades.first(), trades.last()) {
        let mut price_sum = 0.0;
        let mut dollars = 0.0;
        let mut iso = 0.0;
        for t in trades {
            let p = t.price.dollars();
            price_sum += p;
            let dv = p * t.size as f64;
            dollars += dv;
            if t.iso {
                iso += dv;
            }
        }
        f.avg_price = Some(price_sum / trades.len() as f64);
        f.ret_open_close = Some((last.price.dollars() / first.price.dollars()).ln());
        f.total_dollar = Some(dollars);
        f.iso_dollar = Some(iso);
    }
    if let Some(last) = quotes.last() {
        f.nbo_qty_before_close = Some(last.ask_sz as f64);
        f.nbb_qty_before_close = Some(last.bid_sz as f64);
    }
    let mut life_total = 0.0;
    let mut acc = [0.0f64; 4];
    for (q, life) in quote_lifetimes(quotes, close_ns) {
        let w = life as f64;
        life_total += w;
        acc[0] += w * q.ask.dollars() * q.ask_sz as f64;
        acc[1] += w * q.bid.dollars() * q.bid_sz as f64;
        acc[2] += w * q.ask_sz as f64;
        acc[3] += w * q.bid_sz as f64;
    }
    if life_total > 0.0 {
        f.ofr_depth_dollar_tw = Some(acc[0] / life_total);
        f.bid_depth_dollar_tw = Some(acc[1] / life_total);
        f.ofr_depth_share_tw = Some(acc[2] / life_total);
        f.bid_depth_share_tw = Some(acc[3] / life_total);
    }
    f
}
