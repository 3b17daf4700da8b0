//! Absolute order-imbalance ratios for all, retail and institutional flow.

use super::matching::{MatchedTrade, Side};
use super::FeatureConfig;
use crate::tickdata::{Trade, MICROS_PER_CENT};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ImbalanceFeatures {
    pub bs_ratio_vol: Option<f64>,
    pub retail_dollar: f64,
    pub retail_bs_ratio: Option<f64>,
    pub inst_dollar: f64,
    pub inst_bs_ratio: Option<f64>,
}

/// Sub-penny retail rule: on the retail venue a price remainder strictly
/// inside `(0, sell_max)` marks a retail sell, strictly inside
/// `(buy_min, 1¢)` a retail buy.
pub fn retail_side(trade: &Trade, cfg: &FeatureConfig) -> Option<Side> {
    if trade.venue != cfg.retail_venue {
        return None;
    }
    let r = trade.price.subpenny_micros();
    if r > 0 && r < cfg.retail_sell_max_micros {
        Some(Side::Sell)
    } else if r > cfg.retail_buy_min_micros && r < MICROS_PER_CENT {
        Some(Side::Buy)
    } else {
        None
    }
}

#[derive(Default)]
struct Flow {
    buy: f64,
    sell: f64,
}

impl Flow {
    fn add(&mut self, side: Side, shares: f64) {
        match side {
            Side::Buy => self.buy += shares,
            Side::Sell => self.sell += shares,
        }
    }

    fn ratio(&self) -> Option<f64> {
        let total = self.buy + self.sell;
        (total > 0.0).then(|| (self.buy - self.sell).abs() / total)
    }
}

/// `trades` is the full session slice; `matched`/`sides` carry Lee–Ready
/// signs for the trades that had a prevailing quote.
pub fn imbalance_features(trades: &[Trade], matched: &[MatchedTrade], sides: &[Option<Side>], cfg: &FeatureConfig) -> ImbalanceFeatures {
    let mut all = Flow::default();
    let mut inst_flow = Flow::default();
    for (m, side) in matched.iter().zip(sides) {
        let Some(side) = *side else { continue };
        let shares = m.trade.size as f64;
        all.add(side, shares);
        if m.trade.dollar_value() > cfg.institutional_cutoff {
            inst_flow.add(side, shares);
        }
    }
    let mut retail = Flow::default();
    let mut out = ImbalanceFeatures::default();
    for t in trades {
        let dv = t.dollar_value();
        if let Some(side) = retail_side(t, cfg) {
            retail.add(side, t.size as f64);
            out.retail_dollar += dv;
        }
        if dv > cfg.institutional_cutoff {
            out.inst_dollar += dv;
        }
    }
    out.bs_ratio_vol = all.ratio();
    out.retail_bs_ratio = retail.ratio();
    out.inst_bs_ratio = inst_flow.ratio();
    out
}
