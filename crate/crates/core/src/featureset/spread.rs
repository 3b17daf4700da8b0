//! Quoted, effective and realized spreads and price impact, in percent.

use super::matching::{MatchedTrade, Side};
use super::quote_lifetimes;
use crate::tickdata::Quote;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpreadFeatures {
    pub quoted_spread_tw: Option<f64>,
    pub effective_spread_dw: Option<f64>,
    pub realized_spread_dw: Option<f64>,
    pub price_impact_dw: Option<f64>,
}

/// Per-trade decomposition, in percent of the prevailing midquote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadTerms {
    pub effective: f64,
    /// `(realized, impact)` when the five-minute-ahead midquote exists.
    pub realized_impact: Option<(f64, f64)>,
}

/// `2D(P−M)/M`, `2D(P−M₅)/M` and `2D(M₅−M)/M`, scaled to percent.
pub fn spread_terms(side: Side, price: f64, mid: f64, mid_plus_5min: Option<f64>) -> SpreadTerms {
    let d = side.sign();
    SpreadTerms {
        effective: 200.0 * d * (price - mid) / mid,
        realized_impact: mid_plus_5min.map(|m5| (200.0 * d * (price - m5) / mid, 200.0 * d * (m5 - mid) / mid)),
    }
}

/// Quote-lifetime-weighted `(ask − bid)/mid` plus dollar-weighted effective
/// spread (all signed trades) and realized spread / price impact (signed
/// trades with a five-minute-ahead midquote).
pub fn spread_features(matched: &[MatchedTrade], sides: &[Option<Side>], quotes: &[Quote], close_ns: i64) -> SpreadFeatures {
    let mut life_total = 0.0;
    let mut spread_acc = 0.0;
    for (q, life) in quote_lifetimes(quotes, close_ns) {
        let w = life as f64;
        life_total += w;
        spread_acc += w * 100.0 * (q.ask.dollars() - q.bid.dollars()) / q.mid();
    }
    let quoted_spread_tw = (life_total > 0.0).then(|| spread_acc / life_total);

    let (mut w_eff, mut eff) = (0.0, 0.0);
    let (mut w_ri, mut real, mut imp) = (0.0, 0.0, 0.0);
    for (m, side) in matched.iter().zip(sides) {
        let Some(side) = side else { continue };
        let price = m.trade.price.dollars();
        let w = price * m.trade.size as f64;
        let terms = spread_terms(*side, price, m.mid, m.mid_plus_5min);
        w_eff += w;
        eff += w * terms.effective;
        if let Some((r, i)) = terms.realized_impact {
            w_ri += w;
            real += w * r;
            imp += w * i;
        }
    }
    SpreadFeatures {
        quoted_spread_tw,
        effective_spread_dw: (w_eff > 0.0).then(|| eff / w_eff),
        realized_spread_dw: (w_ri > 0.0).then(|| real / w_ri),
        price_impact_dw: (w_ri > 0.0).then(|| imp / w_ri),
    }
}
