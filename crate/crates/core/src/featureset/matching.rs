//! Prevailing-quote matching and Lee–Ready trade signing.

use crate::tickdata::{Price, Quote, Trade};

/// Trade direction `D_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Side::Buy => 1.0,
            Side::Sell => -1.0,
        }
    }
}

/// A trade paired with the quote prevailing at its timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedTrade {
    /// Position of the trade in the slice given to [`match_prevailing_quotes`].
    pub trade_index: usize,
    pub trade: Trade,
    pub prevailing_bid: Price,
    pub prevailing_ask: Price,
    /// `bid + ask` in micro-dollars; exact twice-midpoint for comparisons.
    pub mid_x2_micros: i64,
    pub mid: f64,
    /// Midquote at `ts + horizon`, absent when that instant is at or past
    /// the session close.
    pub mid_plus_5min: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchOutput {
    pub matched: Vec<MatchedTrade>,
    /// Trades that precede every quote.
    pub excluded: usize,
}

/// Pairs every trade with the last quote at or before it (`ts_q <= ts_k`)
/// and looks up the midquote `horizon_ns` later by the same rule.
///
/// Both inputs must be time-sorted.
pub fn match_prevailing_quotes(trades: &[Trade], quotes: &[Quote], close_ns: i64, horizon_ns: i64) -> MatchOutput {
    let mut out = MatchOutput { matched: Vec::with_capacity(trades.len()), excluded: 0 };
    // `now` and `ahead` count quotes with ts <= the respective instant.
    let mut now = 0usize;
    let mut ahead = 0usize;
    for (trade_index, t) in trades.iter().enumerate() {
        while now < quotes.len() && quotes[now].ts_ns <= t.ts_ns {
            now += 1;
        }
        if now == 0 {
            out.excluded += 1;
            continue;
        }
        let q = &quotes[now - 1];
        let target = t.ts_ns + horizon_ns;
        let mid_plus_5min = if target >= close_ns {
            None
        } else {
            ahead = ahead.max(now);
            while ahead < quotes.len() && quotes[ahead].ts_ns <= target {
                ahead += 1;
            }
            Some(quotes[ahead - 1].mid())
        };
        out.matched.push(MatchedTrade {
            trade_index,
            trade: *t,
            prevailing_bid: q.bid,
            prevailing_ask: q.ask,
            mid_x2_micros: q.mid_x2_micros(),
            mid: q.mid(),
            mid_plus_5min,
        });
    }
    out
}

/// Lee–Ready: quote rule first, tick test at the midpoint.
///
/// `reference` is the most recent earlier trade price that differs from
/// `price`; `None` when there is none, which leaves a midpoint trade
/// unclassified.
pub fn classify_lee_ready(price: Price, mid_x2_micros: i64, reference: Option<Price>) -> Option<Side> {
    let p2 = 2 * price.micros();
    if p2 > mid_x2_micros {
        Some(Side::Buy)
    } else if p2 < mid_x2_micros {
        Some(Side::Sell)
    } else {
        match reference {
            Some(r) if price > r => Some(Side::Buy),
            Some(r) if price < r => Some(Side::Sell),
            _ => None,
        }
    }
}

/// Running state for the tick test over a trade sequence.
#[derive(Debug, Clone, Copy, Default)]
pub struct TickTest {
    last: Option<Price>,
    /// Last price that differed from `last`.
    before_last: Option<Price>,
}

impl TickTest {
    /// Reference price for a trade at `price` given the history so far.
    pub fn reference(&self, price: Price) -> Option<Price> {
        match self.last {
            Some(l) if l != price => Some(l),
            Some(_) => self.before_last,
            None => None,
        }
    }

    pub fn push(&mut self, price: Price) {
        if let Some(l) = self.last {
            if l != price {
                self.before_last = Some(l);
            }
        }
        self.last = Some(price);
    }
}

/// Signs every matched trade. The tick-test history runs over all trades
/// (matched or not) in time order.
pub fn sign_trades(trades: &[Trade], matched: &[MatchedTrade]) -> Vec<Option<Side>> {
    let mut sides = Vec::with_capacity(matched.len());
    let mut tick = TickTest::default();
    let mut m = 0usize;
    for (i, t) in trades.iter().enumerate() {
        if m < matched.len() && matched[m].trade_index == i {
            sides.push(classify_lee_ready(t.price, matched[m].mid_x2_micros, tick.reference(t.price)));
            m += 1;
        }
        tick.push(t.price);
    }
    sides
}
