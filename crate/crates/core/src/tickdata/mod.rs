//! Tick records, the tick CSV schema, the synthetic labeled-market generator
//! and the HFT volume-fraction targets.
//!
//! Timestamps are integer nanoseconds since midnight ET. Nothing here filters
//! to market hours; [`Session`] slicing is applied by the consumers.

mod io;
mod price;
mod synth;
mod targets;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use io::{
    merge_series, parse_tick_file, parse_tick_reader, write_latent_csv, write_quotes_csv, write_trades_csv,
    FileKind, ParseOptions, ParseReport, RowError, TickDataError,
};
pub use price::{Price, PriceParseError, MICROS_PER_CENT, MICROS_PER_DOLLAR};
pub use synth::{synth_market, synth_stock_day, LatentState, LogisticLink, SynthConfig, SynthDay};
pub use targets::{compute_targets, TargetError, TargetPair};

/// Nanoseconds per second.
pub const NS_PER_SEC: i64 = 1_000_000_000;
/// One calendar day in nanoseconds; timestamps must lie in `[0, DAY_NS)`.
pub const DAY_NS: i64 = 86_400 * NS_PER_SEC;

/// Regular trading hours as a half-open interval `[open_ns, close_ns)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub open_ns: i64,
    pub close_ns: i64,
}

impl Session {
    /// 09:30:00 to 16:00:00.
    pub const REGULAR: Session = Session { open_ns: 34_200 * NS_PER_SEC, close_ns: 57_600 * NS_PER_SEC };

    #[inline]
    pub fn contains(&self, ts_ns: i64) -> bool {
        ts_ns >= self.open_ns && ts_ns < self.close_ns
    }

    pub fn length_ns(&self) -> i64 {
        self.close_ns - self.open_ns
    }
}

impl Default for Session {
    fn default() -> Self {
        Session::REGULAR
    }
}

/// Which side(s) of a trade were high-frequency traders.
///
/// The first letter is the liquidity demander (aggressor), the second the
/// liquidity supplier (resting order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LiquidityProfile {
    HH,
    HN,
    NH,
    NN,
}

impl LiquidityProfile {
    pub fn from_sides(aggressor_hft: bool, resting_hft: bool) -> Self {
        match (aggressor_hft, resting_hft) {
            (true, true) => LiquidityProfile::HH,
            (true, false) => LiquidityProfile::HN,
            (false, true) => LiquidityProfile::NH,
            (false, false) => LiquidityProfile::NN,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LiquidityProfile::HH => "HH",
            LiquidityProfile::HN => "HN",
            LiquidityProfile::NH => "NH",
            LiquidityProfile::NN => "NN",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "HH" => Some(LiquidityProfile::HH),
            "HN" => Some(LiquidityProfile::HN),
            "NH" => Some(LiquidityProfile::NH),
            "NN" => Some(LiquidityProfile::NN),
            _ => None,
        }
    }

    pub fn demander_is_hft(self) -> bool {
        matches!(self, LiquidityProfile::HH | LiquidityProfile::HN)
    }

    pub fn supplier_is_hft(self) -> bool {
        matches!(self, LiquidityProfile::HH | LiquidityProfile::NH)
    }
}

/// One print. `profile` is present only for labeled trades.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub ts_ns: i64,
    pub price: Price,
    pub size: u64,
    /// Intermarket sweep order flag.
    pub iso: bool,
    /// Single ASCII venue code.
    pub venue: u8,
    pub profile: Option<LiquidityProfile>,
}

impl Trade {
    #[inline]
    pub fn dollar_value(&self) -> f64 {
        self.price.dollars() * self.size as f64
    }

    pub fn is_valid(&self) -> bool {
        self.price.micros() > 0 && self.size > 0 && (0..DAY_NS).contains(&self.ts_ns)
    }
}

/// An NBBO update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quote {
    pub ts_ns: i64,
    pub bid: Price,
    pub ask: Price,
    pub bid_sz: u64,
    pub ask_sz: u64,
}

impl Quote {
    /// `bid + ask` in micro-dollars, i.e. twice the midpoint. Exact.
    #[inline]
    pub fn mid_x2_micros(&self) -> i64 {
        self.bid.micros() + self.ask.micros()
    }

    /// Midpoint in dollars, correctly rounded from the exact micro sum.
    #[inline]
    pub fn mid(&self) -> f64 {
        self.mid_x2_micros() as f64 / (2 * MICROS_PER_DOLLAR) as f64
    }

    #[inline]
    pub fn is_crossed(&self) -> bool {
        self.bid >= self.ask
    }

    pub fn is_valid(&self) -> bool {
        self.bid.micros() > 0 && self.ask.micros() > 0 && (0..DAY_NS).contains(&self.ts_ns)
    }
}

/// Time-ordered trades and quotes for one stock-day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSeries {
    pub stock: String,
    pub date: NaiveDate,
    pub trades: Vec<Trade>,
    pub quotes: Vec<Quote>,
}

impl TickSeries {
    pub fn new(stock: impl Into<String>, date: NaiveDate) -> Self {
        Self { stock: stock.into(), date, trades: Vec::new(), quotes: Vec::new() }
    }

    pub fn is_time_ordered(&self) -> bool {
        self.trades.windows(2).all(|w| w[0].ts_ns <= w[1].ts_ns)
            && self.quotes.windows(2).all(|w| w[0].ts_ns <= w[1].ts_ns)
    }

    pub fn is_labeled(&self) -> bool {
        !self.trades.is_empty() && self.trades.iter().all(|t| t.profile.is_some())
    }

    /// Trades and quotes falling inside `session`. Requires time order.
    pub fn session_slices(&self, session: &Session) -> (&[Trade], &[Quote]) {
        let t0 = self.trades.partition_point(|t| t.ts_ns < session.open_ns);
        let t1 = self.trades.partition_point(|t| t.ts_ns < session.close_ns);
        let q0 = self.quotes.partition_point(|q| q.ts_ns < session.open_ns);
        let q1 = self.quotes.partition_point(|q| q.ts_ns < session.close_ns);
        (&self.trades[t0..t1], &self.quotes[q0..q1])
    }

    pub fn tick_count(&self) -> usize {
        self.trades.len() + self.quotes.len()
    }
}
