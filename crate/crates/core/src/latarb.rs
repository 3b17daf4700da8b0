//! Stale-quote latency-arbitrage detection.
//!
//! Each NBBO update `z` is compared with its predecessor `z − 1`. An upward
//! opportunity occurs when the new midprice exceeds the old ask by more than
//! one tick, a downward one when it falls below the old bid by more than one
//! tick. All comparisons are exact integer arithmetic on doubled micro-dollar
//! midprices.

use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::tickdata::{Price, Quote, Session, TickSeries};

pub const DEFAULT_TICK: Price = Price::from_cents(1);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatArbError {
    #[error("quotes out of time order at index {index} ({prev_ns} > {ts_ns})")]
    Unsorted { index: usize, prev_ns: i64, ts_ns: i64 },
    #[error("tick size must be positive")]
    BadTick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatArbEvent {
    /// Timestamp of the triggering quote `z`.
    pub ts_ns: i64,
    pub direction: Direction,
    /// `Ask_{z−1}` for up events, `Bid_{z−1}` for down events.
    pub stale_price: Price,
    /// Twice the midprice of quote `z`, in micro-dollars.
    pub mid_x2_micros: i64,
}

impl LatArbEvent {
    pub fn midprice(&self) -> f64 {
        self.mid_x2_micros as f64 / 2e6
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScanCounts {
    pub up: u64,
    pub down: u64,
    /// Consecutive pairs examined.
    pub pairs: u64,
    /// Pairs skipped because quote `z − 1` was crossed or locked.
    pub crossed_skipped: u64,
}

impl ScanCounts {
    pub fn nlao(&self) -> u64 {
        self.up + self.down
    }
}

/// Streaming scanner holding only the previous quote.
#[derive(Debug, Clone)]
pub struct Scanner {
    tick_x2: i64,
    prev: Option<Quote>,
    index: usize,
    counts: ScanCounts,
}

impl Scanner {
    pub fn new(tick: Price) -> Result<Scanner, LatArbError> {
        if tick.micros() <= 0 {
            return Err(LatArbError::BadTick);
        }
        Ok(Scanner { tick_x2: 2 * tick.micros(), prev: None, index: 0, counts: ScanCounts::default() })
    }

    pub fn push(&mut self, q: &Quote) -> Result<Option<LatArbEvent>, LatArbError> {
        let index = self.index;
        self.index += 1;
        let Some(prev) = self.prev.replace(*q) else { return Ok(None) };
        if q.ts_ns < prev.ts_ns {
            return Err(LatArbError::Unsorted { index, prev_ns: prev.ts_ns, ts_ns: q.ts_ns });
        }
        self.counts.pairs += 1;
        if prev.is_crossed() {
            self.counts.crossed_skipped += 1;
            return Ok(None);
        }
        let mid_x2 = q.mid_x2_micros();
        let event = if mid_x2 > 2 * prev.ask.micros() + self.tick_x2 {
            self.counts.up += 1;
            Some((Direction::Up, prev.ask))
        } else if mid_x2 < 2 * prev.bid.micros() - self.tick_x2 {
            self.counts.down += 1;
            Some((Direction::Down, prev.bid))
        } else {
            None
        };
        Ok(event.map(|(direction, stale_price)| LatArbEvent { ts_ns: q.ts_ns, direction, stale_price, mid_x2_micros: mid_x2 }))
    }

    pub fn counts(&self) -> ScanCounts {
        self.counts
    }
}

/// Scans a time-sorted quote stream; fewer than two quotes yield no pairs.
pub fn scan_latency_arbitrage(quotes: &[Quote], tick: Price) -> Result<(Vec<LatArbEvent>, ScanCounts), LatArbError> {
    let mut s = Scanner::new(tick)?;
    let mut events = Vec::new();
    for q in quotes {
        if let Some(e) = s.push(q)? {
            events.push(e);
        }
    }
    Ok((events, s.counts()))
}

/// Counts only, without materializing events.
pub fn count_latency_arbitrage(quotes: &[Quote], tick: Price) -> Result<ScanCounts, LatArbError> {
    let mut s = Scanner::new(tick)?;
    for q in quotes {
        s.push(q)?;
    }
    Ok(s.counts())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NlaoRecord {
    pub stock: String,
    pub date: NaiveDate,
    pub nlao: u64,
    pub up: u64,
    pub down: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayScan {
    pub record: NlaoRecord,
    pub counts: ScanCounts,
    pub events: Vec<LatArbEvent>,
}

/// Scans the in-session quotes of one stock-day.
pub fn scan_series(series: &TickSeries, session: &Session, tick: Price) -> Result<DayScan, LatArbError> {
    let (_, quotes) = series.session_slices(session);
    let (events, counts) = scan_latency_arbitrage(quotes, tick)?;
    let record = NlaoRecord { stock: series.stock.clone(), date: series.date, nlao: counts.nlao(), up: counts.up, down: counts.down };
    Ok(DayScan { record, counts, events })
}

/// Parallel over stock-days; results keep the input order.
pub fn scan_batch(series: &[TickSeries], session: &Session, tick: Price) -> Result<Vec<DayScan>, LatArbError> {
    series.par_iter().map(|s| scan_series(s, session, tick)).collect()
}

/// `stock,date,nlao,up,down`.
pub fn write_nlao_csv<W: Write>(w: W, days: &[DayScan]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["stock", "date", "nlao", "up", "down"])?;
    for d in days {
        let r = &d.record;
        wtr.write_record([r.stock.clone(), r.date.to_string(), r.nlao.to_string(), r.up.to_string(), r.down.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `stock,date,ts_ns,direction,stale_price,midprice`.
pub fn write_events_csv<W: Write>(w: W, days: &[DayScan]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["stock", "date", "ts_ns", "direction", "stale_price", "midprice"])?;
    for d in days {
        for e in &d.events {
            wtr.write_record([
                d.record.stock.clone(),
                d.record.date.to_string(),
                e.ts_ns.to_string(),
                e.direction.as_str().to_string(),
                e.stale_price.to_string(),
                e.midprice().to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
