//! CSV interchange for ticks.
//!
//! | kind    | header                                           |
//! |---------|--------------------------------------------------|
//! | trades  | `stock,date,ts_ns,price,size,iso,venue`          |
//! | labeled | `stock,date,ts_ns,price,size,iso,venue,profile`  |
//! | quotes  | `stock,date,ts_ns,bid,bid_sz,ask,ask_sz`         |
//!
//! Dates are ISO-8601 (`YYYY-MM-DD`), prices are decimals with at most six
//! fraction digits, `iso` is `1`/`0` (`true`/`false` accepted on input) and
//! `profile` is one of `HH`, `HN`, `NH`, `NN`. Columns may appear in any
//! order; an unknown or missing column is a fatal schema error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{LatentState, LiquidityProfile, Price, Quote, TickSeries, Trade};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Trades,
    Quotes,
    Labeled,
}

impl FileKind {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            FileKind::Trades => &["stock", "date", "ts_ns", "price", "size", "iso", "venue"],
            FileKind::Labeled => &["stock", "date", "ts_ns", "price", "size", "iso", "venue", "profile"],
            FileKind::Quotes => &["stock", "date", "ts_ns", "bid", "bid_sz", "ask", "ask_sz"],
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Sort each (stock, date) group by timestamp instead of rejecting
    /// out-of-order records.
    pub sort: bool,
}

/// A row that failed validation and was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    /// One series per (stock, date), ordered by stock then date.
    pub series: Vec<TickSeries>,
    pub rejected: Vec<RowError>,
    /// Quotes with `bid >= ask`; kept, but counted.
    pub crossed_quotes: usize,
}

impl ParseReport {
    pub fn rejected_count(&self) -> usize {
        self.rejected.len()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TickDataError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("non-monotone at line {line} ({stock} {date})")]
    NonMonotone { line: u64, stock: String, date: NaiveDate },
    #[error("trade in {stock} {date} has no liquidity profile; cannot write labeled file")]
    MissingProfile { stock: String, date: NaiveDate },
}

pub fn parse_tick_file(path: impl AsRef<Path>, kind: FileKind, opts: ParseOptions) -> Result<ParseReport, TickDataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| TickDataError::Io { path: path.display().to_string(), source })?;
    parse_tick_reader(file, kind, opts)
}

enum Record {
    Trade(Trade),
    Quote(Quote),
}

pub fn parse_tick_reader<R: Read>(reader: R, kind: FileKind, opts: ParseOptions) -> Result<ParseReport, TickDataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let expected = kind.columns();
    let mut index = vec![usize::MAX; expected.len()];
    for (pos, name) in header.iter().enumerate() {
        let slot = expected.iter().position(|c| *c == name).ok_or_else(|| TickDataError::UnknownColumn(name.to_string()))?;
        if index[slot] != usize::MAX {
            return Err(TickDataError::DuplicateColumn(name.to_string()));
        }
        index[slot] = pos;
    }
    if let Some(slot) = index.iter().position(|&i| i == usize::MAX) {
        return Err(TickDataError::MissingColumn(expected[slot].to_string()));
    }

    let mut groups: BTreeMap<(String, NaiveDate), TickSeries> = BTreeMap::new();
    let mut report = ParseReport::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if matches!(e.kind(), csv::ErrorKind::UnequalLengths { .. }) => {
                report.rejected.push(RowError { line, message: e.to_string() });
                continue;
            }
            Err(e) => return Err(e.into()),
        }
        let line = record.position().map_or(line, |p| p.line());
        let field = |slot: usize| record.get(index[slot]).unwrap_or("");
        let parsed = parse_row(kind, &field);
        let (stock, date, rec) = match parsed {
            Ok(v) => v,
            Err(message) => {
                report.rejected.push(RowError { line, message });
                continue;
            }
        };
        let series = groups.entry((stock.clone(), date)).or_insert_with(|| TickSeries::new(stock, date));
        match rec {
            Record::Trade(t) => {
                if t.ts_ns < series.trades.last().map_or(i64::MIN, |p| p.ts_ns) && !opts.sort {
                    return Err(TickDataError::NonMonotone { line, stock: series.stock.clone(), date });
                }
                series.trades.push(t);
            }
            Record::Quote(q) => {
                if q.ts_ns < series.quotes.last().map_or(i64::MIN, |p| p.ts_ns) && !opts.sort {
                    return Err(TickDataError::NonMonotone { line, stock: series.stock.clone(), date });
                }
                if q.is_crossed() {
                    report.crossed_quotes += 1;
                }
                series.quotes.push(q);
            }
        }
    }
    for mut s in groups.into_values() {
        if opts.sort {
            s.trades.sort_by_key(|t| t.ts_ns);
            s.quotes.sort_by_key(|q| q.ts_ns);
        }
        report.series.push(s);
    }
    Ok(report)
}

fn parse_row<'a>(kind: FileKind, field: &dyn Fn(usize) -> &'a str) -> Result<(String, NaiveDate, Record), String> {
    let stock = field(0);
    if stock.is_empty() {
        return Err("empty stock".into());
    }
    let date = NaiveDate::parse_from_str(field(1), "%Y-%m-%d").map_err(|e| format!("bad date {:?}: {e}", field(1)))?;
    let ts_ns: i64 = field(2).parse().map_err(|_| format!("bad ts_ns {:?}", field(2)))?;
    let price = |slot: usize| field(slot).parse::<Price>().map_err(|e| e.to_string());
    let qty = |slot: usize, name: &str| field(slot).parse::<u64>().map_err(|_| format!("bad {name} {:?}", field(slot)));
    let rec = match kind {
        FileKind::Trades | FileKind::Labeled => {
            let iso = match field(5) {
                "1" | "true" | "TRUE" | "True" => true,
                "0" | "false" | "FALSE" | "False" => false,
                other => return Err(format!("bad iso flag {other:?}")),
            };
            let venue = match field(6).as_bytes() {
                [c] if c.is_ascii_graphic() => *c,
                _ => return Err(format!("bad venue {:?}", field(6))),
            };
            let profile = if kind == FileKind::Labeled {
                Some(LiquidityProfile::parse(field(7)).ok_or_else(|| format!("bad profile {:?}", field(7)))?)
            } else {
                None
            };
            let t = Trade { ts_ns, price: price(3)?, size: qty(4, "size")?, iso, venue, profile };
            if !t.is_valid() {
                return Err("trade violates price > 0, size > 0 or timestamp range".into());
            }
            Record::Trade(t)
        }
        FileKind::Quotes => {
            let q = Quote { ts_ns, bid: price(3)?, bid_sz: qty(4, "bid_sz")?, ask: price(5)?, ask_sz: qty(6, "ask_sz")? };
            if !q.is_valid() {
                return Err("quote violates bid > 0, ask > 0 or timestamp range".into());
            }
            Record::Quote(q)
        }
    };
    Ok((stock.to_string(), date, rec))
}

/// Combines trade-only and quote-only series sharing (stock, date) keys.
pub fn merge_series(trades: Vec<TickSeries>, quotes: Vec<TickSeries>) -> Vec<TickSeries> {
    let mut map: BTreeMap<(String, NaiveDate), TickSeries> = BTreeMap::new();
    for s in trades.into_iter().chain(quotes) {
        let entry = map.entry((s.stock.clone(), s.date)).or_insert_with(|| TickSeries::new(s.stock.clone(), s.date));
        entry.trades.extend(s.trades);
        entry.quotes.extend(s.quotes);
    }
    map.into_values().collect()
}

pub fn write_trades_csv<W: Write>(w: W, series: &[TickSeries], labeled: bool) -> Result<(), TickDataError> {
    let kind = if labeled { FileKind::Labeled } else { FileKind::Trades };
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(kind.columns())?;
    for s in series {
        let date = s.date.format("%Y-%m-%d").to_string();
        for t in &s.trades {
            let venue = (t.venue as char).to_string();
            let mut rec = vec![s.stock.clone(), date.clone(), t.ts_ns.to_string(), t.price.to_string(), t.size.to_string(), if t.iso { "1" } else { "0" }.to_string(), venue];
            if labeled {
                let p = t.profile.ok_or_else(|| TickDataError::MissingProfile { stock: s.stock.clone(), date: s.date })?;
                rec.push(p.as_str().to_string());
            }
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush().map_err(|source| TickDataError::Io { path: "<writer>".into(), source })?;
    Ok(())
}

pub fn write_quotes_csv<W: Write>(w: W, series: &[TickSeries]) -> Result<(), TickDataError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FileKind::Quotes.columns())?;
    for s in series {
        let date = s.date.format("%Y-%m-%d").to_string();
        for q in &s.quotes {
            wtr.write_record([
                s.stock.as_str(),
                date.as_str(),
                &q.ts_ns.to_string(),
                &q.bid.to_string(),
                &q.bid_sz.to_string(),
                &q.ask.to_string(),
                &q.ask_sz.to_string(),
            ])?;
        }
    }
    wtr.flush().map_err(|source| TickDataError::Io { path: "<writer>".into(), source })?;
    Ok(())
}

/// `stock,date,intensity,depth,volatility,pi_d,pi_s` for the generator's
/// latent states.
pub fn write_latent_csv<W: Write>(w: W, rows: &[(&TickSeries, &LatentState)]) -> Result<(), TickDataError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["stock", "date", "intensity", "depth", "volatility", "pi_d", "pi_s"])?;
    for (s, l) in rows {
        wtr.write_record([
            s.stock.clone(),
            s.date.format("%Y-%m-%d").to_string(),
            l.intensity.to_string(),
            l.depth.to_string(),
            l.volatility.to_string(),
            l.pi_d.to_string(),
            l.pi_s.to_string(),
        ])?;
    }
    wtr.flush().map_err(|source| TickDataError::Io { path: "<writer>".into(), source })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, kind: FileKind, sort: bool) -> Result<ParseReport, TickDataError> {
        parse_tick_reader(text.as_bytes(), kind, ParseOptions { sort })
    }

    #[test]
    fn single_trade_row() {
        let r = parse("stock,date,ts_ns,price,size,iso,venue\nAAPL,2010-01-04,34200000000000,210.50,100,1,Q\n", FileKind::Trades, false).unwrap();
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.rejected_count(), 0);
        let t = r.series[0].trades[0];
        assert!(t.iso);
        assert_eq!(t.price, Price::from_micros(210_500_000));
        assert_eq!(t.size, 100);
        assert_eq!(t.venue, b'Q');
        assert_eq!(t.ts_ns, 34_200_000_000_000);
        assert_eq!(r.series[0].stock, "AAPL");
    }

    #[test]
    fn empty_file_with_header() {
        let r = parse("stock,date,ts_ns,bid,bid_sz,ask,ask_sz\n", FileKind::Quotes, false).unwrap();
        assert!(r.series.is_empty());
        assert_eq!(r.rejected_count(), 0);
    }

    #[test]
    fn non_monotone_is_rejected_unless_sorting() {
        let text = "stock,date,ts_ns,price,size,iso,venue\nX,2010-01-04,3,1.00,1,0,Q\nX,2010-01-04,1,1.00,1,0,Q\nX,2010-01-04,2,1.00,1,0,Q\n";
        let err = parse(text, FileKind::Trades, false).unwrap_err();
        assert_eq!(err.to_string().split(' ').take(4).collect::<Vec<_>>().join(" "), "non-monotone at line 3");
        let r = parse(text, FileKind::Trades, true).unwrap();
        let ts: Vec<i64> = r.series[0].trades.iter().map(|t| t.ts_ns).collect();
        assert_eq!(ts, vec![1, 2, 3]);
    }

    #[test]
    fn interleaved_groups_are_checked_independently() {
        let text = "stock,date,ts_ns,price,size,iso,venue\nX,2010-01-04,5,1.00,1,0,Q\nY,2010-01-04,1,1.00,1,0,Q\nX,2010-01-04,6,1.00,1,0,Q\n";
        let r = parse(text, FileKind::Trades, false).unwrap();
        assert_eq!(r.series.len(), 2);
        assert_eq!(r.series[0].stock, "X");
    }

    #[test]
    fn schema_errors_are_fatal() {
        assert!(matches!(parse("stock,date,ts_ns,price,size,iso,venue,colour\n", FileKind::Trades, false), Err(TickDataError::UnknownColumn(c)) if c == "colour"));
        assert!(matches!(parse("stock,date,ts_ns,price,size,iso\n", FileKind::Trades, false), Err(TickDataError::MissingColumn(c)) if c == "venue"));
    }

    #[test]
    fn malformed_rows_are_counted_with_line_numbers() {
        let text = "stock,date,ts_ns,price,size,iso,venue,profile\nX,2010-01-04,1,1.00,1,0,Q,HH\nX,2010-01-04,2,abc,1,0,Q,HH\nX,2010-01-04,3,1.00,0,0,Q,HH\nX,2010-01-04,4,1.00,1,0,Q,XX\nX,2010-01-04,5,1.00,1,0,Q,NN\n";
        let r = parse(text, FileKind::Labeled, false).unwrap();
        assert_eq!(r.series[0].trades.len(), 2);
        let lines: Vec<u64> = r.rejected.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
    }

    #[test]
    fn crossed_quotes_are_kept_and_counted() {
        let r = parse("stock,date,ts_ns,bid,bid_sz,ask,ask_sz\nX,2010-01-04,1,10.02,100,10.01,100\n", FileKind::Quotes, false).unwrap();
        assert_eq!(r.crossed_quotes, 1);
        assert_eq!(r.series[0].quotes.len(), 1);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "stock,date,ts_ns,price,size,iso,venue,profile\nA,2010-01-04,10,20.0032,300,1,D,HN\nA,2010-01-04,10,20.01,5,0,Q,NN\nB,2010-01-05,7,3.50,100,0,Z,NH\n";
        let r = parse(text, FileKind::Labeled, false).unwrap();
        let mut out = Vec::new();
        write_trades_csv(&mut out, &r.series, true).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), text);
        let again = parse_tick_reader(out.as_slice(), FileKind::Labeled, ParseOptions::default()).unwrap();
        assert_eq!(again.series, r.series);
    }
}
