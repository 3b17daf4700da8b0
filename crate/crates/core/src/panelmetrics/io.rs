//! CSV inputs of the econometric commands.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::NaiveDate;

use super::panel::PanelRow;
use super::PanelError;

fn parse_f64(s: &str, line: u64, col: &str) -> Result<f64, PanelError> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| PanelError::Row { line, message: format!("bad number {s:?} in column {col}") })
}

fn parse_date(s: &str, line: u64) -> Result<NaiveDate, PanelError> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|_| PanelError::Row { line, message: format!("bad date {s:?}") })
}

/// Reads `entity,time,y,<regressors...>,cluster_entity,cluster_time`.
/// The cluster columns are optional and default to the entity and time ids.
pub fn read_panel_csv<R: Read>(r: R) -> Result<(Vec<PanelRow>, Vec<String>), PanelError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 3 || header[0] != "entity" || header[1] != "time" || header[2] != "y" {
        return Err(PanelError::Spec("panel header must start with entity,time,y".into()));
    }
    let ce = header.iter().position(|h| h == "cluster_entity");
    let ct = header.iter().position(|h| h == "cluster_time");
    let reg: Vec<usize> = (3..header.len()).filter(|&i| Some(i) != ce && Some(i) != ct).collect();
    let names = reg.iter().map(|&i| header[i].clone()).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |i: usize| rec.get(i).unwrap_or("").to_string();
        let x = reg.iter().map(|&i| parse_f64(&get(i), line, &header[i])).collect::<Result<Vec<_>, _>>()?;
        rows.push(PanelRow {
            entity: get(0),
            time: get(1),
            y: parse_f64(&get(2), line, "y")?,
            x,
            cluster_entity: ce.map_or_else(|| get(0), get),
            cluster_time: ct.map_or_else(|| get(1), get),
        });
    }
    if rows.is_empty() {
        return Err(PanelError::Empty);
    }
    Ok((rows, names))
}

/// Per-stock daily series sorted by date.
pub type DailySeries = BTreeMap<String, Vec<(NaiveDate, f64)>>;

/// Reads `stock,date,<value column>` into per-stock date-sorted series.
pub fn read_daily_csv<R: Read>(r: R, value_column: &str) -> Result<DailySeries, PanelError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| PanelError::Spec(format!("missing column {name}")));
    let (is, id, iv) = (col("stock")?, col("date")?, col(value_column)?);
    let mut out: DailySeries = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let date = parse_date(rec.get(id).unwrap_or(""), line)?;
        let v = parse_f64(rec.get(iv).unwrap_or(""), line, value_column)?;
        out.entry(rec.get(is).unwrap_or("").to_string()).or_default().push((date, v));
    }
    for (stock, s) in out.iter_mut() {
        s.sort_by_key(|p| p.0);
        if s.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(PanelError::Spec(format!("duplicate dates for {stock}")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub stock: String,
    pub event_date: NaiveDate,
    pub kind: String,
}

/// Reads `stock,event_date,kind`.
pub fn read_events_csv<R: Read>(r: R) -> Result<Vec<EventRecord>, PanelError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 || header[0] != "stock" || header[1] != "event_date" {
        return Err(PanelError::Spec("events header must be stock,event_date[,kind]".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push(EventRecord {
            stock: rec.get(0).unwrap_or("").to_string(),
            event_date: parse_date(rec.get(1).unwrap_or(""), line)?,
            kind: rec.get(2).unwrap_or("").to_string(),
        });
    }
    Ok(out)
}

/// Position of the first trading day on or after `date`.
pub fn event_position(series: &[(NaiveDate, f64)], date: NaiveDate) -> Option<usize> {
    let i = series.partition_point(|p| p.0 < date);
    (i < series.len()).then_some(i)
}
