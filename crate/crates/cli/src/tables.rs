//! Small CSV formats owned by the CLI: targets, predictions, DiD panels and
//! generic numeric tables.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use anyhow::{anyhow, bail, Context};
use hftml_core::featureset::RowKey;
use hftml_core::panelmetrics::DidRow;
use hftml_core::{Matrix, TargetPair};

fn parse_date(s: &str, line: u64) -> anyhow::Result<chrono::NaiveDate> {
    chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| anyhow!("line {line}: bad date {s:?}"))
}

fn parse_num(s: &str, line: u64, col: &str) -> anyhow::Result<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| anyhow!("line {line}: bad number {s:?} in column {col}"))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// `stock,date,hft_d,hft_s`.
pub fn write_targets<W: Write>(w: W, rows: &[(RowKey, TargetPair)]) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["stock", "date", "hft_d", "hft_s"])?;
    for (k, t) in rows {
        wtr.write_record([k.stock.clone(), k.date.to_string(), t.hft_d.to_string(), t.hft_s.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_targets<R: Read>(r: R) -> anyhow::Result<BTreeMap<RowKey, TargetPair>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["stock", "date", "hft_d", "hft_s"] {
        bail!("targets header must be stock,date,hft_d,hft_s");
    }
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let key = RowKey { stock: rec[0].to_string(), date: parse_date(&rec[1], line)? };
        let t = TargetPair { hft_d: parse_num(&rec[2], line, "hft_d")?, hft_s: parse_num(&rec[3], line, "hft_s")? };
        if out.insert(key, t).is_some() {
            bail!("line {line}: duplicate (stock, date)");
        }
    }
    Ok(out)
}

/// `stock,date,<target names>`.
pub fn write_predictions<W: Write>(w: W, keys: &[RowKey], names: &[String], pred: &Matrix) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["stock".to_string(), "date".to_string()];
    header.extend(names.iter().cloned());
    wtr.write_record(&header)?;
    for (i, k) in keys.iter().enumerate() {
        let mut rec = vec![k.stock.clone(), k.date.to_string()];
        rec.extend(pred.row(i).iter().map(|v| v.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

fn parse_flag(s: &str, line: u64, col: &str) -> anyhow::Result<bool> {
    match s {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => bail!("line {line}: column {col} must be 0/1, got {s:?}"),
    }
}

/// `entity,time,y,treated,post,<controls...>`.
pub fn read_did<R: Read>(r: R) -> anyhow::Result<(Vec<DidRow>, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 5 || header[..5] != ["entity", "time", "y", "treated", "post"] {
        bail!("DiD header must start with entity,time,y,treated,post");
    }
    let controls = header[5..].to_vec();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        rows.push(DidRow {
            entity: rec[0].to_string(),
            time: rec[1].to_string(),
            y: parse_num(&rec[2], line, "y")?,
            treated: parse_flag(&rec[3], line, "treated")?,
            post: parse_flag(&rec[4], line, "post")?,
            controls: (5..header.len()).map(|i| parse_num(&rec[i], line, &header[i])).collect::<anyhow::Result<_>>()?,
        });
    }
    if rows.is_empty() {
        bail!("DiD panel has no rows");
    }
    Ok((rows, controls))
}

/// Any CSV held as strings, for column-wise numeric operations.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read<R: Read>(r: R) -> anyhow::Result<Table> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header = rdr.headers()?.iter().map(str::to_string).collect();
        let rows = rdr.records().collect::<Result<Vec<_>, _>>()?;
        Ok(Table { header, rows })
    }

    pub fn column_index(&self, name: &str) -> anyhow::Result<usize> {
        self.header.iter().position(|h| h == name).with_context(|| format!("no column named {name}"))
    }

    pub fn numeric(&self, col: usize) -> anyhow::Result<Vec<f64>> {
        self.rows.iter().map(|r| parse_num(r.get(col).unwrap_or(""), line_of(r), &self.header[col])).collect()
    }

    pub fn is_numeric(&self, col: usize) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.get(col).and_then(|s| s.parse::<f64>().ok()).is_some_and(f64::is_finite))
    }

    pub fn write<W: Write>(&self, w: W, replaced: &BTreeMap<usize, Vec<f64>>) -> anyhow::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.header)?;
        for (i, r) in self.rows.iter().enumerate() {
            let rec: Vec<String> = (0..r.len()).map(|j| replaced.get(&j).map_or_else(|| r[j].to_string(), |v| v[i].to_string())).collect();
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
