use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{FeatureName, StockDayFeatures, N_FEATURES};
use crate::matrix::Matrix;
use crate::tickdata::TargetPair;

pub const TARGET_NAMES: [&str; 2] = ["hft_d", "hft_s"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowKey {
    pub stock: String,
    pub date: NaiveDate,
}

/// A stock-day before assembly: features may be missing, targets optional.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub key: RowKey,
    pub features: StockDayFeatures,
    pub targets: Option<TargetPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssemblyMode {
    /// Rows need complete features and targets.
    Training,
    /// Rows need complete features; targets are ignored.
    Prediction,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AssemblyReport {
    pub input_rows: usize,
    pub kept: usize,
    pub dropped_missing_features: usize,
    pub dropped_missing_targets: usize,
}

impl AssemblyReport {
    pub fn dropped(&self) -> usize {
        self.dropped_missing_features + self.dropped_missing_targets
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("every row was dropped for missing values ({0} input rows)")]
    AllRowsDropped(usize),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("features header mismatch: {0}")]
    Schema(String),
    #[error("line {line}: bad value {value:?} in column {column}")]
    BadCell { line: u64, column: String, value: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix has no target columns")]
    NoTargets,
}

/// Short stable digest of an ordered column list.
pub fn schema_fingerprint<S: AsRef<str>>(columns: &[S]) -> String {
    let mut h = Sha256::new();
    for c in columns {
        h.update(c.as_ref().as_bytes());
        h.update([0x1f]);
    }
    let digest = h.finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Complete rows ready for learning: `x` is `n × p`, `y` is `n × t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub keys: Vec<RowKey>,
    pub columns: Vec<String>,
    pub x: Matrix,
    pub target_names: Vec<String>,
    pub y: Option<Matrix>,
}

impl FeatureMatrix {
    pub fn new(keys: Vec<RowKey>, columns: Vec<String>, x: Matrix, target_names: Vec<String>, y: Option<Matrix>) -> Result<Self, FeatureError> {
        if x.rows() != keys.len() || x.cols() != columns.len() {
            return Err(FeatureError::Shape(format!("{} keys / {} columns vs {}x{} values", keys.len(), columns.len(), x.rows(), x.cols())));
        }
        if let Some(y) = &y {
            if y.rows() != x.rows() || y.cols() != target_names.len() {
                return Err(FeatureError::Shape("targets do not align with rows or names".into()));
            }
        }
        Ok(FeatureMatrix { keys, columns, x, target_names, y })
    }

    /// Unkeyed matrix with synthetic row keys; handy for tests and teachers.
    pub fn from_arrays(columns: Vec<String>, x: Matrix, target_names: Vec<String>, y: Option<Matrix>) -> Result<Self, FeatureError> {
        let epoch = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let keys = (0..x.rows()).map(|i| RowKey { stock: format!("R{i}"), date: epoch }).collect();
        Self::new(keys, columns, x, target_names, y)
    }

    pub fn n_rows(&self) -> usize {
        self.x.rows()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn fingerprint(&self) -> String {
        schema_fingerprint(&self.columns)
    }

    pub fn targets(&self) -> Result<&Matrix, FeatureError> {
        self.y.as_ref().ok_or(FeatureError::NoTargets)
    }

    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            keys: idx.iter().map(|&i| self.keys[i].clone()).collect(),
            columns: self.columns.clone(),
            x: self.x.select_rows(idx),
            target_names: self.target_names.clone(),
            y: self.y.as_ref().map(|y| y.select_rows(idx)),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Drops incomplete rows and lays out the fixed 24-column schema.
pub fn assemble_feature_matrix(rows: &[FeatureRow], mode: AssemblyMode) -> Result<(FeatureMatrix, AssemblyReport), FeatureError> {
    let mut report = AssemblyReport { input_rows: rows.len(), ..Default::default() };
    let mut keys = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in rows {
        if !r.features.is_complete() {
            report.dropped_missing_features += 1;
            continue;
        }
        let targets = match (mode, r.targets) {
            (AssemblyMode::Training, Some(t)) if t.hft_d.is_finite() && t.hft_s.is_finite() => Some(t),
            (AssemblyMode::Training, _) => {
                report.dropped_missing_targets += 1;
                continue;
            }
            (AssemblyMode::Prediction, _) => None,
        };
        keys.push(r.key.clone());
        xs.extend(r.features.values.iter().map(|v| v.expect("complete row")));
        if let Some(t) = targets {
            ys.extend([t.hft_d, t.hft_s]);
        }
    }
    report.kept = keys.len();
    if report.kept == 0 {
        return Err(FeatureError::AllRowsDropped(rows.len()));
    }
    let n = keys.len();
    let y = (mode == AssemblyMode::Training).then(|| Matrix::from_row_major(n, 2, ys));
    let m = FeatureMatrix::new(
        keys,
        FeatureName::column_names(),
        Matrix::from_row_major(n, N_FEATURES, xs),
        TARGET_NAMES.iter().map(|s| s.to_string()).collect(),
        y,
    )?;
    Ok((m, report))
}

fn feature_header(with_targets: bool) -> Vec<String> {
    let mut h = vec!["stock".to_string(), "date".to_string()];
    h.extend(FeatureName::column_names());
    if with_targets {
        h.extend(TARGET_NAMES.iter().map(|s| s.to_string()));
    }
    h
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `stock,date,<24 features>[,hft_d,hft_s]`, empty cells for missing values.
pub fn write_features_csv<W: Write>(w: W, rows: &[FeatureRow], with_targets: bool) -> Result<(), FeatureError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(feature_header(with_targets))?;
    for r in rows {
        let mut rec = vec![r.key.stock.clone(), r.key.date.format("%Y-%m-%d").to_string()];
        rec.extend(r.features.values.iter().map(|v| fmt_opt(*v)));
        if with_targets {
            rec.push(fmt_opt(r.targets.map(|t| t.hft_d)));
            rec.push(fmt_opt(r.targets.map(|t| t.hft_s)));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|source| FeatureError::Io { path: "<writer>".into(), source })
}

/// Writes an assembled matrix in the same column layout.
pub fn write_matrix_csv<W: Write>(w: W, m: &FeatureMatrix) -> Result<(), FeatureError> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["stock".to_string(), "date".to_string()];
    header.extend(m.columns.iter().cloned());
    if m.y.is_some() {
        header.extend(m.target_names.iter().cloned());
    }
    wtr.write_record(&header)?;
    for i in 0..m.n_rows() {
        let mut rec = vec![m.keys[i].stock.clone(), m.keys[i].date.format("%Y-%m-%d").to_string()];
        rec.extend(m.x.row(i).iter().map(|v| v.to_string()));
        if let Some(y) = &m.y {
            rec.extend(y.row(i).iter().map(|v| v.to_string()));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|source| FeatureError::Io { path: "<writer>".into(), source })
}

/// Reads `features.csv`; target columns are optional but must come as a pair.
pub fn read_features_csv<R: Read>(r: R) -> Result<Vec<FeatureRow>, FeatureError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let with_targets = if header == feature_header(true) {
        true
    } else if header == feature_header(false) {
        false
    } else {
        return Err(FeatureError::Schema(format!("expected stock,date,<24 features in fixed order>[,hft_d,hft_s], got {}", header.join(","))));
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |i: usize| -> Result<Option<f64>, FeatureError> {
            let s = rec.get(i).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>()
                .ok()
                .filter(|v| !v.is_nan())
                .map(Some)
                .ok_or_else(|| FeatureError::BadCell { line, column: header[i].clone(), value: s.to_string() })
        };
        let date_s = rec.get(1).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_s, "%Y-%m-%d")
            .map_err(|_| FeatureError::BadCell { line, column: "date".into(), value: date_s.to_string() })?;
        let mut features = StockDayFeatures::default();
        for k in 0..N_FEATURES {
            features.values[k] = cell(2 + k)?;
        }
        let targets = if with_targets {
            match (cell(2 + N_FEATURES)?, cell(3 + N_FEATURES)?) {
                (Some(d), Some(s)) => Some(TargetPair { hft_d: d, hft_s: s }),
                _ => None,
            }
        } else {
            None
        };
        rows.push(FeatureRow { key: RowKey { stock: rec.get(0).unwrap_or("").to_string(), date }, features, targets });
    }
    Ok(rows)
}
