//! Linear panel regression with absorbed fixed effects and one- or two-way
//! cluster-robust covariance.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::PanelError;

/// Largest absolute mean removed in a sweep once demeaning counts as converged.
pub const DEMEAN_TOL: f64 = 1e-10;
const DEMEAN_MAX_SWEEPS: usize = 100_000;
/// Relative singular-value floor below which the design is rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub entity: String,
    pub time: String,
    pub y: f64,
    pub x: Vec<f64>,
    pub cluster_entity: String,
    pub cluster_time: String,
}

impl PanelRow {
    /// Clusters coincide with the fixed-effect ids.
    pub fn new(entity: impl Into<String>, time: impl Into<String>, y: f64, x: Vec<f64>) -> PanelRow {
        let (entity, time) = (entity.into(), time.into());
        PanelRow { cluster_entity: entity.clone(), cluster_time: time.clone(), entity, time, y, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelSpec {
    pub entity_fe: bool,
    pub time_fe: bool,
    pub cluster_entity: bool,
    pub cluster_time: bool,
}

impl PanelSpec {
    /// Entity and time effects, clustered by entity and time.
    pub const TWO_WAY: PanelSpec = PanelSpec { entity_fe: true, time_fe: true, cluster_entity: true, cluster_time: true };
    /// Pooled OLS with an intercept and heteroskedasticity-robust errors.
    pub const POOLED: PanelSpec = PanelSpec { entity_fe: false, time_fe: false, cluster_entity: false, cluster_time: false };

    pub fn has_fe(&self) -> bool {
        self.entity_fe || self.time_fe
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub names: Vec<String>,
    pub coef: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    /// R² of the demeaned regression (centered R² without fixed effects).
    pub r2_within: f64,
    pub n_obs: usize,
    pub n_entities: usize,
    pub n_times: usize,
    pub n_clusters_entity: Option<usize>,
    pub n_clusters_time: Option<usize>,
    /// Degrees of freedom of the reference t distribution.
    pub df: f64,
    pub demean_sweeps: usize,
    /// Negative eigenvalues of the combined covariance were set to zero.
    pub psd_repaired: bool,
    pub spec: PanelSpec,
    /// First-stage partial F and partial R² of the excluded instrument (2SLS only).
    pub first_stage_f: Option<f64>,
    pub first_stage_partial_r2: Option<f64>,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.coef[i])
    }

    /// `coef ± q·se` with `q` the two-sided quantile of the reference t distribution.
    pub fn confidence_interval(&self, i: usize, level: f64) -> (f64, f64) {
        let q = StudentsT::new(0.0, 1.0, self.df).map(|d| d.inverse_cdf(0.5 + level / 2.0)).unwrap_or(f64::NAN);
        (self.coef[i] - q * self.se[i], self.coef[i] + q * self.se[i])
    }
}

fn index_ids<'a>(ids: impl Iterator<Item = &'a str>) -> (Vec<usize>, usize) {
    let mut map: HashMap<&str, usize> = HashMap::new();
    let idx = ids
        .map(|s| {
            let next = map.len();
            *map.entry(s).or_insert(next)
        })
        .collect();
    (idx, map.len())
}

/// Ids of the distinct `(a, b)` pairs, numbered by first appearance.
fn index_pairs(a: &[usize], b: &[usize]) -> (Vec<usize>, usize) {
    let mut map: HashMap<(usize, usize), usize> = HashMap::new();
    let idx = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let next = map.len();
            *map.entry((x, y)).or_insert(next)
        })
        .collect();
    (idx, map.len())
}

fn subtract_group_means(col: &mut [f64], group: &[usize], n_groups: usize, sums: &mut Vec<f64>, counts: &[f64]) -> f64 {
    sums.clear();
    sums.resize(n_groups, 0.0);
    for (v, &g) in col.iter().zip(group) {
        sums[g] += v;
    }
    let mut change = 0.0f64;
    for (s, c) in sums.iter_mut().zip(counts) {
        *s /= c;
        change = change.max(s.abs());
    }
    for (v, &g) in col.iter_mut().zip(group) {
        *v -= sums[g];
    }
    change
}

/// Alternating projections removing entity and/or time means from every
/// column. Returns the number of sweeps.
pub fn demean_columns(cols: &mut [Vec<f64>], entity: Option<(&[usize], usize)>, time: Option<(&[usize], usize)>) -> Result<usize, PanelError> {
    let counts = |g: &[usize], k: usize| {
        let mut c = vec![0.0; k];
        g.iter().for_each(|&i| c[i] += 1.0);
        c
    };
    let ce = entity.map(|(g, k)| counts(g, k));
    let ct = time.map(|(g, k)| counts(g, k));
    let mut sums = Vec::new();
    for sweep in 1..=DEMEAN_MAX_SWEEPS {
        let mut change = 0.0f64;
        for col in cols.iter_mut() {
            if let (Some((g, k)), Some(c)) = (entity, &ce) {
                change = change.max(subtract_group_means(col, g, k, &mut sums, c));
            }
            if let (Some((g, k)), Some(c)) = (time, &ct) {
                change = change.max(subtract_group_means(col, g, k, &mut sums, c));
            }
        }
        if entity.is_none() || time.is_none() || change < DEMEAN_TOL {
            return Ok(sweep);
        }
    }
    Err(PanelError::NoConvergence)
}

/// Demeaned design of a panel, ready for least squares.
pub(crate) struct Design {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
    pub entity: (Vec<usize>, usize),
    pub time: (Vec<usize>, usize),
    pub cluster_entity: (Vec<usize>, usize),
    pub cluster_time: (Vec<usize>, usize),
    pub sweeps: usize,
}

pub(crate) fn build_design(rows: &[PanelRow], names: &[String], spec: &PanelSpec) -> Result<Design, PanelError> {
    let n = rows.len();
    if n == 0 {
        return Err(PanelError::Empty);
    }
    let k = names.len();
    if rows.iter().any(|r| r.x.len() != k) {
        return Err(PanelError::Spec(format!("every row needs {k} regressors")));
    }
    if rows.iter().any(|r| !r.y.is_finite() || r.x.iter().any(|v| !v.is_finite())) {
        return Err(PanelError::NonFinite);
    }
    if rows.iter().any(|r| r.entity.is_empty() || r.time.is_empty()) {
        return Err(PanelError::Spec("empty entity or time id".into()));
    }
    let entity = index_ids(rows.iter().map(|r| r.entity.as_str()));
    let time = index_ids(rows.iter().map(|r| r.time.as_str()));
    if spec.entity_fe && spec.time_fe && (entity.1 < 2 || time.1 < 2) {
        return Err(PanelError::Spec("two-way fixed effects need at least two entities and two periods".into()));
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k + 2);
    cols.push(rows.iter().map(|r| r.y).collect());
    for j in 0..k {
        cols.push(rows.iter().map(|r| r.x[j]).collect());
    }
    let mut names = names.to_vec();
    if !spec.has_fe() {
        cols.push(vec![1.0; n]);
        names.push("const".into());
    }
    let sweeps = demean_columns(
        &mut cols,
        spec.entity_fe.then_some((entity.0.as_slice(), entity.1)),
        spec.time_fe.then_some((time.0.as_slice(), time.1)),
    )?;
    let p = cols.len() - 1;
    let x = DMatrix::from_fn(n, p, |i, j| cols[j + 1][i]);
    let y = DVector::from_vec(std::mem::take(&mut cols[0]));
    Ok(Design {
        y,
        x,
        names,
        cluster_entity: index_ids(rows.iter().map(|r| r.cluster_entity.as_str())),
        cluster_time: index_ids(rows.iter().map(|r| r.cluster_time.as_str())),
        entity,
        time,
        sweeps,
    })
}

/// `(X'X)^{-1}` after checking the design has full column rank.
pub(crate) fn bread(x: &DMatrix<f64>) -> Result<DMatrix<f64>, PanelError> {
    if x.ncols() == 0 || x.nrows() <= x.ncols() {
        return Err(PanelError::Spec(format!("need more observations ({}) than regressors ({})", x.nrows(), x.ncols())));
    }
    let sv = x.clone().svd(false, false).singular_values;
    let max = sv.max();
    if !(max > 0.0) || sv.min() <= RANK_TOL * max {
        return Err(PanelError::Collinear);
    }
    (x.transpose() * x).try_inverse().ok_or(PanelError::Collinear)
}

/// `c · B (Σ_g s_g s_g') B` with `s_g = Σ_{i∈g} x_i e_i` and
/// `c = G/(G−1)·(N−1)/(N−K)`.
pub(crate) fn cluster_sandwich(x: &DMatrix<f64>, e: &DVector<f64>, groups: &[usize], n_groups: usize, b: &DMatrix<f64>) -> Result<DMatrix<f64>, PanelError> {
    if n_groups < 2 {
        return Err(PanelError::Spec("a clustering dimension has a single cluster".into()));
    }
    let (n, k) = x.shape();
    let mut scores = DMatrix::<f64>::zeros(n_groups, k);
    for i in 0..n {
        let g = groups[i];
        for j in 0..k {
            scores[(g, j)] += x[(i, j)] * e[i];
        }
    }
    let meat = scores.transpose() * &scores;
    let g = n_groups as f64;
    let c = g / (g - 1.0) * (n as f64 - 1.0) / (n as f64 - k as f64);
    Ok(b * meat * b * c)
}

/// Truncates negative eigenvalues; returns whether any were found.
pub(crate) fn psd_repair(v: DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let sym = (&v + v.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return (sym, false);
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)));
    (&eig.eigenvectors * d * eig.eigenvectors.transpose(), true)
}

pub(crate) struct Covariance {
    pub v: DMatrix<f64>,
    pub df: f64,
    pub g_entity: Option<usize>,
    pub g_time: Option<usize>,
    pub repaired: bool,
}

pub(crate) fn covariance(d: &Design, xs: &DMatrix<f64>, e: &DVector<f64>, b: &DMatrix<f64>, spec: &PanelSpec) -> Result<Covariance, PanelError> {
    let n = xs.nrows();
    let k = xs.ncols();
    let (ge, gt) = (d.cluster_entity.1, d.cluster_time.1);
    let (v, df, repaired) = match (spec.cluster_entity, spec.cluster_time) {
        (false, false) => {
            let each: Vec<usize> = (0..n).collect();
            (cluster_sandwich(xs, e, &each, n, b)?, (n - k) as f64, false)
        }
        (true, false) => (cluster_sandwich(xs, e, &d.cluster_entity.0, ge, b)?, (ge - 1) as f64, false),
        (false, true) => (cluster_sandwich(xs, e, &d.cluster_time.0, gt, b)?, (gt - 1) as f64, false),
        (true, true) => {
            let cells = index_pairs(&d.cluster_entity.0, &d.cluster_time.0);
            let ve = cluster_sandwich(xs, e, &d.cluster_entity.0, ge, b)?;
            let vt = cluster_sandwich(xs, e, &d.cluster_time.0, gt, b)?;
            let vet = cluster_sandwich(xs, e, &cells.0, cells.1, b)?;
            let (v, rep) = psd_repair(ve + vt - vet);
            (v, (ge.min(gt) - 1) as f64, rep)
        }
    };
    Ok(Covariance {
        v,
        df,
        g_entity: spec.cluster_entity.then_some(ge),
        g_time: spec.cluster_time.then_some(gt),
        repaired,
    })
}

pub(crate) fn assemble(d: &Design, spec: &PanelSpec, beta: &DVector<f64>, cov: Covariance, y: &DVector<f64>, e: &DVector<f64>) -> FitResult {
    let k = beta.len();
    let se: Vec<f64> = (0..k).map(|i| cov.v[(i, i)].max(0.0).sqrt()).collect();
    let t: Vec<f64> = (0..k).map(|i| if se[i] > 0.0 { beta[i] / se[i] } else if beta[i] == 0.0 { 0.0 } else { f64::INFINITY.copysign(beta[i]) }).collect();
    let dist = StudentsT::new(0.0, 1.0, cov.df.max(1.0)).expect("valid t distribution");
    let p = t.iter().map(|t| 2.0 * (1.0 - dist.cdf(t.abs()))).collect();
    let ybar = if spec.has_fe() { 0.0 } else { y.mean() };
    let ss_tot: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let ss_res = e.norm_squared();
    FitResult {
        names: d.names.clone(),
        coef: beta.iter().copied().collect(),
        se,
        t,
        p,
        cov: (0..k).map(|i| (0..k).map(|j| cov.v[(i, j)]).collect()).collect(),
        r2_within: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { f64::NAN },
        n_obs: y.len(),
        n_entities: d.entity.1,
        n_times: d.time.1,
        n_clusters_entity: cov.g_entity,
        n_clusters_time: cov.g_time,
        df: cov.df,
        demean_sweeps: d.sweeps,
        psd_repaired: cov.repaired,
        spec: *spec,
        first_stage_f: None,
        first_stage_partial_r2: None,
    }
}

/// OLS of `y` on the named regressors with the requested fixed effects
/// absorbed; an intercept is added when no fixed effect is requested.
pub fn panel_ols(rows: &[PanelRow], names: &[String], spec: &PanelSpec) -> Result<FitResult, PanelError> {
    let d = build_design(rows, names, spec)?;
    let b = bread(&d.x)?;
    let beta = &b * (d.x.transpose() * &d.y);
    let e = &d.y - &d.x * &beta;
    let cov = covariance(&d, &d.x, &e, &b, spec)?;
    Ok(assemble(&d, spec, &beta, cov, &d.y, &e))
}
