use hftml_core::panelmetrics::{
    abnormal_returns, demean_columns, did_estimate, event_study, jump_ratio, log_price_instrument, panel_ols, two_sls, winsorize,
    AbnormalReturns, DidRow, EventObs, PanelError, PanelRow, PanelSpec,
};
use hftml_core::rng::stream;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

fn normal(r: &mut impl Rng) -> f64 {
    StandardNormal.sample(r)
}

/// Unbalanced panel: each (entity, time) cell kept with probability 0.8.
fn random_panel(seed: u64, n_e: usize, n_t: usize, k: usize) -> Vec<PanelRow> {
    let mut r = stream(seed, &[]);
    let fe_e: Vec<f64> = (0..n_e).map(|_| normal(&mut r)).collect();
    let fe_t: Vec<f64> = (0..n_t).map(|_| normal(&mut r)).collect();
    let mut rows = Vec::new();
    for e in 0..n_e {
        for t in 0..n_t {
            if r.random::<f64>() > 0.8 && !(e == 0 || t == 0) {
                continue;
            }
            let x: Vec<f64> = (0..k).map(|j| normal(&mut r) + 0.5 * fe_e[e] * (j as f64 - 0.5) + 0.3 * fe_t[t]).collect();
            let y = x.iter().enumerate().map(|(j, v)| (j as f64 + 1.0) * 0.7 * v).sum::<f64>() + 2.0 * fe_e[e] - fe_t[t] + 0.5 * normal(&mut r);
            rows.push(PanelRow::new(format!("e{e}"), format!("t{t}"), y, x));
        }
    }
    rows
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|j| format!("x{j}")).collect()
}

fn ids(rows: &[PanelRow], f: impl Fn(&PanelRow) -> &str) -> (Vec<usize>, usize) {
    let mut seen: Vec<String> = Vec::new();
    let idx = rows
        .iter()
        .map(|r| match seen.iter().position(|s| s == f(r)) {
            Some(i) => i,
            None => {
                seen.push(f(r).to_string());
                seen.len() - 1
            }
        })
        .collect();
    (idx, seen.len())
}

/// Least squares with explicit entity dummies and time dummies (first dropped).
fn lsdv(rows: &[PanelRow], k: usize) -> Vec<f64> {
    let (e, ne) = ids(rows, |r| &r.entity);
    let (t, nt) = ids(rows, |r| &r.time);
    let p = k + ne + nt - 1;
    let x = DMatrix::from_fn(rows.len(), p, |i, j| {
        if j < k {
            rows[i].x[j]
        } else if j < k + ne {
            f64::from(u8::from(e[i] == j - k))
        } else {
            f64::from(u8::from(t[i] == j - k - ne + 1))
        }
    });
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.y));
    let beta = x.svd(true, true).solve(&y, 1e-14).unwrap();
    beta.iter().take(k).copied().collect()
}

#[test]
fn two_way_fe_matches_lsdv_on_twenty_panels() {
    for seed in 0..20 {
        let k = 1 + (seed as usize % 3);
        let rows = random_panel(seed, 6 + seed as usize % 5, 5 + seed as usize % 4, k);
        let fit = panel_ols(&rows, &names(k), &PanelSpec::TWO_WAY).unwrap();
        let oracle = lsdv(&rows, k);
        for j in 0..k {
            assert!((fit.coef[j] - oracle[j]).abs() < 1e-8, "panel {seed} coef {j}: {} vs {}", fit.coef[j], oracle[j]);
        }
    }
}

/// `(X'X)^{-1}` by Gauss–Jordan elimination.
fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().enumerate().map(|(i, r)| r.iter().cloned().chain((0..n).map(|j| f64::from(u8::from(i == j)))).collect()).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        m[c].iter_mut().for_each(|v| *v /= d);
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                let row_c = m[c].clone();
                m[i].iter_mut().zip(&row_c).for_each(|(v, w)| *v -= f * w);
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// One-way cluster sandwich with the G/(G−1)·(N−1)/(N−K) factor, by loops.
fn sandwich(x: &[Vec<f64>], e: &[f64], groups: &[String]) -> Vec<Vec<f64>> {
    let (n, k) = (x.len(), x[0].len());
    let xtx: Vec<Vec<f64>> = (0..k).map(|a| (0..k).map(|b| (0..n).map(|i| x[i][a] * x[i][b]).sum()).collect()).collect();
    let bread = invert(&xtx);
    let mut labels: Vec<&String> = groups.iter().collect();
    labels.sort();
    labels.dedup();
    let mut meat = vec![vec![0.0; k]; k];
    for g in &labels {
        let s: Vec<f64> = (0..k).map(|a| (0..n).filter(|&i| &groups[i] == *g).map(|i| x[i][a] * e[i]).sum()).collect();
        for a in 0..k {
            for b in 0..k {
                meat[a][b] += s[a] * s[b];
            }
        }
    }
    let gc = labels.len() as f64;
    let c = gc / (gc - 1.0) * (n as f64 - 1.0) / (n - k) as f64;
    (0..k)
        .map(|a| (0..k).map(|b| c * (0..k).map(|i| (0..k).map(|j| bread[a][i] * meat[i][j] * bread[j][b]).sum::<f64>()).sum::<f64>()).collect())
        .collect()
}

#[test]
fn double_clustered_covariance_matches_direct_formula() {
    let rows = random_panel(77, 12, 10, 2);
    let spec = PanelSpec { entity_fe: false, time_fe: false, cluster_entity: true, cluster_time: true };
    let fit = panel_ols(&rows, &names(2), &spec).unwrap();
    let x: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.x[0], r.x[1], 1.0]).collect();
    let xtx: Vec<Vec<f64>> = (0..3).map(|a| (0..3).map(|b| x.iter().map(|r| r[a] * r[b]).sum()).collect()).collect();
    let xty: Vec<f64> = (0..3).map(|a| x.iter().zip(&rows).map(|(r, p)| r[a] * p.y).sum()).collect();
    let inv = invert(&xtx);
    let beta: Vec<f64> = (0..3).map(|a| (0..3).map(|b| inv[a][b] * xty[b]).sum()).collect();
    for j in 0..3 {
        assert!((fit.coef[j] - beta[j]).abs() < 1e-10);
    }
    let e: Vec<f64> = x.iter().zip(&rows).map(|(r, p)| p.y - (0..3).map(|a| r[a] * beta[a]).sum::<f64>()).collect();
    let ent: Vec<String> = rows.iter().map(|r| r.entity.clone()).collect();
    let tim: Vec<String> = rows.iter().map(|r| r.time.clone()).collect();
    let cell: Vec<String> = rows.iter().map(|r| format!("{}|{}", r.entity, r.time)).collect();
    let (ve, vt, vh) = (sandwich(&x, &e, &ent), sandwich(&x, &e, &tim), sandwich(&x, &e, &cell));
    assert!(!fit.psd_repaired);
    for a in 0..3 {
        for b in 0..3 {
            let v = ve[a][b] + vt[a][b] - vh[a][b];
            assert!((fit.cov[a][b] - v).abs() <= 1e-10 * v.abs().max(1e-6), "cov[{a}][{b}] {} vs {v}", fit.cov[a][b]);
        }
    }
    assert_eq!(fit.df, 9.0);
}

#[test]
fn demeaned_columns_have_zero_group_means_and_orthogonal_residuals() {
    let rows = random_panel(5, 15, 12, 2);
    let (e, ne) = ids(&rows, |r| &r.entity);
    let (t, nt) = ids(&rows, |r| &r.time);
    let mut cols = vec![rows.iter().map(|r| r.y).collect::<Vec<_>>(), rows.iter().map(|r| r.x[0]).collect(), rows.iter().map(|r| r.x[1]).collect()];
    let sweeps = demean_columns(&mut cols, Some((&e, ne)), Some((&t, nt))).unwrap();
    assert!(sweeps > 1, "unbalanced panels need several sweeps");
    for col in &cols {
        for (g, n) in [(&e, ne), (&t, nt)] {
            for k in 0..n {
                let v: Vec<f64> = col.iter().zip(g.iter()).filter(|(_, &gi)| gi == k).map(|(v, _)| *v).collect();
                assert!((v.iter().sum::<f64>() / v.len() as f64).abs() < 1e-8);
            }
        }
    }
    let fit = panel_ols(&rows, &names(2), &PanelSpec::TWO_WAY).unwrap();
    let resid: Vec<f64> = (0..rows.len()).map(|i| cols[0][i] - fit.coef[0] * cols[1][i] - fit.coef[1] * cols[2][i]).collect();
    for c in &cols[1..] {
        assert!(c.iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>().abs() < 1e-8);
    }
}

fn did_panel(seed: u64, effect: f64, noise: f64, n_e: usize, n_t: usize) -> Vec<DidRow> {
    let mut r = stream(seed, &[]);
    let fe_e: Vec<f64> = (0..n_e).map(|_| 0.1 * normal(&mut r)).collect();
    let fe_t: Vec<f64> = (0..n_t).map(|_| 0.05 * normal(&mut r)).collect();
    let mut rows = Vec::new();
    for e in 0..n_e {
        for t in 0..n_t {
            let (treated, post) = (e % 2 == 0, t >= n_t / 2);
            let c = normal(&mut r);
            let y = 0.3 + fe_e[e] + fe_t[t] + 0.02 * c + if treated && post { effect } else { 0.0 } + noise * normal(&mut r);
            rows.push(DidRow { entity: format!("e{e}"), time: format!("t{t}"), y, treated, post, controls: vec![c] });
        }
    }
    rows
}

#[test]
fn did_recovers_effect_without_noise() {
    let rows = did_panel(1, -0.008, 0.0, 20, 16);
    let fit = did_estimate(&rows, &["c".into()]).unwrap();
    assert!((fit.coef[0] + 0.008).abs() < 1e-10);
}

#[test]
fn did_is_invariant_to_absorbed_shifts() {
    let rows = did_panel(2, -0.008, 0.01, 20, 16);
    let base = did_estimate(&rows, &["c".into()]).unwrap().coef[0];
    let shifted: Vec<DidRow> = rows
        .iter()
        .map(|r| {
            let e: f64 = r.entity[1..].parse().unwrap();
            let t: f64 = r.time[1..].parse().unwrap();
            DidRow { y: r.y + 3.0 * e.sin() - 0.7 * t * t, ..r.clone() }
        })
        .collect();
    let moved = did_estimate(&shifted, &["c".into()]).unwrap().coef[0];
    assert!((base - moved).abs() < 1e-8);
}

#[test]
fn did_size_under_the_null() {
    let rejections = (0..200u64)
        .filter(|&s| did_estimate(&did_panel(1000 + s, 0.0, 0.01, 40, 30), &["c".into()]).unwrap().t[0].abs() >= 2.58)
        .count();
    assert!(rejections <= 10, "{rejections} of 200 rejections at 1%");
}

#[test]
fn iv_with_itself_as_instrument_is_ols() {
    let rows = random_panel(8, 10, 8, 2);
    for spec in [PanelSpec::TWO_WAY, PanelSpec::POOLED] {
        let ols = panel_ols(&rows, &names(2), &spec).unwrap();
        let iv = two_sls(&rows, &names(2), "x0", "x0", &spec).unwrap().second_stage;
        for (a, b) in ols.coef.iter().zip(&iv.coef) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in ols.se.iter().zip(&iv.se) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn three_point_iv_matches_closed_form() {
    let (x, z, y) = ([1.0, 2.0, 4.0], [1.0, 3.0, 2.0], [2.0, 3.0, 7.0]);
    let rows: Vec<PanelRow> = (0..3).map(|i| PanelRow::new(format!("e{i}"), format!("t{i}"), y[i], vec![x[i], z[i]])).collect();
    let iv = two_sls(&rows, &["x".into(), "z".into()], "x", "z", &PanelSpec::POOLED).unwrap();
    let m = |v: &[f64; 3]| v.iter().sum::<f64>() / 3.0;
    let dm = |v: &[f64; 3]| v.map(|a| a - m(v));
    let (xd, zd, yd) = (dm(&x), dm(&z), dm(&y));
    let closed = (0..3).map(|i| zd[i] * yd[i]).sum::<f64>() / (0..3).map(|i| zd[i] * xd[i]).sum::<f64>();
    assert!((iv.second_stage.coefficient("x").unwrap() - closed).abs() < 1e-12);
}

#[test]
fn orthogonal_instrument_is_weak() {
    let x = [1.0, -1.0, 1.0, -1.0, 2.0, -2.0];
    let z = [1.0, 1.0, -1.0, -1.0, 0.0, 0.0];
    let rows: Vec<PanelRow> = (0..6).map(|i| PanelRow::new(format!("e{i}"), format!("t{i}"), x[i] + 0.1 * i as f64, vec![x[i], z[i]])).collect();
    let r = two_sls(&rows, &["x".into(), "z".into()], "x", "z", &PanelSpec::POOLED);
    assert!(matches!(r, Err(PanelError::WeakInstrument(_))));
}

#[test]
fn market_model_beta_sampling() {
    let sd = 0.01;
    let noise = Normal::new(0.0, sd).unwrap();
    let mut within = 0;
    let mut sum = 0.0;
    for s in 0..200u64 {
        let mut r = stream(s, &[7]);
        let market: Vec<f64> = (0..253).map(|_| noise.sample(&mut r)).collect();
        let stock: Vec<f64> = market.iter().map(|m| 0.0005 + 1.2 * m + noise.sample(&mut r)).collect();
        let ar = abnormal_returns(&stock, &market, 252, (-252, -1), (0, 0), 60).unwrap();
        assert_eq!(ar.n_estimation, 252);
        sum += ar.beta;
        within += usize::from((ar.beta - 1.2).abs() <= 0.1);
    }
    // se(beta) = 1/sqrt(252), so |error| <= 0.1 has probability 0.886
    assert!((sum / 200.0 - 1.2).abs() < 0.015);
    assert!((160..=192).contains(&within), "{within} of 200 within 0.1");
}

#[test]
fn announcement_bump_is_detected() {
    let noise = Normal::new(0.0, 0.005).unwrap();
    let mut r = stream(3, &[]);
    let obs: Vec<EventObs> = (0..500)
        .flat_map(|ev| (-10..=10).map(move |d| (ev, d)))
        .map(|(event, rel_day)| EventObs { event, rel_day, value: 0.3 + if (0..=2).contains(&rel_day) { 0.01 } else { 0.0 } + noise.sample(&mut r) })
        .collect();
    let st = event_study(&obs, 10, 10).unwrap();
    assert!(st.p < 0.01 && st.difference > 0.0);
    assert_eq!(st.path.len(), 21);
    let flat: Vec<EventObs> = obs.iter().map(|o| EventObs { value: 0.3, ..*o }).collect();
    let st = event_study(&flat, 10, 10).unwrap();
    assert_eq!((st.difference, st.t), (0.0, 0.0));
}

#[test]
fn log_price_cases() {
    let mut prices = vec![f64::NAN; 60];
    prices[10] = 10.0;
    prices[20] = 30.0;
    assert!((log_price_instrument(&prices, 50, (-42, -22), 1).unwrap() - 20f64.ln()).abs() < 1e-15);
    assert!(log_price_instrument(&prices, 50, (-42, -22), 10).is_err());
    assert!(log_price_instrument(&vec![f64::NAN; 60], 50, (-42, -22), 1).is_err());
    assert!((log_price_instrument(&vec![12.5; 60], 50, (-42, -22), 10).unwrap() - 12.5f64.ln()).abs() < 1e-15);
}

#[test]
fn winsorize_order_statistics() {
    let v: Vec<f64> = (1..=100).map(f64::from).collect();
    let w = winsorize(&v, 0.01).unwrap();
    assert_eq!(w[0], 2.0);
    assert_eq!(w[99], 99.0);
    assert_eq!(w[1..99], v[1..99]);
    assert_eq!(winsorize(&v, 0.0).unwrap(), v);
    assert_eq!(winsorize(&[4.0; 7], 0.2).unwrap(), vec![4.0; 7]);
}

fn ar_series(values: &[f64]) -> AbnormalReturns {
    AbnormalReturns { alpha: 0.0, beta: 1.0, n_estimation: 100, start: -21, ar: values.iter().map(|&v| Some(v)).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winsorize_is_bounded_and_idempotent(v in prop::collection::vec(-1e6f64..1e6, 1..200), p in 0.0f64..0.49) {
        let once = winsorize(&v, p).unwrap();
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        let (lo, hi) = (hftml_core::panelmetrics::quantile_sorted(&s, p), hftml_core::panelmetrics::quantile_sorted(&s, 1.0 - p));
        prop_assert!(once.iter().all(|x| *x >= lo && *x <= hi));
        prop_assert_eq!(winsorize(&once, p).unwrap(), once);
    }

    #[test]
    fn jump_is_scale_invariant(v in prop::collection::vec(-0.05f64..0.05, 23), c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0]) {
        let base = jump_ratio(&ar_series(&v), "S", "Q");
        prop_assume!(base.is_ok());
        let scaled = jump_ratio(&ar_series(&v.iter().map(|a| a * c).collect::<Vec<_>>()), "S", "Q");
        prop_assume!(scaled.is_ok());
        let (a, b) = (base.unwrap().jump, scaled.unwrap().jump);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
