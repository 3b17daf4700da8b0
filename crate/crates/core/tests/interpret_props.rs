use hftml_core::forest::TreeNode;
use hftml_core::interpret::{feature_importance, partial_dependence};
use hftml_core::rng::stream;
use hftml_core::{Ensemble, EnsembleParams, Matrix, Method};
use proptest::prelude::*;
use rand::Rng;

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Targets depend on feature 0 only.
fn one_informative(n: usize, p: usize, seed: u64) -> (Matrix, Matrix) {
    let mut r = stream(seed, &[]);
    let x = Matrix::from_row_major(n, p, (0..n * p).map(|_| r.random_range(0.0..1.0)).collect());
    let y = Matrix::from_rows(
        &(0..n)
            .map(|i| {
                let v = x.get(i, 0);
                [f64::from(u8::from(v > 0.5)) + 0.3 * v, (3.0 * v).sin()]
            })
            .collect::<Vec<_>>(),
    );
    (x, y)
}

fn fit(x: &Matrix, y: &Matrix, params: &EnsembleParams) -> Ensemble {
    Ensemble::fit_arrays(x, y, &names("f", x.cols()), &names("t", y.cols()), params).unwrap()
}

#[test]
fn importance_concentrates_on_the_informative_feature() {
    let (x, y) = one_informative(2000, 6, 1);
    let e = fit(&x, &y, &EnsembleParams { n_trees: 50, min_split_samples: 5, seed: 2, ..EnsembleParams::default() });
    let imp = feature_importance(&e);
    assert!((imp.mean.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(imp.mean[0] > 0.9, "{:?}", imp.mean);
    assert_eq!(imp.n_trees_used, 50);
}

#[test]
fn importance_ignores_row_duplication() {
    let (x, y) = one_informative(300, 4, 3);
    let dup = |m: &Matrix| Matrix::from_rows(&m.iter_rows().chain(m.iter_rows()).collect::<Vec<_>>());
    let params = EnsembleParams { n_trees: 20, min_split_samples: 2, method: Method::Extra, seed: 4, ..EnsembleParams::default() };
    let a = feature_importance(&fit(&x, &y, &params));
    let b = feature_importance(&fit(&dup(&x), &dup(&y), &params));
    for (u, v) in a.mean.iter().zip(&b.mean) {
        assert!((u - v).abs() < 1e-9, "{:?} vs {:?}", a.mean, b.mean);
    }
}

#[test]
fn ignored_feature_has_flat_dependence() {
    let (x, _) = one_informative(500, 3, 5);
    let step: Vec<[f64; 2]> = (0..x.rows()).map(|i| if x.get(i, 0) > 0.5 { [0.8, 0.3] } else { [0.2, 0.6] }).collect();
    let y = Matrix::from_rows(&step);
    let params = EnsembleParams { n_trees: 30, method: Method::Forest, k_features: Some(3), seed: 6, ..EnsembleParams::default() };
    let e = fit(&x, &y, &params);
    let used = |j: usize| e.trees().any(|t| t.nodes().iter().any(|n| matches!(n, TreeNode::Internal { feature, .. } if *feature == j)));
    assert!(used(0) && !used(1) && !used(2));
    for j in 1..3 {
        let c = partial_dependence(&e, &x, j, 20, None).unwrap();
        for t in 0..2 {
            let v: Vec<f64> = c.response.iter().map(|r| r[t]).collect();
            let range = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(range < 1e-9);
        }
    }
    let c = partial_dependence(&e, &x, 0, 20, None).unwrap();
    assert!(c.response[19][0] - c.response[0][0] > 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn single_point_pdp_is_overwritten_mean(seed in any::<u64>(), j in 0usize..3) {
        let (x, y) = one_informative(120, 3, seed);
        let e = fit(&x, &y, &EnsembleParams { n_trees: 10, seed, ..EnsembleParams::default() });
        let c = partial_dependence(&e, &x, j, 1, None).unwrap();
        prop_assert_eq!(c.grid.len(), 1);
        let mut xs = x.clone();
        for i in 0..xs.rows() {
            xs.set(i, j, c.grid[0]);
        }
        let p = e.predict_matrix(&xs).unwrap();
        for t in 0..2 {
            let mean = p.column(t).iter().sum::<f64>() / p.rows() as f64;
            prop_assert!((c.response[0][t] - mean).abs() < 1e-12);
        }
    }
}

