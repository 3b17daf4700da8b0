use hftml_core::featureset::{compute_features, FeatureConfig, FeatureName, StockDayFeatures};
use hftml_core::tickdata::{synth_stock_day, SynthConfig, TickSeries};
use proptest::prelude::*;

fn day(seed: u64, stock: usize) -> TickSeries {
    let cfg = SynthConfig { n_stocks: 4, n_days: 1, seed, intensity_range: (200.0, 2000.0), ..SynthConfig::default() };
    synth_stock_day(&cfg, stock, 0).unwrap().series
}

fn features(s: &TickSeries) -> StockDayFeatures {
    compute_features(s, &FeatureConfig::default()).0
}

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300),
        (a, b) => a == b,
    }
}

const TIME_WEIGHTED: [FeatureName; 5] = [
    FeatureName::QUOTEDSPREAD_PERCENT_TW,
    FeatureName::BESTOFRDEPTH_DOLLAR_TW,
    FeatureName::BESTBIDDEPTH_DOLLAR_TW,
    FeatureName::BESTOFRDEPTH_SHARE_TW,
    FeatureName::BESTBIDDEPTH_SHARE_TW,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn splitting_a_quote_interval_changes_nothing(seed in any::<u64>(), stock in 0usize..4, pick in any::<prop::sample::Index>()) {
        let s = day(seed, stock);
        let gaps: Vec<usize> = (0..s.quotes.len().saturating_sub(1)).filter(|&i| s.quotes[i + 1].ts_ns - s.quotes[i].ts_ns >= 2).collect();
        prop_assume!(!gaps.is_empty());
        let i = gaps[pick.index(gaps.len())];
        let mut split = s.clone();
        let mut copy = s.quotes[i];
        copy.ts_ns = (s.quotes[i].ts_ns + s.quotes[i + 1].ts_ns) / 2;
        split.quotes.insert(i + 1, copy);
        let (a, b) = (features(&s), features(&split));
        for f in TIME_WEIGHTED {
            prop_assert!(close(a.get(f), b.get(f), 1e-12), "{}: {:?} vs {:?}", f.as_str(), a.get(f), b.get(f));
        }
    }

    #[test]
    fn ratios_and_concentration_are_bounded(seed in any::<u64>(), stock in 0usize..4) {
        let f = features(&day(seed, stock));
        for n in [FeatureName::BS_RATIO_VOL, FeatureName::BS_RATIO_RETAIL_VOL, FeatureName::BS_RATIO_INST20K_VOL] {
            if let Some(v) = f.get(n) {
                prop_assert!((0.0..=1.0).contains(&v), "{} = {v}", n.as_str());
            }
        }
        let h = f.get(FeatureName::HINDEX).unwrap();
        prop_assert!(h > 0.0 && h <= 1.0);
        prop_assert!(f.get(FeatureName::IVOL_Q).unwrap() >= 0.0);
    }

    #[test]
    fn doubling_sizes(seed in any::<u64>(), stock in 0usize..4) {
        let s = day(seed, stock);
        let mut d = s.clone();
        for t in &mut d.trades {
            t.size *= 2;
        }
        let (a, b) = (features(&s), features(&d));
        prop_assert!(close(a.get(FeatureName::BS_RATIO_VOL), b.get(FeatureName::BS_RATIO_VOL), 1e-12));
        prop_assert!(close(a.get(FeatureName::HINDEX), b.get(FeatureName::HINDEX), 1e-12));
        let (ta, tb) = (a.get(FeatureName::TOTAL_DOLLAR_M).unwrap(), b.get(FeatureName::TOTAL_DOLLAR_M).unwrap());
        prop_assert!((tb - 2.0 * ta).abs() <= 1e-12 * tb);
    }
}
