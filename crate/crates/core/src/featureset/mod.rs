//! The 24 daily microstructure features and the feature matrix.
//!
//! All inputs are restricted to the configured session before any feature
//! is computed. Spreads are expressed in percent (`0.35` means 0.35%), dollar
//! quantities in USD, depths in shares or USD, returns as log returns.
//!
//! Missing values are explicit: a feature whose defining subset is empty is
//! `None`, and [`assemble_feature_matrix`] drops such rows.

pub mod activity;
pub mod dynamics;
pub mod imbalance;
pub mod matching;
mod matrix;
mod names;
pub mod spread;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use matching::{classify_lee_ready, match_prevailing_quotes, sign_trades, MatchOutput, MatchedTrade, Side, TickTest};
pub use matrix::{
    assemble_feature_matrix, read_features_csv, write_features_csv, write_matrix_csv, AssemblyMode, AssemblyReport,
    schema_fingerprint, FeatureError, FeatureMatrix, FeatureRow, RowKey, TARGET_NAMES,
};
pub use names::{FeatureName, N_FEATURES};

use crate::tickdata::{Quote, Session, TickSeries, NS_PER_SEC};

/// Tunable conventions. The defaults are the documented ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub session: Session,
    /// Venue code whose sub-penny prints are treated as retail.
    pub retail_venue: u8,
    /// Remainders strictly inside `(0, retail_sell_max_micros)` are retail sells.
    pub retail_sell_max_micros: i64,
    /// Remainders strictly inside `(retail_buy_min_micros, 10_000)` are retail buys.
    pub retail_buy_min_micros: i64,
    /// Trades strictly above this dollar value are institutional.
    pub institutional_cutoff: f64,
    /// Horizon for the realized spread / price impact midquote.
    pub impact_horizon_ns: i64,
    pub impact_bucket_secs: usize,
    pub hindex_bucket_secs: usize,
    pub var_short_secs: usize,
    pub var_long_secs: usize,
    /// A trailing partial bucket is used when at least this long.
    pub min_partial_bucket_secs: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            session: Session::REGULAR,
            retail_venue: b'D',
            retail_sell_max_micros: 4_000,
            retail_buy_min_micros: 6_000,
            institutional_cutoff: 20_000.0,
            impact_horizon_ns: 300 * NS_PER_SEC,
            impact_bucket_secs: 300,
            hindex_bucket_secs: 1_800,
            var_short_secs: 60,
            var_long_secs: 300,
            min_partial_bucket_secs: 60,
        }
    }
}

/// The 24 values for one stock-day, `None` where undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StockDayFeatures {
    pub values: [Option<f64>; N_FEATURES],
}

impl StockDayFeatures {
    #[inline]
    pub fn get(&self, f: FeatureName) -> Option<f64> {
        self.values[f.index()]
    }

    #[inline]
    pub fn set(&mut self, f: FeatureName, v: Option<f64>) {
        self.values[f.index()] = v;
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn missing(&self) -> impl Iterator<Item = FeatureName> + '_ {
        FeatureName::ALL.into_iter().filter(|f| self.get(*f).is_none())
    }
}

/// Per-day tallies of trades that could not contribute to every feature.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// In-session trades before the first in-session quote.
    pub excluded_before_first_quote: usize,
    /// Matched trades the Lee–Ready rule could not sign.
    pub unclassified: usize,
    /// Matched trades without a five-minute-ahead midquote.
    pub missing_mid_plus_5min: usize,
}

/// Each quote with its lifetime in ns: until the next quote, the last one
/// until `close_ns`.
pub fn quote_lifetimes(quotes: &[Quote], close_ns: i64) -> impl Iterator<Item = (&Quote, i64)> {
    quotes.iter().enumerate().map(move |(i, q)| {
        let end = quotes.get(i + 1).map_or(close_ns, |n| n.ts_ns.min(close_ns));
        (q, (end - q.ts_ns).max(0))
    })
}

/// All 24 features for one stock-day.
pub fn compute_features(series: &TickSeries, cfg: &FeatureConfig) -> (StockDayFeatures, Diagnostics) {
    use FeatureName::*;
    let close = cfg.session.close_ns;
    let (trades, quotes) = series.session_slices(&cfg.session);
    let m = match_prevailing_quotes(trades, quotes, close, cfg.impact_horizon_ns);
    let sides = sign_trades(trades, &m.matched);
    let diag = Diagnostics {
        excluded_before_first_quote: m.excluded,
        unclassified: sides.iter().filter(|s| s.is_none()).count(),
        missing_mid_plus_5min: m.matched.iter().filter(|t| t.mid_plus_5min.is_none()).count(),
    };

    let act = activity::depth_and_activity_features(trades, quotes, close);
    let spr = spread::spread_features(&m.matched, &sides, quotes, close);
    let imb = imbalance::imbalance_features(trades, &m.matched, &sides, cfg);
    let dynm = dynamics::price_dynamics_features(quotes, trades, &m.matched, &sides, cfg);

    let mut f = StockDayFeatures::default();
    f.set(AVG_PRICE_M, act.avg_price);
    f.set(RET_MKT_M, act.ret_open_close);
    f.set(TOTAL_TRADE, Some(act.total_trade));
    f.set(NBOQTY_BEFORE_CLOSE, act.nbo_qty_before_close);
    f.set(NBBQTY_BEFORE_CLOSE, act.nbb_qty_before_close);
    f.set(TOTAL_DOLLAR_M, act.total_dollar);
    f.set(ISO_DOLLAR, act.iso_dollar);
    f.set(QUOTEDSPREAD_PERCENT_TW, spr.quoted_spread_tw);
    f.set(BESTOFRDEPTH_DOLLAR_TW, act.ofr_depth_dollar_tw);
    f.set(BESTBIDDEPTH_DOLLAR_TW, act.bid_depth_dollar_tw);
    f.set(BESTOFRDEPTH_SHARE_TW, act.ofr_depth_share_tw);
    f.set(BESTBIDDEPTH_SHARE_TW, act.bid_depth_share_tw);
    f.set(EFFECTIVESPREAD_PERCENT_DW, spr.effective_spread_dw);
    f.set(PERCENTREALIZEDSPREAD_LR_DW, spr.realized_spread_dw);
    f.set(PERCENTPRICEIMPACT_LR_DW, spr.price_impact_dw);
    f.set(BS_RATIO_VOL, imb.bs_ratio_vol);
    f.set(TSIGNSQRTDVOL1, dynm.lambda);
    f.set(IVOL_Q, dynm.ivol);
    f.set(HINDEX, dynm.hindex);
    f.set(VAR_RATIO3, dynm.var_ratio);
    f.set(TOTAL_DV_RETAIL, Some(imb.retail_dollar));
    f.set(BS_RATIO_RETAIL_VOL, imb.retail_bs_ratio);
    f.set(TOTAL_DV_INST20K, Some(imb.inst_dollar));
    f.set(BS_RATIO_INST20K_VOL, imb.inst_bs_ratio);
    if trades.is_empty() {
        // no in-session prints: the subset dollar totals are undefined too
        f.set(TOTAL_DV_RETAIL, None);
        f.set(TOTAL_DV_INST20K, None);
    }
    (f, diag)
}

/// Features for many stock-days in parallel; output order follows input.
pub fn compute_features_batch(series: &[TickSeries], cfg: &FeatureConfig) -> Vec<(StockDayFeatures, Diagnostics)> {
    series.par_iter().map(|s| compute_features(s, cfg)).collect()
}
