//! Synthetic labeled markets.
//!
//! Each stock-day has a latent state (trade intensity, top-of-book depth,
//! volatility). The probability that a trade's aggressor is an HFT (`pi_d`)
//! and that its resting side is an HFT (`pi_s`) are logistic functions of the
//! standardized latent state, and the labels in turn shape observable flow
//! (trade sizes, ISO usage, quote activity, spread width, midprice jumps), so
//! the map from tick-derived features to targets is smooth, nonlinear and
//! learnable.
//!
//! Streams: stock-level draws come from `(seed, 0, stock)` and day-level draws
//! from `(seed, 1, stock, day)`, so any (stock, day) can be regenerated alone.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LiquidityProfile, Price, Quote, Session, TickSeries, Trade, MICROS_PER_CENT};
use crate::rng;

/// `intercept + Σ slope·z + interaction·z_intensity·z_volatility`, squashed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticLink {
    pub intercept: f64,
    pub intensity: f64,
    pub depth: f64,
    pub volatility: f64,
    pub interaction: f64,
}

impl LogisticLink {
    /// A link that ignores the latent state and always yields `p`.
    pub fn constant(p: f64) -> Self {
        LogisticLink { intercept: (p / (1.0 - p)).ln(), intensity: 0.0, depth: 0.0, volatility: 0.0, interaction: 0.0 }
    }

    pub fn probability(&self, z_intensity: f64, z_depth: f64, z_volatility: f64) -> f64 {
        let eta = self.intercept
            + self.intensity * z_intensity
            + self.depth * z_depth
            + self.volatility * z_volatility
            + self.interaction * z_intensity * z_volatility;
        1.0 / (1.0 + (-eta).exp())
    }

    fn is_finite(&self) -> bool {
        [self.intercept, self.intensity, self.depth, self.volatility, self.interaction].iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_stocks: usize,
    pub n_days: usize,
    pub seed: u64,
    /// First calendar date; days advance over weekdays only.
    pub start_date: NaiveDate,
    /// Stock base midprice range in USD, drawn log-uniformly.
    pub price_range: (f64, f64),
    /// Daily standard deviation of the log midprice.
    pub volatility_range: (f64, f64),
    /// Expected trades per day, drawn log-uniformly.
    pub intensity_range: (f64, f64),
    /// Mean top-of-book size in shares, drawn log-uniformly.
    pub depth_range: (f64, f64),
    /// Mean NBBO updates per trade (scaled up by supply-side HFT presence).
    pub quotes_per_trade: f64,
    /// Expected midprice jumps per day at 1% volatility.
    pub jumps_per_day: f64,
    pub link_d: LogisticLink,
    pub link_s: LogisticLink,
    /// Share of non-HFT aggressive trades routed as sub-penny retail prints.
    pub retail_share: f64,
    /// Share of trades sized above the institutional dollar cutoff.
    pub institutional_share: f64,
    /// Share of trades printed at the midpoint.
    pub midpoint_share: f64,
    /// Day-to-day dispersion of the latent state around the stock's level.
    pub day_jitter: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_stocks: 10,
            n_days: 20,
            seed: 0,
            start_date: NaiveDate::from_ymd_opt(2009, 1, 5).expect("valid date"),
            price_range: (5.0, 150.0),
            volatility_range: (0.004, 0.04),
            intensity_range: (400.0, 6000.0),
            depth_range: (200.0, 5000.0),
            quotes_per_trade: 3.0,
            jumps_per_day: 6.0,
            link_d: LogisticLink { intercept: -0.7, intensity: 0.9, depth: -0.5, volatility: 0.6, interaction: 0.8 },
            link_s: LogisticLink { intercept: -1.2, intensity: 0.5, depth: 0.8, volatility: -0.7, interaction: 0.6 },
            retail_share: 0.1,
            institutional_share: 0.02,
            midpoint_share: 0.08,
            day_jitter: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid synthetic market config: {0}")]
pub struct SynthConfigError(pub String);

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthConfigError> {
        let bad = |m: &str| Err(SynthConfigError(m.to_string()));
        if self.n_stocks == 0 || self.n_days == 0 {
            return bad("n_stocks and n_days must be positive");
        }
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        for (name, r, strictly_positive) in [
            ("price_range", self.price_range, true),
            ("volatility_range", self.volatility_range, false),
            ("intensity_range", self.intensity_range, true),
            ("depth_range", self.depth_range, true),
        ] {
            if !range_ok(r) {
                return bad(&format!("{name} must be finite with lo <= hi"));
            }
            if strictly_positive && r.0 <= 0.0 || r.0 < 0.0 {
                return bad(&format!("{name} must be {}", if strictly_positive { "> 0" } else { ">= 0" }));
            }
        }
        if !(self.quotes_per_trade > 0.0 && self.quotes_per_trade.is_finite()) {
            return bad("quotes_per_trade must be > 0");
        }
        if !(self.jumps_per_day >= 0.0 && self.jumps_per_day.is_finite()) {
            return bad("jumps_per_day must be >= 0");
        }
        if !self.link_d.is_finite() || !self.link_s.is_finite() {
            return bad("link coefficients must be finite");
        }
        for (name, v) in [
            ("retail_share", self.retail_share),
            ("institutional_share", self.institutional_share),
            ("midpoint_share", self.midpoint_share),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if !(self.day_jitter >= 0.0 && self.day_jitter.is_finite()) {
            return bad("day_jitter must be >= 0");
        }
        Ok(())
    }

    /// Trading dates, skipping weekends.
    pub fn dates(&self) -> Vec<NaiveDate> {
        let mut out = Vec::with_capacity(self.n_days);
        let mut d = self.start_date;
        while out.len() < self.n_days {
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                out.push(d);
            }
            d += Duration::days(1);
        }
        out
    }

    pub fn stock_symbol(index: usize) -> String {
        format!("SYN{index:04}")
    }
}

/// The day's hidden state and the HFT propensities it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentState {
    pub intensity: f64,
    pub depth: f64,
    pub volatility: f64,
    pub z_intensity: f64,
    pub z_depth: f64,
    pub z_volatility: f64,
    pub pi_d: f64,
    pub pi_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDay {
    pub series: TickSeries,
    pub latent: LatentState,
}

/// Generates every (stock, day) in `(stock, date)` order.
pub fn synth_market(config: &SynthConfig) -> Result<Vec<SynthDay>, SynthConfigError> {
    config.validate()?;
    let dates = config.dates();
    let jobs: Vec<(usize, usize)> = (0..config.n_stocks).flat_map(|s| (0..config.n_days).map(move |d| (s, d))).collect();
    Ok(jobs.into_par_iter().map(|(s, d)| generate_day(config, s, d, dates[d])).collect())
}

/// Regenerates a single stock-day; identical to the matching element of
/// [`synth_market`].
pub fn synth_stock_day(config: &SynthConfig, stock: usize, day: usize) -> Result<SynthDay, SynthConfigError> {
    config.validate()?;
    if stock >= config.n_stocks || day >= config.n_days {
        return Err(SynthConfigError(format!("stock {stock} / day {day} outside the configured grid")));
    }
    let date = config.dates()[day];
    Ok(generate_day(config, stock, day, date))
}

fn log_lerp((lo, hi): (f64, f64), u: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        (lo.ln() + u * (hi.ln() - lo.ln())).exp()
    }
}

fn lerp((lo, hi): (f64, f64), u: f64) -> f64 {
    lo + u * (hi - lo)
}

struct StockTraits {
    base_price: f64,
    level: [f64; 3],
}

fn stock_traits(config: &SynthConfig, stock: usize) -> StockTraits {
    let mut r = rng::stream(config.seed, &[0, stock as u64]);
    let base_price = log_lerp(config.price_range, r.random::<f64>());
    let level = [r.random::<f64>(), r.random::<f64>(), r.random::<f64>()];
    StockTraits { base_price, level }
}

fn generate_day(config: &SynthConfig, stock: usize, day: usize, date: NaiveDate) -> SynthDay {
    let traits = stock_traits(config, stock);
    let mut r = rng::stream(config.seed, &[1, stock as u64, day as u64]);
    let jitter = Normal::new(0.0, config.day_jitter.max(f64::MIN_POSITIVE)).expect("finite jitter");
    let mut u = [0.0; 3];
    for (k, level) in traits.level.iter().enumerate() {
        let noise = if config.day_jitter > 0.0 { jitter.sample(&mut r) } else { 0.0 };
        u[k] = (level + noise).clamp(0.0, 1.0);
    }
    let z = u.map(|v| 2.0 * v - 1.0);
    let intensity = log_lerp(config.intensity_range, u[0]);
    let depth = log_lerp(config.depth_range, u[1]);
    let volatility = lerp(config.volatility_range, u[2]);
    let pi_d = config.link_d.probability(z[0], z[1], z[2]);
    let pi_s = config.link_s.probability(z[0], z[1], z[2]);
    let latent = LatentState { intensity, depth, volatility, z_intensity: z[0], z_depth: z[1], z_volatility: z[2], pi_d, pi_s };

    let session = Session::REGULAR;
    let session_ns = session.length_ns();
    let mut series = TickSeries::new(SynthConfig::stock_symbol(stock), date);

    // Quotes: a cent-grid midprice driven by diffusion plus occasional jumps.
    let quote_rate = intensity * config.quotes_per_trade * (0.5 + pi_s);
    let n_quotes = 1 + sample_poisson(&mut r, quote_rate);
    let mut quote_times: Vec<i64> = (1..n_quotes).map(|_| session.open_ns + r.random_range(0..session_ns)).collect();
    quote_times.push(session.open_ns);
    quote_times.sort_unstable();

    let day_shift = if volatility > 0.0 { Normal::new(0.0, volatility).expect("finite").sample(&mut r) } else { 0.0 };
    let mut log_p = traits.base_price.ln() + day_shift;
    let jump_prob = (config.jumps_per_day * (volatility / 0.01) * (0.5 + pi_d) / n_quotes as f64).min(0.5);
    let widen_prob = (0.15 + 0.55 * (1.0 - pi_s) * (1.0 - 0.5 * u[1])).clamp(0.0, 0.9);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut prev_ts = session.open_ns;
    let mut jump_offset_cents: i64 = 0;
    series.quotes.reserve(quote_times.len());
    for &ts in &quote_times {
        let dt = (ts - prev_ts) as f64 / session_ns as f64;
        prev_ts = ts;
        if volatility > 0.0 {
            log_p += volatility * dt.sqrt() * std_normal.sample(&mut r);
            if r.random::<f64>() < jump_prob {
                let size = r.random_range(3..=8);
                jump_offset_cents += if r.random::<bool>() { size } else { -size };
            }
        }
        let mut half = 1i64;
        while half < 6 && r.random::<f64>() < widen_prob {
            half += 1;
        }
        let mid_cents = ((log_p.exp() * 100.0).round() as i64 + jump_offset_cents).max(half + 1);
        let size = |r: &mut rng::StreamRng| -> u64 {
            let lots = (depth / 100.0 * (0.5 * std_normal.sample(r)).exp()).round().max(1.0);
            100 * lots as u64
        };
        series.quotes.push(Quote {
            ts_ns: ts,
            bid: Price::from_cents(mid_cents - half),
            ask: Price::from_cents(mid_cents + half),
            bid_sz: size(&mut r),
            ask_sz: size(&mut r),
        });
    }

    // Trades: Poisson arrivals against the prevailing quote.
    let n_trades = sample_poisson(&mut r, intensity).max(1);
    let mut trade_times: Vec<i64> = (0..n_trades).map(|_| session.open_ns + r.random_range(0..session_ns)).collect();
    trade_times.sort_unstable();
    let buy_bias = (0.5 + 0.15 * std_normal.sample(&mut r)).clamp(0.1, 0.9);
    const VENUES: &[u8] = b"QNPZKTBD";
    let mut qi = 0usize;
    series.trades.reserve(trade_times.len());
    for &ts in &trade_times {
        while qi + 1 < series.quotes.len() && series.quotes[qi + 1].ts_ns <= ts {
            qi += 1;
        }
        let q = series.quotes[qi];
        let aggressor_hft = r.random::<f64>() < pi_d;
        let resting_hft = r.random::<f64>() < pi_s;
        let buy = r.random::<f64>() < buy_bias;
        let mut venue = VENUES[r.random_range(0..VENUES.len())];
        let price = if !aggressor_hft && r.random::<f64>() < config.retail_share {
            venue = b'D';
            let improvement = r.random_range(100..=3_900);
            if buy {
                Price::from_micros(q.ask.micros() - improvement)
            } else {
                Price::from_micros(q.bid.micros() + improvement)
            }
        } else if r.random::<f64>() < config.midpoint_share {
            if venue == b'D' {
                venue = b'Q';
            }
            Price::from_micros(q.mid_x2_micros() / 2 / MICROS_PER_CENT * MICROS_PER_CENT)
        } else if buy {
            q.ask
        } else {
            q.bid
        };
        let size = if r.random::<f64>() < config.institutional_share {
            let dollars = r.random_range(20_500.0..120_000.0);
            let lots = (dollars / price.dollars() / 100.0).ceil().max(1.0) as u64;
            100 * lots
        } else if r.random::<f64>() < 0.1 {
            r.random_range(1..100)
        } else {
            100 * (1 + geometric(&mut r, 0.35))
        };
        let iso = r.random::<f64>() < if aggressor_hft { 0.35 } else { 0.04 };
        series.trades.push(Trade {
            ts_ns: ts,
            price,
            size,
            iso,
            venue,
            profile: Some(LiquidityProfile::from_sides(aggressor_hft, resting_hft)),
        });
    }
    debug_assert!(series.is_time_ordered());
    SynthDay { series, latent }
}

fn sample_poisson(r: &mut rng::StreamRng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let p = Poisson::new(mean).expect("positive finite mean");
    p.sample(r) as usize
}

/// Number of failures before a success with probability `1 - p_continue`.
fn geometric(r: &mut rng::StreamRng, p_continue: f64) -> u64 {
    let mut k = 0;
    while k < 50 && r.random::<f64>() < p_continue {
        k += 1;
    }
    k
}
