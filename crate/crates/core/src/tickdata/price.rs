use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A non-negative USD amount stored as an integer number of micro-dollars.
///
/// Six fraction digits cover every price the CSV schema admits, so parsing
/// and formatting round-trip exactly and sub-penny remainders are integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Price(i64);

/// Micro-dollars per dollar.
pub const MICROS_PER_DOLLAR: i64 = 1_000_000;
/// Micro-dollars per cent.
pub const MICROS_PER_CENT: i64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid price {0:?}")]
pub struct PriceParseError(pub String);

impl Price {
    pub const fn from_micros(micros: i64) -> Self {
        Price(micros)
    }

    pub const fn from_cents(cents: i64) -> Self {
        Price(cents * MICROS_PER_CENT)
    }

    /// Rounds `dollars` to the nearest micro-dollar.
    pub fn from_dollars(dollars: f64) -> Self {
        Price((dollars * MICROS_PER_DOLLAR as f64).round() as i64)
    }

    #[inline]
    pub const fn micros(self) -> i64 {
        self.0
    }

    #[inline]
    pub fn dollars(self) -> f64 {
        self.0 as f64 / MICROS_PER_DOLLAR as f64
    }

    /// Remainder of the price modulo one cent, in micro-dollars.
    #[inline]
    pub const fn subpenny_micros(self) -> i64 {
        self.0.rem_euclid(MICROS_PER_CENT)
    }
}

impl FromStr for Price {
    type Err = PriceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PriceParseError(s.to_string());
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() || frac_part.len() > 6 {
            return Err(err());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        if s.ends_with('.') {
            return Err(err());
        }
        let whole: i64 = int_part.parse().map_err(|_| err())?;
        let mut frac: i64 = 0;
        for (i, b) in frac_part.bytes().enumerate() {
            frac += i64::from(b - b'0') * 10i64.pow(5 - i as u32);
        }
        whole
            .checked_mul(MICROS_PER_DOLLAR)
            .and_then(|w| w.checked_add(frac))
            .map(Price)
            .ok_or_else(err)
    }
}

impl fmt::Display for Price {
    /// Canonical form: at least two and at most six fraction digits,
    /// trailing zeros beyond the second trimmed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / MICROS_PER_DOLLAR as u64;
        let frac = abs % MICROS_PER_DOLLAR as u64;
        let mut digits = format!("{frac:06}");
        while digits.len() > 2 && digits.ends_with('0') {
            digits.pop();
        }
        write!(f, "{sign}{whole}.{digits}")
    }
}
