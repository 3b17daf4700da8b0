use serde::{Deserialize, Serialize};

use super::Trade;

/// Share-weighted fractions of volume with an HFT on the demanding side
/// (`hft_d`) and on the supplying side (`hft_s`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetPair {
    pub hft_d: f64,
    pub hft_s: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TargetError {
    #[error("no trades; targets undefined")]
    NoTrades,
    #[error("trade {index} carries no liquidity profile")]
    Unlabeled { index: usize },
}

/// `hft_d = (HH + HN) / total`, `hft_s = (HH + NH) / total`, in shares.
pub fn compute_targets(trades: &[Trade]) -> Result<TargetPair, TargetError> {
    let mut total: u128 = 0;
    let mut demand: u128 = 0;
    let mut supply: u128 = 0;
    for (index, t) in trades.iter().enumerate() {
        let profile = t.profile.ok_or(TargetError::Unlabeled { index })?;
        let sz = u128::from(t.size);
        total += sz;
        if profile.demander_is_hft() {
            demand += sz;
        }
        if profile.supplier_is_hft() {
            supply += sz;
        }
    }
    if total == 0 {
        return Err(TargetError::NoTrades);
    }
    Ok(TargetPair { hft_d: demand as f64 / total as f64, hft_s: supply as f64 / total as f64 })
}
