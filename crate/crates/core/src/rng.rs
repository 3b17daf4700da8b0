//! Deterministic random streams.
//!
//! Every stochastic component draws from a [`ChaCha8Rng`] whose seed is
//! derived from a parent seed and a path of stream indices, e.g.
//! `(seed, stock, day)` for the market generator or `(seed, tree, node)` for
//! tree growth. Derivation folds each index into the seed with the SplitMix64
//! finalizer, so a stream depends only on its path and never on the order in
//! which sibling streams were consumed or on the worker thread that ran it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `index` under `seed`.
#[inline]
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(GOLDEN).rotate_left(17))
}

/// Folds a whole path of indices into `seed`.
pub fn path_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &i| child_seed(s, i))
}

/// Generator for the stream at `path` below `seed`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(path_seed(seed, path))
}
