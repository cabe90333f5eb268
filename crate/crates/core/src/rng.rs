//! Seed derivation and the generator used everywhere in the toolkit.
//!
//! All randomness flows from a single `u64` seed through [`mix_seed`], so a
//! sub-stream (a noise mode, a Monte Carlo replica) can be regenerated in
//! isolation and independently of how many siblings exist.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` from a parent seed.
///
/// `mix_seed(seed, k) = splitmix64(splitmix64(seed) ^ splitmix64(k + 0x5EED))`.
/// The function is part of the reproducibility contract and must not change.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5EED)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
