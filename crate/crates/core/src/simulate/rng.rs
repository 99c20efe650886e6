//! Counter-based seed derivation.
//!
//! Replication `r` of a run seeded with `s` draws from its own generator
//! seeded with `derive(s, r)`, so no stream depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer of `seed + (index + 1)·γ`.
///
/// For a fixed seed the map is a bijection of `index` (odd multiplier, then
/// an invertible mixer), so distinct indices never collide.
pub fn derive(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(rep_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rep_seed)
}
