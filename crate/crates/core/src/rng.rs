//! Seed plumbing. Every stochastic component takes a `u64` seed and derives
//! independent sub-streams from it so that runs are reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type HarpRng = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed for sub-stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix(seed ^ mix(stream.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng_from_seed(seed: u64) -> HarpRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn child_rng(seed: u64, stream: u64) -> HarpRng {
    rng_from_seed(derive_seed(seed, stream))
}
