//! Seeded randomness. Every random choice in the crate flows from a `u64`
//! seed through ChaCha8, so outputs depend only on inputs and seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 12345;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-item seed from a global seed and an item index (splitmix64 finalizer
/// over the combined words). Stable across platforms and releases.
pub fn derive_seed(global: u64, index: u64) -> u64 {
    let mut z = global
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
