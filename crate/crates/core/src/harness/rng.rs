//! Seeding scheme.
//!
//! All randomness comes from `ChaCha8Rng` (rand_chacha 0.9) seeded with
//! `SeedableRng::seed_from_u64`. Normal variates use rand_distr 0.5's
//! `StandardNormal` (ziggurat). Derived seeds are produced by [`mix`], a
//! SplitMix64 finalizer over the parent seed and a stream label.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer applied to `seed + (label + 1) * golden gamma`.
pub fn mix(seed: u64, label: u64) -> u64 {
    let mut z = seed.wrapping_add(label.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_separates_streams() {
        assert_ne!(mix(1, 0), mix(1, 1));
        assert_ne!(mix(1, 0), mix(2, 0));
        assert_eq!(mix(42, 7), mix(42, 7));
    }
}
