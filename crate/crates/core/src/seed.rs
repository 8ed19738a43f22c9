//! Seed derivation.
//!
//! Every random choice in the crate is driven by a `u64` seed. Trial `i` of an
//! experiment with master seed `m` uses `mix_seed(m, i)`, where `mix_seed` is the
//! splitmix64 output function applied to `m + (i + 1) * 0x9E3779B97F4A7C15`
//! (wrapping). Sub-streams inside a trial (key generation, attacker coins,
//! sampler-oracle draws) are derived the same way from the trial seed with the
//! fixed stream tags below, so two estimators that share a master seed see the
//! same per-trial samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub const STREAM_KEYGEN: u64 = 0x4B45_5947_454E;
pub const STREAM_ATTACKER: u64 = 0x4154_5441_434B;
pub const STREAM_SAMPLER_ORACLE: u64 = 0x5341_4D50_4C45;
pub const STREAM_SIGNATURE: u64 = 0x5349_474E;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference splitmix64 generator seeded with 0.
        assert_eq!(mix_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn distinct_indices_give_distinct_seeds() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000 {
            assert!(seen.insert(mix_seed(42, i)));
        }
    }
}
