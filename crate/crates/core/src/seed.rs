//! Deterministic seed derivation for reproducible parallel Monte Carlo.
//!
//! A [`SeedPolicy`] maps `(master_seed, replicate_index)` to a 64-bit stream
//! seed by a pure function, and each replicate owns a ChaCha8 stream built
//! from its seed. Results are therefore independent of scheduling order and
//! of how many worker threads run.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Weyl increment of SplitMix64 (the golden-ratio constant).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output mix. Bijective on `u64`.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream derivation: one master seed, one stream per replicate index.
///
/// `stream_seed(i) = splitmix64(master + (i + 1) * GOLDEN_GAMMA)`. The offset
/// map `i -> (i + 1) * GOLDEN_GAMMA` is injective mod 2^64 (odd multiplier)
/// and splitmix64 is a bijection, so distinct replicate indices always get
/// distinct stream seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPolicy {
    master_seed: u64,
}

impl SeedPolicy {
    pub fn new(master_seed: u64) -> Self {
        SeedPolicy { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Pure derivation of the stream seed for a replicate.
    pub fn stream_seed(&self, replicate: u64) -> u64 {
        splitmix64(
            self.master_seed
                .wrapping_add(replicate.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Fresh generator for a replicate's stream.
    pub fn stream_rng(&self, replicate: u64) -> ChaCha8Rng {
        rng_from_seed(self.stream_seed(replicate))
    }
}

/// The one RNG constructor used everywhere: ChaCha8 keyed from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;
    use std::collections::HashSet;

    /// Reference outputs pinned so a dependency upgrade that changes the
    /// stream is caught loudly. SplitMix64 values match the published
    /// reference sequence for seed 0.
    #[test]
    fn splitmix64_reference_sequence() {
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(GOLDEN_GAMMA), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(
            splitmix64(GOLDEN_GAMMA.wrapping_mul(2)),
            0x06C4_5D18_8009_454F
        );
    }

    #[test]
    fn chacha8_reference_sequence() {
        let mut rng = rng_from_seed(42);
        let got: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
        assert_eq!(
            got,
            vec![
                12578764544318200737,
                17529487244874322312,
                7886285670807131020,
                11572758976476374866,
            ]
        );
    }

    #[test]
    fn stream_seeds_distinct_and_pure() {
        let policy = SeedPolicy::new(0xDEADBEEF);
        let mut seen = HashSet::new();
        for i in 0..10_000u64 {
            assert!(seen.insert(policy.stream_seed(i)));
            assert_eq!(policy.stream_seed(i), policy.stream_seed(i));
        }
    }

    #[test]
    fn different_masters_give_different_streams() {
        let a = SeedPolicy::new(1).stream_seed(0);
        let b = SeedPolicy::new(2).stream_seed(0);
        assert_ne!(a, b);
    }
}
