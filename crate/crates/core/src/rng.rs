//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`HdRng`], a ChaCha8 stream
//! seeded from a single `u64`. ChaCha output is specified independently of
//! platform and of `rand` releases, so experiment outputs are reproducible
//! byte for byte. Independent sub-streams (one per trial, per sweep point, per
//! time tick) are keyed with [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type HdRng = ChaCha8Rng;

/// Creates the crate's generator from a 64-bit seed.
pub fn seeded(seed: u64) -> HdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a list of tags into a child seed.
///
/// Distinct tag lists give statistically independent streams; the same list
/// always gives the same seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        assert_ne!(derive_seed(7, &[1]), derive_seed(8, &[1]));
    }

    #[test]
    fn seeded_streams_repeat() {
        let (mut a, mut b) = (seeded(3), seeded(3));
        for _ in 0..4 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }
}
