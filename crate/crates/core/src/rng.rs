//! Seeded randomness.
//!
//! Every stochastic routine in the crate draws from [`ChaCha8Rng`] seeded
//! with [`rng_from_seed`]. Independent samples of a sweep use the sub-seed
//! `master_seed + sample_index` (wrapping), see [`split_seed`]. Because each
//! sample owns its generator, results do not depend on evaluation order or
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type NetRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> NetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of sample `index` derived from `master`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8).map(|_| 0).scan(rng_from_seed(42), |r, _: u64| Some(r.random())).collect();
        let b: Vec<u64> = (0..8).map(|_| 0).scan(rng_from_seed(42), |r, _: u64| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_eq!(split_seed(u64::MAX, 1), 0);
    }
}
