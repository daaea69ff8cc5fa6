//! Per-run seed derivation.
//!
//! A run's seed is a pure function of `(base_seed, scheme, P, k, run)`, so a
//! run can be replayed alone and results do not depend on how runs are
//! scheduled across threads.

use mislab_core::Scheme;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(base_seed: u64, scheme: Scheme, subsets: usize, k: usize, run: usize) -> u64 {
    [scheme.id(), subsets as u64, k as u64, run as u64]
        .into_iter()
        .fold(mix(base_seed), |h, v| mix(h ^ mix(v)))
}

pub fn run_rng(base_seed: u64, scheme: Scheme, subsets: usize, k: usize, run: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base_seed, scheme, subsets, k, run))
}
