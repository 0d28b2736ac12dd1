//! Seeded randomness. Everything random in the crate draws from ChaCha20
//! seeded through [`seeded_rng`], so results reproduce across platforms.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A uniformly random permutation of `0..n`.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(seed));
    order
}

/// `k` distinct indices from `0..n`, ascending.
pub fn sample_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut picked = index::sample(&mut seeded_rng(seed), n, k).into_vec();
    picked.sort_unstable();
    picked
}
