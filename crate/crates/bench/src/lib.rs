//! Fixtures shared by the benchmarks.

use trajprune::{generate_synthetic, SyntheticSpec, Trajectory};

/// The standard imbalanced dataset (40% stationary, 50% straight, 10% turns)
/// with `count` trajectories.
pub fn imbalanced(count: usize, seed: u64) -> Vec<Trajectory> {
    generate_synthetic(&SyntheticSpec {
        count,
        seed,
        ..SyntheticSpec::default()
    })
    .expect("default synthetic spec is valid")
}
