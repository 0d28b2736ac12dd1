//! Entropy-maximizing pruning of trajectory datasets.
//!
//! Waypoints are binned onto a sparse grid ([`grid`]) and the dataset is
//! summarized by the Shannon entropy of its point-count histogram
//! ([`entropy`]). [`prune::prune_entropy`] keeps the trajectories that raise
//! that entropy the most, batch by batch, in time linear in the dataset size;
//! [`prune::prune_random`] is the uniform baseline. [`filter::StreamFilter`]
//! makes the same decision online, one record at a time.
//!
//! Entropies and divergences are reported in nats.

pub mod entropy;
pub mod error;
pub mod filter;
pub mod grid;
pub mod io;
pub mod kl;
pub mod prune;
pub mod report;
pub mod rng;
pub mod synth;
pub mod trajectory;

pub use entropy::{CellDelta, EntropyState, Histogram};
pub use error::{Error, Result};
pub use filter::{Decision, FilterOutcome, FilterPolicy, StreamFilter};
pub use grid::{cell_index, discretize, CellIndex, GridSpec};
pub use kl::{default_epsilon, kl_divergence, KlValue};
pub use prune::{prune_entropy, prune_random, retained_count, PruneParams, PruneResult};
pub use report::{evaluate, PruneReport};
pub use synth::{generate_synthetic, Category, Mix, SyntheticSpec};
pub use trajectory::{Trajectory, Waypoint};
