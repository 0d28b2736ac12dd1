//! Entropy-maximizing batch-greedy pruning and the random baseline.
//!
//! The entropy method works in one pass over a seeded permutation of the
//! dataset:
//!
//! 1. The first `initial_size` trajectories seed the histogram and are kept.
//! 2. The remaining trajectories are consumed in batches of `batch_size`.
//!    Every candidate in a batch is scored by the entropy gain it would cause
//!    against the histogram as it stood before the batch.
//! 3. The batch is stable-sorted by gain, descending, and the best candidates
//!    are merged into the histogram.
//!
//! Each batch keeps enough candidates to bring the running total to
//! `round((1 - ratio) · processed)`, so the final subset has exactly
//! `round((1 - ratio) · n)` trajectories and the seed subset's share of the
//! budget is paid back by the first batches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{CellDelta, EntropyState};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::report::{evaluate_indices, PruneReport};
use crate::rng::{sample_indices, shuffled_indices};
use crate::trajectory::{check_unique_ids, Trajectory};

/// Lower bound of the default batch size.
pub const MIN_DEFAULT_BATCH: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneParams {
    /// Fraction of trajectories to remove, in `(0, 1)`.
    pub ratio: f64,
    pub batch_size: usize,
    pub initial_size: usize,
    pub seed: u64,
    pub grid: GridSpec,
    /// Worker threads for candidate scoring. Never changes the result.
    pub threads: usize,
    /// Probability floor for the report's KL value (0 = unsmoothed).
    pub kl_epsilon: f64,
}

impl PruneParams {
    /// Parameters with the default batch and seed-subset sizes for a
    /// dataset of `n` trajectories.
    pub fn for_dataset(n: usize, ratio: f64, seed: u64, grid: GridSpec) -> Self {
        let batch_size = default_batch_size(n);
        PruneParams {
            ratio,
            batch_size,
            initial_size: default_initial_size(n, ratio, batch_size),
            seed,
            grid,
            threads: 1,
            kl_epsilon: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_ratio(self.ratio)?;
        self.grid.validate()?;
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.initial_size == 0 {
            return Err(Error::Config(
                "initial subset size must be at least 1".into(),
            ));
        }
        if self.threads == 0 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        if !(self.kl_epsilon.is_finite() && self.kl_epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "KL epsilon must be finite and non-negative, got {}",
                self.kl_epsilon
            )));
        }
        Ok(())
    }
}

/// `max(1024, n/1000)`, capped at a quarter of the dataset so small files
/// still get several batches.
pub fn default_batch_size(n: usize) -> usize {
    MIN_DEFAULT_BATCH.max(n / 1000).min((n / 4).max(1))
}

/// One batch worth of seed trajectories, but never more than the budget.
pub fn default_initial_size(n: usize, ratio: f64, batch_size: usize) -> usize {
    batch_size.min(retained_count(n, ratio)).max(1)
}

pub fn validate_ratio(ratio: f64) -> Result<()> {
    if ratio.is_finite() && ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "pruning ratio must be in the open interval (0, 1), got {ratio}"
        )))
    }
}

/// Number of trajectories kept when removing `ratio` of `n`:
/// `round((1 - ratio) · n)`, halves rounded up.
pub fn retained_count(n: usize, ratio: f64) -> usize {
    ((1.0 - ratio) * n as f64).round() as usize
}

/// Output of a pruning run.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneResult {
    /// Retained ids in acceptance order.
    pub retained_ids: Vec<String>,
    /// Dataset positions matching `retained_ids`.
    pub retained_indices: Vec<usize>,
    /// Number of candidates whose entropy gain was evaluated.
    pub candidates_scored: usize,
    pub report: PruneReport,
}

fn check_dataset(dataset: &[Trajectory], initial: usize, ratio: f64) -> Result<usize> {
    if dataset.len() < initial {
        return Err(Error::Config(format!(
            "dataset has {} trajectories, fewer than the initial subset size {initial}",
            dataset.len()
        )));
    }
    check_unique_ids(dataset)?;
    let target = retained_count(dataset.len(), ratio);
    if initial > target {
        return Err(Error::Config(format!(
            "initial subset size {initial} exceeds the retention budget of {target} trajectories"
        )));
    }
    Ok(target)
}

/// Entropy-maximizing pruning. Deterministic given dataset order and
/// parameters, independent of `params.threads`.
pub fn prune_entropy(dataset: &[Trajectory], params: &PruneParams) -> Result<PruneResult> {
    params.validate()?;
    check_dataset(dataset, params.initial_size, params.ratio)?;
    let pool = if params.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(params.threads)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?,
        )
    } else {
        None
    };

    let grid = params.grid;
    let order = shuffled_indices(dataset.len(), params.seed);
    let (seed_part, rest) = order.split_at(params.initial_size);

    let mut state = EntropyState::build(seed_part.iter().map(|&i| &dataset[i]), &grid)?;
    let mut retained: Vec<usize> = seed_part.to_vec();
    let mut processed = seed_part.len();
    let mut scored = 0usize;

    for batch in rest.chunks(params.batch_size) {
        let (deltas, gains) = match &pool {
            Some(pool) => pool.install(|| score_parallel(dataset, batch, &grid, &state))?,
            None => score_serial(dataset, batch, &grid, &state)?,
        };
        scored += batch.len();
        processed += batch.len();

        let goal = retained_count(processed, params.ratio);
        let quota = goal.saturating_sub(retained.len()).min(batch.len());

        let mut ranking: Vec<usize> = (0..batch.len()).collect();
        // stable: ties keep shuffle order
        ranking.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
        for &j in &ranking[..quota] {
            state.apply(&deltas[j]);
            retained.push(batch[j]);
        }
    }
    debug_assert_eq!(retained.len(), retained_count(dataset.len(), params.ratio));

    finish(dataset, retained, scored, &grid, params.kl_epsilon)
}

type Scores = (Vec<CellDelta>, Vec<f64>);

fn score_serial(
    dataset: &[Trajectory],
    batch: &[usize],
    grid: &GridSpec,
    state: &EntropyState,
) -> Result<Scores> {
    let deltas = batch
        .iter()
        .map(|&i| CellDelta::from_trajectory(&dataset[i], grid))
        .collect::<Result<Vec<_>>>()?;
    let gains = deltas.iter().map(|d| state.entropy_delta(d)).collect();
    Ok((deltas, gains))
}

fn score_parallel(
    dataset: &[Trajectory],
    batch: &[usize],
    grid: &GridSpec,
    state: &EntropyState,
) -> Result<Scores> {
    let deltas = batch
        .par_iter()
        .map(|&i| CellDelta::from_trajectory(&dataset[i], grid))
        .collect::<Result<Vec<_>>>()?;
    let gains = deltas.par_iter().map(|d| state.entropy_delta(d)).collect();
    Ok((deltas, gains))
}

/// Uniform random subset of `round((1 - ratio) · n)` trajectories, in
/// dataset order.
pub fn prune_random(
    dataset: &[Trajectory],
    ratio: f64,
    seed: u64,
    grid: &GridSpec,
    kl_epsilon: f64,
) -> Result<PruneResult> {
    validate_ratio(ratio)?;
    grid.validate()?;
    check_unique_ids(dataset)?;
    let target = retained_count(dataset.len(), ratio);
    let retained = sample_indices(dataset.len(), target, seed);
    finish(dataset, retained, 0, grid, kl_epsilon)
}

fn finish(
    dataset: &[Trajectory],
    retained: Vec<usize>,
    scored: usize,
    grid: &GridSpec,
    kl_epsilon: f64,
) -> Result<PruneResult> {
    let report = evaluate_indices(dataset, &retained, grid, kl_epsilon)?;
    Ok(PruneResult {
        retained_ids: retained
            .iter()
            .map(|&i| dataset[i].id().to_owned())
            .collect(),
        retained_indices: retained,
        candidates_scored: scored,
        report,
    })
}
