//! Comparison of a pruned subset against the original dataset.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::entropy::Histogram;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kl::{kl_divergence, KlValue};
use crate::trajectory::Trajectory;

/// Distribution-level summary of a pruning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub n_original: usize,
    pub n_retained: usize,
    /// `1 - n_retained / n_original`.
    pub achieved_ratio: f64,
    pub entropy_original: f64,
    pub entropy_pruned: f64,
    /// `D(P_original ‖ Q_pruned)`.
    pub kl_original_vs_pruned: KlValue,
    /// Probability floor used for the KL value; 0 means unsmoothed.
    pub kl_epsilon: f64,
    pub occupied_cells_original: usize,
    pub occupied_cells_pruned: usize,
    /// Fraction of the original occupied cells still occupied after pruning.
    pub support_coverage: f64,
    pub points_original: u64,
    pub points_pruned: u64,
}

/// Builds the report for retaining `retained_ids` out of `original`.
pub fn evaluate<S: AsRef<str>>(
    original: &[Trajectory],
    retained_ids: &[S],
    grid: &GridSpec,
    epsilon: f64,
) -> Result<PruneReport> {
    let by_id: FxHashMap<&str, usize> = original
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id(), i))
        .collect();
    let mut indices = Vec::with_capacity(retained_ids.len());
    for id in retained_ids {
        let id = id.as_ref();
        match by_id.get(id) {
            Some(&i) => indices.push(i),
            None => return Err(Error::Validation(format!("unknown trajectory id `{id}`"))),
        }
    }
    evaluate_indices(original, &indices, grid, epsilon)
}

/// Same as [`evaluate`] with the retained subset given by position.
pub fn evaluate_indices(
    original: &[Trajectory],
    retained: &[usize],
    grid: &GridSpec,
    epsilon: f64,
) -> Result<PruneReport> {
    let mut seen = FxHashSet::default();
    for &i in retained {
        if i >= original.len() {
            return Err(Error::Validation(format!(
                "retained index {i} out of range"
            )));
        }
        if !seen.insert(i) {
            return Err(Error::Validation(format!(
                "trajectory `{}` retained twice",
                original[i].id()
            )));
        }
    }
    let p = Histogram::from_trajectories(original, grid)?;
    let q = Histogram::from_trajectories(retained.iter().map(|&i| &original[i]), grid)?;
    report_from_histograms(original.len(), retained.len(), &p, &q, epsilon)
}

pub(crate) fn report_from_histograms(
    n_original: usize,
    n_retained: usize,
    p: &Histogram,
    q: &Histogram,
    epsilon: f64,
) -> Result<PruneReport> {
    let covered = q.iter().filter(|(c, _)| p.contains(c)).count();
    let support_coverage = if p.occupied() == 0 {
        1.0
    } else {
        covered as f64 / p.occupied() as f64
    };
    let achieved_ratio = if n_original == 0 {
        0.0
    } else {
        1.0 - n_retained as f64 / n_original as f64
    };
    Ok(PruneReport {
        n_original,
        n_retained,
        achieved_ratio,
        entropy_original: p.entropy(),
        entropy_pruned: q.entropy(),
        kl_original_vs_pruned: kl_divergence(p, q, epsilon)?,
        kl_epsilon: epsilon,
        occupied_cells_original: p.occupied(),
        occupied_cells_pruned: q.occupied(),
        support_coverage,
        points_original: p.total(),
        points_pruned: q.total(),
    })
}
