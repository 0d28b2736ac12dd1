//! Sparse point-count histograms and incremental Shannon entropy.
//!
//! All entropies are in nats (natural logarithm). The log base only rescales
//! entropy and never changes the ranking of entropy gains, so the choice does
//! not affect which trajectories pruning keeps.
//!
//! For a histogram with counts `N_i` summing to `N`,
//!
//! ```text
//! H = -Σ (N_i/N) ln(N_i/N) = ln N - (Σ N_i ln N_i) / N
//! ```
//!
//! [`EntropyState`] caches `W = Σ N_i ln N_i` so the entropy change caused by
//! adding a trajectory touching `k` cells costs `O(k)` lookups instead of a
//! pass over the whole histogram.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::Result;
use crate::grid::{discretize, CellIndex, GridSpec};
use crate::trajectory::Trajectory;

/// Default number of applies between exact rebuilds of the cached sum.
pub const DEFAULT_REBUILD_INTERVAL: u64 = 1 << 20;

#[inline]
pub(crate) fn xlogx(n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        let n = n as f64;
        n * n.ln()
    }
}

/// Sparse map from cell to a positive point count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    counts: FxHashMap<CellIndex, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a histogram from `(cell, count)` pairs. Zero counts are
    /// dropped and repeated cells are summed.
    pub fn from_counts<I: IntoIterator<Item = (CellIndex, u64)>>(counts: I) -> Self {
        let mut h = Histogram::new();
        for (cell, n) in counts {
            h.add(cell, n);
        }
        h
    }

    /// Point counts of every waypoint of every trajectory.
    pub fn from_trajectories<'a, I>(trajectories: I, grid: &GridSpec) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Trajectory>,
    {
        let mut h = Histogram::new();
        for t in trajectories {
            for cell in discretize(t, grid)? {
                h.add(cell, 1);
            }
        }
        Ok(h)
    }

    pub fn add(&mut self, cell: CellIndex, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(cell).or_insert(0) += n;
        self.total += n;
    }

    pub fn get(&self, cell: &CellIndex) -> u64 {
        self.counts.get(cell).copied().unwrap_or(0)
    }

    pub fn contains(&self, cell: &CellIndex) -> bool {
        self.counts.contains_key(cell)
    }

    /// Total point count `N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of occupied cells.
    pub fn occupied(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Iterates cells in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (&CellIndex, &u64)> {
        self.counts.iter()
    }

    /// Cells in ascending `(ix, iy, ia)` order.
    pub fn sorted(&self) -> Vec<(CellIndex, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(c, n)| (*c, *n)).collect();
        v.sort_unstable_by_key(|(c, _)| *c);
        v
    }

    /// Entropy evaluated directly as `-Σ p ln p`, summing cells in sorted
    /// order so the result does not depend on insertion history.
    pub fn entropy(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let total = self.total as f64;
        let h: f64 = self
            .sorted()
            .into_iter()
            .map(|(_, n)| {
                let p = n as f64 / total;
                -p * p.ln()
            })
            .sum();
        h.max(0.0)
    }

    fn weighted_log_sum(&self) -> f64 {
        self.sorted().into_iter().map(|(_, n)| xlogx(n)).sum()
    }
}

/// Aggregated point counts a single trajectory would add, one entry per
/// distinct cell, sorted by cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellDelta {
    entries: SmallVec<[(CellIndex, u64); 16]>,
}

impl CellDelta {
    pub fn from_cells<I: IntoIterator<Item = CellIndex>>(cells: I) -> Self {
        let mut cells: SmallVec<[CellIndex; 32]> = cells.into_iter().collect();
        cells.sort_unstable();
        let mut entries: SmallVec<[(CellIndex, u64); 16]> = SmallVec::new();
        for c in cells {
            match entries.last_mut() {
                Some((last, n)) if *last == c => *n += 1,
                _ => entries.push((c, 1)),
            }
        }
        CellDelta { entries }
    }

    /// Builds a delta from explicit `(cell, increment)` pairs.
    pub fn from_counts<I: IntoIterator<Item = (CellIndex, u64)>>(counts: I) -> Self {
        let mut v: SmallVec<[(CellIndex, u64); 16]> =
            counts.into_iter().filter(|&(_, n)| n > 0).collect();
        v.sort_unstable_by_key(|(c, _)| *c);
        let mut entries: SmallVec<[(CellIndex, u64); 16]> = SmallVec::new();
        for (c, n) in v {
            match entries.last_mut() {
                Some((last, m)) if *last == c => *m += n,
                _ => entries.push((c, n)),
            }
        }
        CellDelta { entries }
    }

    pub fn from_trajectory(t: &Trajectory, grid: &GridSpec) -> Result<Self> {
        Ok(Self::from_cells(discretize(t, grid)?))
    }

    pub fn entries(&self) -> &[(CellIndex, u64)] {
        &self.entries
    }

    /// Total number of points added.
    pub fn mass(&self) -> u64 {
        self.entries.iter().map(|(_, n)| n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A histogram plus the cached `Σ N_i ln N_i`.
///
/// Readers ([`entropy`](Self::entropy), [`entropy_delta`](Self::entropy_delta))
/// take `&self` and may run concurrently; [`apply`](Self::apply) needs
/// exclusive access.
#[derive(Debug, Clone)]
pub struct EntropyState {
    histogram: Histogram,
    weighted_log_sum: f64,
    applies_since_rebuild: u64,
    rebuild_interval: u64,
}

impl Default for EntropyState {
    fn default() -> Self {
        EntropyState {
            histogram: Histogram::new(),
            weighted_log_sum: 0.0,
            applies_since_rebuild: 0,
            rebuild_interval: DEFAULT_REBUILD_INTERVAL,
        }
    }
}

impl EntropyState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets how many applies may pass before the cached sum is recomputed
    /// exactly from the counts. Zero disables periodic rebuilds.
    pub fn with_rebuild_interval(mut self, interval: u64) -> Self {
        self.rebuild_interval = interval;
        self
    }

    pub fn from_histogram(histogram: Histogram) -> Self {
        let weighted_log_sum = histogram.weighted_log_sum();
        EntropyState {
            histogram,
            weighted_log_sum,
            ..Self::default()
        }
    }

    /// Histogram of all waypoints of `trajectories`. The counts do not
    /// depend on input order, and neither does the cached sum, which is
    /// computed once in sorted cell order.
    pub fn build<'a, I>(trajectories: I, grid: &GridSpec) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Trajectory>,
    {
        Ok(Self::from_histogram(Histogram::from_trajectories(
            trajectories,
            grid,
        )?))
    }

    /// Restores a state with an exact cached sum, e.g. from a snapshot.
    pub(crate) fn from_parts(
        histogram: Histogram,
        weighted_log_sum: f64,
        applies_since_rebuild: u64,
    ) -> Self {
        EntropyState {
            histogram,
            weighted_log_sum,
            applies_since_rebuild,
            ..Self::default()
        }
    }

    pub fn histogram(&self) -> &Histogram {
        &self.histogram
    }

    pub fn into_histogram(self) -> Histogram {
        self.histogram
    }

    pub fn total(&self) -> u64 {
        self.histogram.total
    }

    pub fn weighted_log_sum(&self) -> f64 {
        self.weighted_log_sum
    }

    pub fn applies_since_rebuild(&self) -> u64 {
        self.applies_since_rebuild
    }

    /// Entropy in nats; 0 for an empty histogram.
    pub fn entropy(&self) -> f64 {
        entropy_from_aggregates(self.histogram.total, self.weighted_log_sum)
    }

    /// `Σ [(n+m) ln(n+m) - n ln n]` over the delta's cells, plus its mass.
    ///
    /// Terms are summed in ascending value order so two deltas with the same
    /// multiset of `(n, m)` pairs score bit-identically regardless of which
    /// cells they touch.
    fn delta_terms(&self, delta: &CellDelta) -> (f64, u64) {
        let mut terms: SmallVec<[f64; 32]> = SmallVec::new();
        let mut mass = 0u64;
        for &(cell, m) in &delta.entries {
            let n = self.histogram.get(&cell);
            terms.push(xlogx(n + m) - xlogx(n));
            mass += m;
        }
        terms.sort_unstable_by(f64::total_cmp);
        (terms.iter().sum(), mass)
    }

    /// Entropy change if `delta` were merged, without mutating the state.
    /// May be negative.
    pub fn entropy_delta(&self, delta: &CellDelta) -> f64 {
        let (d, mass) = self.delta_terms(delta);
        if mass == 0 {
            return 0.0;
        }
        let m = mass as f64;
        let total = self.histogram.total;
        if total == 0 {
            let t2 = m;
            return (t2.ln() - d / t2).max(0.0);
        }
        let t = total as f64;
        let t2 = t + m;
        // ln(t2/t) - d/t2 + W·(1/t - 1/t2), arranged to avoid subtracting
        // two entropies of similar magnitude.
        (m / t).ln_1p() - d / t2 + self.weighted_log_sum * (m / (t * t2))
    }

    /// Merges `delta` into the state.
    pub fn apply(&mut self, delta: &CellDelta) {
        if delta.is_empty() {
            return;
        }
        let (d, _) = self.delta_terms(delta);
        for &(cell, m) in &delta.entries {
            self.histogram.add(cell, m);
        }
        self.weighted_log_sum += d;
        self.applies_since_rebuild += 1;
        if self.rebuild_interval > 0 && self.applies_since_rebuild >= self.rebuild_interval {
            self.rebuild();
        }
    }

    /// Recomputes the cached sum exactly from the counts.
    pub fn rebuild(&mut self) {
        self.weighted_log_sum = self.histogram.weighted_log_sum();
        self.applies_since_rebuild = 0;
    }
}

fn entropy_from_aggregates(total: u64, weighted_log_sum: f64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    (n.ln() - weighted_log_sum / n).max(0.0)
}
