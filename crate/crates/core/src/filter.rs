//! Online admission filter: decide trajectory by trajectory whether a
//! record adds enough entropy to the running histogram to be kept.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::entropy::{CellDelta, EntropyState};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::trajectory::Trajectory;

/// Gains smaller than this in magnitude are rounding noise and count as 0.
///
/// Re-adding a trajectory in proportion to the current histogram changes the
/// entropy by exactly zero, but the floating-point evaluation lands a few ulps
/// either side of it.
pub const GAIN_NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FilterPolicy {
    /// Accept when the entropy gain exceeds `threshold` nats.
    Threshold { threshold: f64 },
    /// Accept when the gain ranks in the top `keep_fraction` of the last
    /// `window` gains. Everything is accepted until the window fills.
    TopFraction { keep_fraction: f64, window: usize },
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterPolicy::Threshold { threshold } if threshold.is_nan() => {
                Err(Error::Config("threshold must not be NaN".into()))
            }
            FilterPolicy::TopFraction { keep_fraction, .. }
                if !(keep_fraction > 0.0 && keep_fraction < 1.0) =>
            {
                Err(Error::Config(format!(
                    "keep fraction must be in (0, 1), got {keep_fraction}"
                )))
            }
            FilterPolicy::TopFraction { window: 0, .. } => {
                Err(Error::Config("window must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterOutcome {
    pub decision: Decision,
    /// Entropy gain the trajectory had against the state before the step.
    pub gain: f64,
}

impl FilterOutcome {
    pub fn accepted(&self) -> bool {
        self.decision == Decision::Accept
    }
}

/// Sequential admission filter over a running histogram.
#[derive(Debug, Clone)]
pub struct StreamFilter {
    state: EntropyState,
    grid: GridSpec,
    policy: FilterPolicy,
    recent_gains: VecDeque<f64>,
}

impl StreamFilter {
    pub fn new(grid: GridSpec, policy: FilterPolicy) -> Result<Self> {
        Self::resume(EntropyState::new(), Vec::new(), grid, policy)
    }

    /// Continues from a saved histogram and gain window.
    pub fn resume(
        state: EntropyState,
        recent_gains: Vec<f64>,
        grid: GridSpec,
        policy: FilterPolicy,
    ) -> Result<Self> {
        grid.validate()?;
        policy.validate()?;
        let mut recent_gains: VecDeque<f64> = recent_gains.into();
        if let FilterPolicy::TopFraction { window, .. } = policy {
            while recent_gains.len() > window {
                recent_gains.pop_front();
            }
        }
        Ok(StreamFilter {
            state,
            grid,
            policy,
            recent_gains,
        })
    }

    pub fn state(&self) -> &EntropyState {
        &self.state
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn policy(&self) -> &FilterPolicy {
        &self.policy
    }

    /// Gains currently in the rolling window, oldest first.
    pub fn recent_gains(&self) -> Vec<f64> {
        self.recent_gains.iter().copied().collect()
    }

    /// Scores `t`, decides, and merges it into the state when accepted.
    pub fn step(&mut self, t: &Trajectory) -> Result<FilterOutcome> {
        let delta = CellDelta::from_trajectory(t, &self.grid)?;
        let mut gain = self.state.entropy_delta(&delta);
        if gain.abs() < GAIN_NOISE_FLOOR {
            gain = 0.0;
        }
        let accept = match self.policy {
            FilterPolicy::Threshold { threshold } => gain > threshold,
            FilterPolicy::TopFraction {
                keep_fraction,
                window,
            } => {
                let accept = self.recent_gains.len() < window
                    || gain >= window_cutoff(&self.recent_gains, keep_fraction);
                if self.recent_gains.len() == window {
                    self.recent_gains.pop_front();
                }
                self.recent_gains.push_back(gain);
                accept
            }
        };
        if accept {
            self.state.apply(&delta);
        }
        Ok(FilterOutcome {
            decision: if accept {
                Decision::Accept
            } else {
                Decision::Reject
            },
            gain,
        })
    }
}

/// Smallest value that still ranks in the top `keep_fraction` of `window`:
/// the element at 0-based rank `ceil((1 - keep_fraction) · w)` of the
/// ascending order.
fn window_cutoff(window: &VecDeque<f64>, keep_fraction: f64) -> f64 {
    let mut sorted: Vec<f64> = window.iter().copied().collect();
    let w = sorted.len();
    let rank = (((1.0 - keep_fraction) * w as f64).ceil() as usize).min(w - 1);
    let (_, cutoff, _) = sorted.select_nth_unstable_by(rank, f64::total_cmp);
    *cutoff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::Histogram;
    use crate::grid::CellIndex;
    use crate::trajectory::Waypoint;

    fn at(id: &str, cells: &[(f64, f64)]) -> Trajectory {
        let pts = cells
            .iter()
            .map(|&(x, y)| Waypoint::new(x + 0.5, y + 0.5, 0.0).unwrap())
            .collect();
        Trajectory::new(id, pts).unwrap()
    }

    fn grid() -> GridSpec {
        GridSpec::planar(1.0).unwrap()
    }

    #[test]
    fn first_sample_accepted_with_open_threshold() {
        let mut f = StreamFilter::new(
            grid(),
            FilterPolicy::Threshold {
                threshold: f64::NEG_INFINITY,
            },
        )
        .unwrap();
        let out = f.step(&at("a", &[(0.0, 0.0)])).unwrap();
        assert!(out.accepted());
        assert_eq!(f.state().total(), 1);
    }

    #[test]
    fn duplicate_of_dominant_cell_is_rejected() {
        let hist =
            Histogram::from_counts([(CellIndex::new(0, 0, 0), 100), (CellIndex::new(5, 0, 0), 2)]);
        let state = EntropyState::from_histogram(hist);
        let mut f = StreamFilter::resume(
            state,
            vec![],
            grid(),
            FilterPolicy::Threshold { threshold: 0.0 },
        )
        .unwrap();
        let out = f.step(&at("s", &[(0.0, 0.0); 5])).unwrap();
        assert_eq!(out.decision, Decision::Reject);
        assert!(out.gain < 0.0);
        assert_eq!(f.state().total(), 102);
    }

    #[test]
    fn pure_duplicates_accept_only_a_prefix() {
        let mut f = StreamFilter::new(grid(), FilterPolicy::Threshold { threshold: 0.0 }).unwrap();
        let t = at("d", &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 0.0)]);
        let decisions: Vec<bool> = (0..50).map(|_| f.step(&t).unwrap().accepted()).collect();
        let first_reject = decisions.iter().position(|&a| !a).unwrap();
        assert!(first_reject >= 1);
        assert!(decisions[first_reject..].iter().all(|&a| !a));
    }

    #[test]
    fn top_fraction_fills_window_then_ranks() {
        let policy = FilterPolicy::TopFraction {
            keep_fraction: 0.5,
            window: 4,
        };
        let mut f = StreamFilter::new(grid(), policy).unwrap();
        let t = at("a", &[(0.0, 0.0)]);
        for _ in 0..4 {
            assert!(f.step(&t).unwrap().accepted());
        }
        assert_eq!(f.recent_gains().len(), 4);
        // New cell: gain well above the zero gains in the window.
        assert!(f.step(&at("b", &[(9.0, 9.0)])).unwrap().accepted());
        assert_eq!(f.recent_gains().len(), 4);
    }

    #[test]
    fn cutoff_rank() {
        let w: VecDeque<f64> = vec![4.0, 1.0, 3.0, 2.0].into();
        assert_eq!(window_cutoff(&w, 0.5), 3.0);
        assert_eq!(window_cutoff(&w, 0.75), 2.0);
        assert_eq!(window_cutoff(&w, 0.01), 4.0);
    }

    #[test]
    fn invalid_policies() {
        let bad = [
            FilterPolicy::Threshold {
                threshold: f64::NAN,
            },
            FilterPolicy::TopFraction {
                keep_fraction: 1.0,
                window: 3,
            },
            FilterPolicy::TopFraction {
                keep_fraction: 0.5,
                window: 0,
            },
        ];
        for p in bad {
            assert!(StreamFilter::new(grid(), p).is_err());
        }
    }
}
