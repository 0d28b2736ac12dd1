//! Trajectories and waypoints in the ego-centric frame.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Wraps an angle into `[-π, π)`.
///
/// Values already inside the interval are returned unchanged, so the
/// normalization is idempotent and serialization round-trips bit-exactly.
pub fn normalize_heading(heading: f64) -> f64 {
    if (-PI..PI).contains(&heading) {
        return heading;
    }
    let tau = 2.0 * PI;
    let mut h = heading - tau * ((heading + PI) / tau).floor();
    // Round-off can land exactly on either edge.
    if h >= PI {
        h -= tau;
    }
    if h < -PI {
        h = -PI;
    }
    h
}

/// One pose of a trajectory: meters forward (`x`), meters left (`y`) and
/// heading in radians, all relative to the current ego pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Waypoint {
    /// Builds a validated waypoint with its heading wrapped into `[-π, π)`.
    pub fn new(x: f64, y: f64, heading: f64) -> Result<Self> {
        let w = Waypoint {
            x,
            y,
            heading: if heading.is_finite() {
                normalize_heading(heading)
            } else {
                heading
            },
        };
        w.validate()?;
        Ok(w)
    }

    pub const fn origin() -> Self {
        Waypoint {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
        }
    }

    /// Returns the name of the first non-finite field, if any.
    pub fn non_finite_field(&self) -> Option<&'static str> {
        if !self.x.is_finite() {
            Some("x")
        } else if !self.y.is_finite() {
            Some("y")
        } else if !self.heading.is_finite() {
            Some("heading")
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(field) = self.non_finite_field() {
            return Err(Error::Validation(format!(
                "waypoint field `{field}` is not finite"
            )));
        }
        if !(-PI..PI).contains(&self.heading) {
            return Err(Error::Validation(format!(
                "waypoint heading {} is outside [-pi, pi)",
                self.heading
            )));
        }
        Ok(())
    }
}

/// An identified, non-empty sequence of waypoints. This is the unit of
/// selection for pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    id: String,
    points: Vec<Waypoint>,
}

impl Trajectory {
    /// Validates every waypoint and rejects empty trajectories. Errors name
    /// the trajectory id and the offending field.
    pub fn new(id: impl Into<String>, points: Vec<Waypoint>) -> Result<Self> {
        let id = id.into();
        if points.is_empty() {
            return Err(Error::Validation(format!(
                "trajectory `{id}` has no points"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if let Some(field) = p.non_finite_field() {
                return Err(Error::Validation(format!(
                    "trajectory `{id}` point {i}: field `{field}` is not finite"
                )));
            }
            if !(-PI..PI).contains(&p.heading) {
                return Err(Error::Validation(format!(
                    "trajectory `{id}` point {i}: heading {} is outside [-pi, pi)",
                    p.heading
                )));
            }
        }
        Ok(Trajectory { id, points })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[Waypoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false for a constructed trajectory; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the convention that the first waypoint is the current pose
    /// `(0, 0, 0)`. Exports frequently omit it, so this is advisory only.
    pub fn starts_at_origin(&self) -> bool {
        self.points[0] == Waypoint::origin()
    }
}

/// Rejects datasets that reuse a trajectory id.
pub fn check_unique_ids(trajectories: &[Trajectory]) -> Result<()> {
    let mut seen = rustc_hash::FxHashSet::default();
    for t in trajectories {
        if !seen.insert(t.id()) {
            return Err(Error::Validation(format!(
                "duplicate trajectory id `{}`",
                t.id()
            )));
        }
    }
    Ok(())
}
