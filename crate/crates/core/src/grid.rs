//! Discretization of waypoints onto an unbounded sparse grid.
//!
//! Cells are half-open, `[i·δ, (i+1)·δ)` along both spatial axes, so the
//! origin pose always falls in cell `(0, 0)`. With `heading_bins = k > 0`
//! the heading interval `[-π, π)` is split into `k` equal bins as a third
//! axis; with `k = 0` the grid is the 2D `(x, y)` projection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Trajectory, Waypoint};

pub const DEFAULT_CELL_SIZE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Cell side length in meters.
    pub cell_size: f64,
    /// Number of heading bins; 0 ignores heading.
    pub heading_bins: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            cell_size: DEFAULT_CELL_SIZE,
            heading_bins: 0,
        }
    }
}

impl GridSpec {
    pub fn new(cell_size: f64, heading_bins: u32) -> Result<Self> {
        let g = GridSpec {
            cell_size,
            heading_bins,
        };
        g.validate()?;
        Ok(g)
    }

    /// 2D projection with the given cell size.
    pub fn planar(cell_size: f64) -> Result<Self> {
        Self::new(cell_size, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(Error::Config(format!(
                "cell size must be a positive finite number, got {}",
                self.cell_size
            )));
        }
        Ok(())
    }
}

/// Integer coordinates of a grid cell. `ia` is always 0 in 2D mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub ix: i64,
    pub iy: i64,
    pub ia: u32,
}

impl CellIndex {
    pub const fn new(ix: i64, iy: i64, ia: u32) -> Self {
        CellIndex { ix, iy, ia }
    }
}

/// Maps a waypoint to the cell containing it.
pub fn cell_index(w: &Waypoint, grid: &GridSpec) -> Result<CellIndex> {
    if let Some(field) = w.non_finite_field() {
        return Err(Error::Validation(format!(
            "cannot discretize waypoint: field `{field}` is not finite"
        )));
    }
    Ok(cell_of(w, grid))
}

#[inline]
pub(crate) fn cell_of(w: &Waypoint, grid: &GridSpec) -> CellIndex {
    let ix = (w.x / grid.cell_size).floor() as i64;
    let iy = (w.y / grid.cell_size).floor() as i64;
    let ia = match grid.heading_bins {
        0 => 0,
        k => {
            let width = 2.0 * PI / f64::from(k);
            let bin = ((w.heading + PI) / width).floor();
            // heading = π after round-off lands one past the last bin
            bin.clamp(0.0, f64::from(k - 1)) as u32
        }
    };
    CellIndex { ix, iy, ia }
}

/// One cell per waypoint, in waypoint order, multiplicity preserved.
pub fn discretize(t: &Trajectory, grid: &GridSpec) -> Result<Vec<CellIndex>> {
    if t.is_empty() {
        return Err(Error::Validation(format!(
            "trajectory `{}` has no points",
            t.id()
        )));
    }
    t.points().iter().map(|w| cell_index(w, grid)).collect()
}
