//! Seeded synthetic datasets with the redundancy structure of real driving
//! logs: many stationary and straight trajectories, few turns.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::trajectory::{normalize_heading, Trajectory, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Stationary,
    Straight,
    LeftTurn,
    RightTurn,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Stationary,
        Category::Straight,
        Category::LeftTurn,
        Category::RightTurn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Stationary => "stationary",
            Category::Straight => "straight",
            Category::LeftTurn => "left_turn",
            Category::RightTurn => "right_turn",
        }
    }

    /// Category encoded in a generated id (`<category>-<index>`).
    pub fn from_id(id: &str) -> Option<Category> {
        let (prefix, _) = id.rsplit_once('-')?;
        Category::ALL.into_iter().find(|c| c.name() == prefix)
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Category::LeftTurn | Category::RightTurn)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Category weights, summing to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub stationary: f64,
    pub straight: f64,
    pub left_turn: f64,
    pub right_turn: f64,
}

impl Mix {
    pub fn weight(&self, c: Category) -> f64 {
        match c {
            Category::Stationary => self.stationary,
            Category::Straight => self.straight,
            Category::LeftTurn => self.left_turn,
            Category::RightTurn => self.right_turn,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let weights = Category::ALL.map(|c| self.weight(c));
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(
                "mix weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "mix weights must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    /// Exact per-category counts for `count` trajectories by largest
    /// remainder; remainder ties go to the earlier category.
    pub fn apportion(&self, count: usize) -> [usize; 4] {
        let quotas = Category::ALL.map(|c| self.weight(c) * count as f64);
        let mut counts = quotas.map(|q| q.floor() as usize);
        let assigned: usize = counts.iter().sum();
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &k in order.iter().take(count.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        counts
    }
}

/// Parses `stationary=0.4,straight=0.5,turns=0.1`. `turns` splits evenly
/// between left and right turns; unspecified categories get weight 0.
impl FromStr for Mix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut mix = Mix {
            stationary: 0.0,
            straight: 0.0,
            left_turn: 0.0,
            right_turn: 0.0,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("mix entry `{part}` is not key=value")))?;
            let w: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid mix weight `{value}`")))?;
            match key.trim() {
                "stationary" => mix.stationary += w,
                "straight" => mix.straight += w,
                "left_turn" | "left" => mix.left_turn += w,
                "right_turn" | "right" => mix.right_turn += w,
                "turns" | "turn" => {
                    mix.left_turn += w / 2.0;
                    mix.right_turn += w / 2.0;
                }
                other => return Err(Error::Config(format!("unknown mix category `{other}`"))),
            }
        }
        mix.validate()?;
        Ok(mix)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub count: usize,
    pub mix: Mix,
    pub points_per_trajectory: usize,
    /// Seconds between consecutive waypoints.
    pub dt: f64,
    /// Speed interval in m/s for moving categories.
    pub speed_range: (f64, f64),
    /// Turn radius interval in meters.
    pub turn_radius_range: (f64, f64),
    /// Standard deviation of positional noise in meters.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            count: 1000,
            mix: Mix {
                stationary: 0.4,
                straight: 0.5,
                left_turn: 0.05,
                right_turn: 0.05,
            },
            points_per_trajectory: 16,
            dt: 0.5,
            speed_range: (2.0, 12.0),
            turn_radius_range: (10.0, 40.0),
            noise_std: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        self.mix.validate()?;
        if self.count == 0 {
            return Err(Error::Config("count must be positive".into()));
        }
        if self.points_per_trajectory == 0 {
            return Err(Error::Config(
                "points per trajectory must be positive".into(),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        let (s0, s1) = self.speed_range;
        if !(s0.is_finite() && s1.is_finite() && 0.0 <= s0 && s0 <= s1) {
            return Err(Error::Config(format!("invalid speed range [{s0}, {s1}]")));
        }
        let (r0, r1) = self.turn_radius_range;
        if !(r0.is_finite() && r1.is_finite() && 0.0 < r0 && r0 <= r1) {
            return Err(Error::Config(format!(
                "invalid turn radius range [{r0}, {r1}]"
            )));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::Config(format!(
                "invalid noise std {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

/// Generates `spec.count` trajectories in a seeded, interleaved order. Ids
/// are `<category>-<position>`.
///
/// Positional noise is Gaussian per axis, with the 2D offset truncated to a
/// radius of `3·noise_std`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<Trajectory>> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let counts = spec.mix.apportion(spec.count);
    let mut categories: Vec<Category> = Category::ALL
        .iter()
        .zip(counts)
        .flat_map(|(&c, n)| std::iter::repeat_n(c, n))
        .collect();
    categories.shuffle(&mut rng);

    let noise = Normal::new(0.0, spec.noise_std)
        .map_err(|e| Error::Config(format!("invalid noise std: {e}")))?;
    let max_offset = 3.0 * spec.noise_std;
    let width = (spec.count.max(1) - 1).to_string().len();

    let mut out = Vec::with_capacity(spec.count);
    for (i, category) in categories.into_iter().enumerate() {
        let speed = match category {
            Category::Stationary => 0.0,
            _ => rng.random_range(spec.speed_range.0..=spec.speed_range.1),
        };
        let curvature = match category {
            Category::LeftTurn | Category::RightTurn => {
                let r = rng.random_range(spec.turn_radius_range.0..=spec.turn_radius_range.1);
                if category == Category::LeftTurn {
                    1.0 / r
                } else {
                    -1.0 / r
                }
            }
            _ => 0.0,
        };
        let mut points = Vec::with_capacity(spec.points_per_trajectory);
        for k in 0..spec.points_per_trajectory {
            let (x, y, heading) = pose_at(speed, curvature, k as f64 * spec.dt);
            let (mut nx, mut ny) = if spec.noise_std > 0.0 {
                (noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            let r = nx.hypot(ny);
            if r > max_offset {
                nx *= max_offset / r;
                ny *= max_offset / r;
            }
            points.push(Waypoint::new(x + nx, y + ny, heading)?);
        }
        out.push(Trajectory::new(
            format!("{}-{:0width$}", category.name(), i),
            points,
        )?);
    }
    Ok(out)
}

/// Pose after `t` seconds of constant-speed, constant-curvature motion
/// from the origin facing +x.
fn pose_at(speed: f64, curvature: f64, t: f64) -> (f64, f64, f64) {
    let s = speed * t;
    if curvature == 0.0 {
        return (s, 0.0, 0.0);
    }
    let theta = curvature * s;
    let r = 1.0 / curvature;
    (
        r * theta.sin(),
        r * (1.0 - theta.cos()),
        normalize_heading(theta.rem_euclid(2.0 * PI)),
    )
}
