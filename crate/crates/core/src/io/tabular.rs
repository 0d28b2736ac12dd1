//! Long-format CSV: one waypoint per row with columns
//! `trajectory_id,t,x,y,heading`.
//!
//! Rows may arrive in any order. They are grouped by id (trajectories keep
//! the order in which their id first appears) and sorted by `t` within each
//! trajectory. The `heading` column is optional.

use std::io::{Read, Write};

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::trajectory::{normalize_heading, Trajectory, Waypoint};

pub const HEADER: [&str; 5] = ["trajectory_id", "t", "x", "y", "heading"];

struct Columns {
    id: usize,
    t: usize,
    x: usize,
    y: usize,
    heading: Option<usize>,
}

fn locate(headers: &csv::StringRecord, source: &str) -> Result<Columns> {
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let need = |name: &str| {
        find(name).ok_or_else(|| Error::Parse {
            source_name: source.to_owned(),
            line: 1,
            message: format!("missing column `{name}`"),
        })
    };
    Ok(Columns {
        id: need("trajectory_id")?,
        t: need("t")?,
        x: need("x")?,
        y: need("y")?,
        heading: find("heading"),
    })
}

pub fn read<R: Read>(reader: R, source: &str) -> Result<Vec<Trajectory>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            source_name: source.to_owned(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let cols = locate(&headers, source)?;

    let mut slots: FxHashMap<String, usize> = FxHashMap::default();
    // (id, rows of (t, waypoint))
    let mut groups: Vec<(String, Vec<(f64, Waypoint)>)> = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| Error::Parse {
            source_name: source.to_owned(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| Error::Parse {
            source_name: source.to_owned(),
            line,
            message,
        };
        let raw_id = record.get(cols.id).unwrap_or("").trim();
        let id = if raw_id.is_empty() {
            format!("{source}#{line}")
        } else {
            raw_id.to_owned()
        };
        let field = |idx: Option<usize>, name: &str| -> Result<f64> {
            let Some(idx) = idx else { return Ok(0.0) };
            let text = record.get(idx).unwrap_or("").trim();
            let v: f64 = text.parse().map_err(|_| {
                err(format!(
                    "trajectory `{id}`: invalid `{name}` value {text:?}"
                ))
            })?;
            if !v.is_finite() {
                return Err(err(format!(
                    "trajectory `{id}`: field `{name}` is not finite"
                )));
            }
            Ok(v)
        };
        let t = field(Some(cols.t), "t")?;
        let w = Waypoint {
            x: field(Some(cols.x), "x")?,
            y: field(Some(cols.y), "y")?,
            heading: normalize_heading(field(cols.heading, "heading")?),
        };
        let slot = match slots.get(&id) {
            Some(&s) => s,
            None => {
                slots.insert(id.clone(), groups.len());
                groups.push((id, Vec::new()));
                groups.len() - 1
            }
        };
        groups[slot].1.push((t, w));
    }

    groups
        .into_iter()
        .map(|(id, mut rows)| {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            Trajectory::new(id, rows.into_iter().map(|(_, w)| w).collect())
        })
        .collect()
}

/// Writes waypoints with `t` set to the point index.
pub fn write<W: Write>(writer: W, trajectories: &[Trajectory]) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(HEADER)?;
    for traj in trajectories {
        for (i, p) in traj.points().iter().enumerate() {
            wtr.write_record([
                traj.id(),
                &i.to_string(),
                &format!("{:?}", p.x),
                &format!("{:?}", p.y),
                &format!("{:?}", p.heading),
            ])?;
        }
    }
    wtr.flush()
}
