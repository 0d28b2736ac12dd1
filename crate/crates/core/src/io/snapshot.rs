//! Histogram snapshots.
//!
//! ```text
//! # weighted_log_sum=12.345 applies_since_rebuild=42
//! # gain_window=0.1,0.02,-0.003
//! # cell_size=0.5 heading_bins=0
//! ix,iy,ia,count
//! 0,0,0,5
//! ```
//!
//! Only the `cell_size` comment and the `ix,iy,ia,count` table are
//! required. The optional lines carry the exact cached aggregate and the
//! streaming filter's gain window so that a resumed filter continues
//! bit-identically. Rows are written in ascending cell order.

use std::io::{BufRead, Write};

use crate::entropy::{EntropyState, Histogram};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec};

pub const TABLE_HEADER: &str = "ix,iy,ia,count";

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub grid: GridSpec,
    pub state: EntropyState,
    /// Rolling gain window of a top-fraction stream filter, oldest first.
    pub recent_gains: Option<Vec<f64>>,
}

pub fn write<W: Write>(mut w: W, snapshot: &Snapshot) -> std::io::Result<()> {
    let state = &snapshot.state;
    writeln!(
        w,
        "# weighted_log_sum={:?} applies_since_rebuild={}",
        state.weighted_log_sum(),
        state.applies_since_rebuild()
    )?;
    if let Some(gains) = &snapshot.recent_gains {
        let joined: Vec<String> = gains.iter().map(|g| format!("{g:?}")).collect();
        writeln!(w, "# gain_window={}", joined.join(","))?;
    }
    writeln!(
        w,
        "# cell_size={:?} heading_bins={}",
        snapshot.grid.cell_size, snapshot.grid.heading_bins
    )?;
    writeln!(w, "{TABLE_HEADER}")?;
    for (c, n) in state.histogram().sorted() {
        writeln!(w, "{},{},{},{}", c.ix, c.iy, c.ia, n)?;
    }
    w.flush()
}

pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Snapshot> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: source.to_owned(),
        line,
        message,
    };
    let mut cell_size = None;
    let mut heading_bins = 0u32;
    let mut weighted_log_sum = None;
    let mut applies = 0u64;
    let mut recent_gains = None;
    let mut seen_header = false;
    let mut hist = Histogram::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                let Some((key, value)) = token.split_once('=') else {
                    continue;
                };
                let bad = || err(line_no, format!("invalid value for `{key}`: {value:?}"));
                match key {
                    "cell_size" => cell_size = Some(value.parse::<f64>().map_err(|_| bad())?),
                    "heading_bins" => heading_bins = value.parse().map_err(|_| bad())?,
                    "weighted_log_sum" => {
                        weighted_log_sum = Some(value.parse::<f64>().map_err(|_| bad())?)
                    }
                    "applies_since_rebuild" => applies = value.parse().map_err(|_| bad())?,
                    "gain_window" => {
                        let gains = if value.is_empty() {
                            Vec::new()
                        } else {
                            value
                                .split(',')
                                .map(|v| v.parse::<f64>())
                                .collect::<Result<Vec<_>, _>>()
                                .map_err(|_| bad())?
                        };
                        recent_gains = Some(gains);
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            if line != TABLE_HEADER {
                return Err(err(line_no, format!("expected header `{TABLE_HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let parse_err = |what: &str| err(line_no, format!("invalid {what}"));
        let cell = CellIndex::new(
            fields[0].parse().map_err(|_| parse_err("ix"))?,
            fields[1].parse().map_err(|_| parse_err("iy"))?,
            fields[2].parse().map_err(|_| parse_err("ia"))?,
        );
        let count: u64 = fields[3].parse().map_err(|_| parse_err("count"))?;
        if count == 0 {
            return Err(err(line_no, "cell counts must be positive".into()));
        }
        if hist.contains(&cell) {
            return Err(err(line_no, format!("duplicate cell {cell:?}")));
        }
        hist.add(cell, count);
    }

    let cell_size = cell_size.ok_or_else(|| err(1, "missing `# cell_size=` line".into()))?;
    if !seen_header {
        return Err(err(1, format!("missing header `{TABLE_HEADER}`")));
    }
    let grid = GridSpec::new(cell_size, heading_bins)?;
    let state = match weighted_log_sum {
        Some(wls) => EntropyState::from_parts(hist, wls, applies),
        None => EntropyState::from_histogram(hist),
    };
    Ok(Snapshot {
        grid,
        state,
        recent_gains,
    })
}
