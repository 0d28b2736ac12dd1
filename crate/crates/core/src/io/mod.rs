//! Dataset, report and histogram files.

pub mod jsonl;
pub mod snapshot;
pub mod tabular;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::entropy::EntropyState;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::report::PruneReport;
use crate::trajectory::{check_unique_ids, Trajectory};

pub use snapshot::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// `.csv` means CSV; anything else is read as JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown dataset format `{other}`"))),
        }
    }
}

fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads a dataset in file order and rejects duplicate ids.
pub fn read_dataset(path: &Path, format: Format) -> Result<Vec<Trajectory>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let source = source_name(path);
    let reader = BufReader::with_capacity(1 << 20, file);
    let trajectories = match format {
        Format::Jsonl => jsonl::read(reader, &source)?,
        Format::Csv => tabular::read(reader, &source)?,
    };
    check_unique_ids(&trajectories)?;
    Ok(trajectories)
}

pub fn write_dataset(trajectories: &[Trajectory], path: &Path, format: Format) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let writer = BufWriter::with_capacity(1 << 20, file);
    match format {
        Format::Jsonl => jsonl::write(writer, trajectories),
        Format::Csv => tabular::write(writer, trajectories),
    }
    .map_err(|e| Error::io(path, e))
}

/// Writes any serializable value as pretty JSON.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    use std::io::Write;
    writer
        .write_all(b"\n")
        .and_then(|_| writer.flush())
        .map_err(|e| Error::io(path, e))
}

/// The report as a flat JSON object.
pub fn write_report(report: &PruneReport, path: &Path) -> Result<()> {
    write_json(report, path)
}

pub fn write_histogram(state: &EntropyState, grid: &GridSpec, path: &Path) -> Result<()> {
    write_snapshot(
        &Snapshot {
            grid: *grid,
            state: state.clone(),
            recent_gains: None,
        },
        path,
    )
}

pub fn write_snapshot(snap: &Snapshot, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    snapshot::write(BufWriter::new(file), snap).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    snapshot::read(BufReader::new(file), &source_name(path))
}
