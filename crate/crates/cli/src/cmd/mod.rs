pub mod compare;
pub mod filter;
pub mod gen;
pub mod prune;
pub mod stats;

use std::path::Path;

use trajprune::io::Format;
use trajprune::{GridSpec, Trajectory};

use crate::args::{FormatArg, GridArgs};

pub fn grid(args: &GridArgs) -> trajprune::Result<GridSpec> {
    GridSpec::new(args.cell_size, args.heading_bins)
}

pub fn format_for(path: &Path, flag: Option<FormatArg>) -> Format {
    flag.map(Format::from)
        .unwrap_or_else(|| Format::from_path(path))
}

pub fn read(path: &Path, flag: Option<FormatArg>) -> trajprune::Result<Vec<Trajectory>> {
    trajprune::io::read_dataset(path, format_for(path, flag))
}

/// Compact float for human-readable summaries.
pub fn short(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.6}")
    }
}
