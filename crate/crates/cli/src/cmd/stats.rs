use anyhow::Result;
use trajprune::{EntropyState, Histogram};

use super::{grid, read};
use crate::args::StatsArgs;

pub fn run(args: StatsArgs) -> Result<()> {
    let grid = grid(&args.grid)?;
    let data = read(&args.input, args.format)?;
    let hist = Histogram::from_trajectories(&data, &grid)?;
    println!(
        "n={} points={} occupied_cells={} entropy={}",
        data.len(),
        hist.total(),
        hist.occupied(),
        hist.entropy()
    );
    if let Some(path) = &args.histogram_out {
        trajprune::io::write_histogram(&EntropyState::from_histogram(hist), &grid, path)?;
    }
    Ok(())
}
