use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::Result;
use serde::Serialize;
use trajprune::io::write_json;
use trajprune::prune::{default_batch_size, default_initial_size};
use trajprune::{prune_entropy, prune_random, PruneParams, PruneReport, PruneResult, Trajectory};

use super::{format_for, grid, read, short};
use crate::args::{Epsilon, Method, PruneArgs};

/// Report file layout: run configuration followed by the metrics.
#[derive(Serialize)]
struct RunReport<'a> {
    method: &'static str,
    ratio: f64,
    seed: u64,
    cell_size: f64,
    heading_bins: u32,
    batch_size: Option<usize>,
    initial_size: Option<usize>,
    #[serde(flatten)]
    metrics: &'a PruneReport,
}

pub fn run(args: PruneArgs) -> Result<()> {
    let grid = grid(&args.grid)?;
    let data = read(&args.input, args.format)?;
    let n = data.len();
    let batch_size = args.batch_size.unwrap_or_else(|| default_batch_size(n));
    let initial_size = args
        .initial_size
        .unwrap_or_else(|| default_initial_size(n, args.ratio, batch_size));
    let fixed_epsilon = match args.kl_epsilon {
        Epsilon::Value(v) => v,
        Epsilon::HalfCount => 0.0,
    };

    let mut result = match args.method {
        Method::Entropy => {
            let params = PruneParams {
                ratio: args.ratio,
                batch_size,
                initial_size,
                seed: args.seed,
                grid,
                threads: args.threads,
                kl_epsilon: fixed_epsilon,
            };
            prune_entropy(&data, &params)?
        }
        Method::Random => prune_random(&data, args.ratio, args.seed, &grid, fixed_epsilon)?,
    };
    if args.kl_epsilon == Epsilon::HalfCount {
        let eps = half_count_epsilon(&result);
        result.report =
            trajprune::report::evaluate_indices(&data, &result.retained_indices, &grid, eps)?;
    }

    let mut kept = result.retained_indices.clone();
    kept.sort_unstable();
    let pruned: Vec<Trajectory> = kept.iter().map(|&i| data[i].clone()).collect();
    trajprune::io::write_dataset(&pruned, &args.output, format_for(&args.output, args.format))?;

    if let Some(path) = &args.ids_out {
        write_ids(&result.retained_ids, path)?;
    }
    let entropy = args.method == Method::Entropy;
    if let Some(path) = &args.report {
        let run = RunReport {
            method: if entropy { "entropy" } else { "random" },
            ratio: args.ratio,
            seed: args.seed,
            cell_size: grid.cell_size,
            heading_bins: grid.heading_bins,
            batch_size: entropy.then_some(batch_size),
            initial_size: entropy.then_some(initial_size),
            metrics: &result.report,
        };
        write_json(&run, path)?;
    }

    let r = &result.report;
    println!(
        "n={} n_p={} achieved_ratio={:.4} H_before={} H_after={} KL={}",
        r.n_original,
        r.n_retained,
        r.achieved_ratio,
        short(r.entropy_original),
        short(r.entropy_pruned),
        short(r.kl_original_vs_pruned.as_f64()),
    );
    Ok(())
}

fn half_count_epsilon(result: &PruneResult) -> f64 {
    match result.report.points_pruned {
        0 => 1.0,
        total => 1.0 / (2.0 * total as f64),
    }
}

fn write_ids(ids: &[String], path: &std::path::Path) -> Result<()> {
    let file = File::create(path).map_err(|e| with_path(e, path))?;
    let mut w = BufWriter::new(file);
    for id in ids {
        writeln!(w, "{id}").map_err(|e| with_path(e, path))?;
    }
    w.flush().map_err(|e| with_path(e, path))?;
    Ok(())
}

pub fn with_path(e: std::io::Error, path: &std::path::Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}
