use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::Result;
use trajprune::prune::{default_batch_size, default_initial_size};
use trajprune::{
    default_epsilon, kl_divergence, prune_entropy, prune_random, GridSpec, Histogram, PruneParams,
    PruneResult, Trajectory,
};

use super::prune::with_path;
use super::{grid, read, short};
use crate::args::CompareArgs;

const METHODS: [&str; 2] = ["entropy", "random"];
const METRICS: [&str; 4] = [
    "h_pruned_mean",
    "kl_inf_rate",
    "kl_smoothed_mean",
    "support_coverage_mean",
];

#[derive(Default, Clone, Copy)]
struct Summary {
    h_pruned: f64,
    kl_inf: f64,
    kl_smoothed: f64,
    coverage: f64,
}

impl Summary {
    fn values(&self) -> [f64; 4] {
        [self.h_pruned, self.kl_inf, self.kl_smoothed, self.coverage]
    }
}

pub fn run(args: CompareArgs) -> Result<()> {
    let grid = grid(&args.grid)?;
    let data = read(&args.input, args.format)?;
    let original = Histogram::from_trajectories(&data, &grid)?;

    let mut rows = Vec::with_capacity(args.ratios.len());
    for &ratio in &args.ratios {
        let mut per_method = [Summary::default(); 2];
        for (m, summary) in per_method.iter_mut().enumerate() {
            for k in 0..args.seeds {
                let seed = args.seed_base + k as u64;
                let result = if m == 0 {
                    let n = data.len();
                    let batch_size = args.batch_size.unwrap_or_else(|| default_batch_size(n));
                    let params = PruneParams {
                        batch_size,
                        initial_size: args
                            .initial_size
                            .unwrap_or_else(|| default_initial_size(n, ratio, batch_size)),
                        threads: args.threads,
                        ..PruneParams::for_dataset(n, ratio, seed, grid)
                    };
                    prune_entropy(&data, &params)?
                } else {
                    prune_random(&data, ratio, seed, &grid, 0.0)?
                };
                let smoothed = smoothed_kl(&data, &original, &result, &grid)?;
                let r = &result.report;
                summary.h_pruned += r.entropy_pruned;
                summary.kl_inf += f64::from(u8::from(r.kl_original_vs_pruned.is_infinite()));
                summary.kl_smoothed += smoothed;
                summary.coverage += r.support_coverage;
            }
            let runs = args.seeds as f64;
            summary.h_pruned /= runs;
            summary.kl_inf /= runs;
            summary.kl_smoothed /= runs;
            summary.coverage /= runs;
        }
        rows.push((ratio, per_method));
    }

    let header = columns();
    println!("{}", header.join("  "));
    for (ratio, per_method) in &rows {
        let mut cells = vec![format!("{ratio}")];
        for s in per_method {
            cells.extend(s.values().iter().map(|&v| short(v)));
        }
        println!("{}", cells.join("  "));
    }
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| with_path(e, path))?;
        let mut w = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            writeln!(w, "{}", header.join(","))?;
            for (ratio, per_method) in &rows {
                let mut cells = vec![format!("{ratio}")];
                for s in per_method {
                    cells.extend(s.values().iter().map(|v| format!("{v}")));
                }
                writeln!(w, "{}", cells.join(","))?;
            }
            w.flush()
        };
        write().map_err(|e| with_path(e, path))?;
    }
    Ok(())
}

fn columns() -> Vec<String> {
    let mut out = vec!["ratio".to_owned()];
    for m in METHODS {
        out.extend(METRICS.iter().map(|k| format!("{m}_{k}")));
    }
    out
}

fn smoothed_kl(
    data: &[Trajectory],
    original: &Histogram,
    result: &PruneResult,
    grid: &GridSpec,
) -> trajprune::Result<f64> {
    let q = Histogram::from_trajectories(result.retained_indices.iter().map(|&i| &data[i]), grid)?;
    Ok(kl_divergence(original, &q, default_epsilon(&q))?.as_f64())
}
