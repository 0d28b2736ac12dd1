use std::io::{BufRead, Write};

use anyhow::{Context, Result};
use trajprune::io::{jsonl, read_snapshot, write_snapshot, Snapshot};
use trajprune::{Error, FilterPolicy, GridSpec, StreamFilter};

use crate::args::{FilterArgs, PolicyArg};

fn policy(args: &FilterArgs) -> trajprune::Result<FilterPolicy> {
    let unused = |flag: &str| {
        Error::Config(format!(
            "{flag} is not used by the {:?} policy",
            args.policy
        ))
    };
    let policy = match args.policy {
        PolicyArg::Threshold => {
            if args.keep_fraction.is_some() {
                return Err(unused("--keep-fraction"));
            }
            if args.window.is_some() {
                return Err(unused("--window"));
            }
            let threshold = args
                .threshold
                .ok_or_else(|| Error::Config("--policy threshold requires --threshold".into()))?;
            FilterPolicy::Threshold { threshold }
        }
        PolicyArg::TopFraction => {
            if args.threshold.is_some() {
                return Err(unused("--threshold"));
            }
            match (args.keep_fraction, args.window) {
                (Some(keep_fraction), Some(window)) => FilterPolicy::TopFraction {
                    keep_fraction,
                    window,
                },
                _ => {
                    return Err(Error::Config(
                        "--policy top-fraction requires --keep-fraction and --window".into(),
                    ))
                }
            }
        }
    };
    policy.validate()?;
    Ok(policy)
}

fn build_filter(args: &FilterArgs, policy: FilterPolicy) -> trajprune::Result<StreamFilter> {
    let saved = match &args.state {
        Some(path) if path.exists() => Some(read_snapshot(path)?),
        _ => None,
    };
    let Some(snap) = saved else {
        let grid = GridSpec::new(
            args.cell_size.unwrap_or(trajprune::grid::DEFAULT_CELL_SIZE),
            args.heading_bins.unwrap_or(0),
        )?;
        return StreamFilter::new(grid, policy);
    };
    if args.cell_size.is_some_and(|c| c != snap.grid.cell_size)
        || args
            .heading_bins
            .is_some_and(|k| k != snap.grid.heading_bins)
    {
        return Err(Error::Config(format!(
            "grid flags do not match the saved state (cell_size={} heading_bins={})",
            snap.grid.cell_size, snap.grid.heading_bins
        )));
    }
    StreamFilter::resume(
        snap.state,
        snap.recent_gains.unwrap_or_default(),
        snap.grid,
        policy,
    )
}

pub fn run(args: FilterArgs) -> Result<()> {
    let policy = policy(&args)?;
    let mut filter = build_filter(&args, policy)?;

    let stdin = std::io::stdin().lock();
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    for (i, line) in stdin.lines().enumerate() {
        let line = line.context("reading standard input")?;
        if line.trim().is_empty() {
            continue;
        }
        let t = jsonl::parse_record(&line, "stdin", i + 1)?;
        let outcome = filter.step(&t)?;
        if outcome.accepted() {
            writeln!(stdout, "{line}").context("writing standard output")?;
        }
        if args.verbose {
            let verdict = if outcome.accepted() {
                "accept"
            } else {
                "reject"
            };
            writeln!(
                stderr,
                "{}\t{}\t{verdict}\t{:e}",
                i + 1,
                t.id(),
                outcome.gain
            )?;
        }
    }
    stdout.flush().context("writing standard output")?;

    if let Some(path) = &args.state {
        let recent_gains = match policy {
            FilterPolicy::TopFraction { .. } => Some(filter.recent_gains()),
            FilterPolicy::Threshold { .. } => None,
        };
        let snap = Snapshot {
            grid: *filter.grid(),
            state: filter.state().clone(),
            recent_gains,
        };
        let mut tmp = path.clone().into_os_string();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        write_snapshot(&snap, &tmp)?;
        std::fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))?;
    }
    Ok(())
}
