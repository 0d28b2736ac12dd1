//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Expected values come from the reference code at the bottom of this file,
//! which recomputes entropies from scratch over `BTreeMap` counts.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::Rng;
use trajprune::rng::{seeded_rng, shuffled_indices};
use trajprune::synth::Category;
use trajprune::{
    default_epsilon, generate_synthetic, kl_divergence, prune_entropy, prune_random, CellDelta,
    CellIndex, EntropyState, GridSpec, Histogram, PruneParams, SyntheticSpec, Trajectory, Waypoint,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Labelled results of one criterion; the label is empty for single checks.
type Check = fn() -> Vec<(String, Outcome)>;

fn main() {
    // name, runtime limit in seconds, check
    let criteria: [(&str, u64, Check); 8] = [
        ("analytic entropy", 1, || single(analytic_entropy())),
        ("incremental consistency", 30, || {
            single(incremental_consistency())
        }),
        ("greedy-oracle equivalence", 60, || single(greedy_oracle())),
        ("pruning-ratio exactness", 60, || single(ratio_exactness())),
        (
            "imbalanced synthetic at ratio 0.5",
            600,
            imbalanced_synthetic,
        ),
        ("linear scaling", 600, || single(linear_scaling())),
        ("cli determinism", 120, || single(cli_determinism())),
        ("streaming equivalence", 60, || {
            single(streaming_equivalence())
        }),
    ];
    let mut failed = 0;
    let mut total = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let results = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        for (label, o) in results {
            total += 1;
            let pass = o.pass && in_time;
            if !pass {
                failed += 1;
            }
            let label = if label.is_empty() {
                name.to_owned()
            } else {
                format!("{name} {label}")
            };
            let timing = if in_time {
                format!("{:.1}s", elapsed.as_secs_f64())
            } else {
                format!("{:.1}s, limit {limit}s", elapsed.as_secs_f64())
            };
            println!(
                "{} {label}: {} [{timing}]",
                if pass { "PASS" } else { "FAIL" },
                o.detail
            );
        }
    }
    println!("{}/{} criteria passed", total - failed, total);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn single(o: Outcome) -> Vec<(String, Outcome)> {
    vec![(String::new(), o)]
}

fn analytic_entropy() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1u64, 2, 4, 10, 1000] {
        let hist = Histogram::from_counts((0..k as i64).map(|i| (CellIndex::new(i, -i, 0), 7)));
        let state = EntropyState::from_histogram(hist.clone());
        let want = (k as f64).ln();
        worst = worst
            .max((hist.entropy() - want).abs())
            .max((state.entropy() - want).abs());
    }
    let h31 = Histogram::from_counts([(CellIndex::new(0, 0, 0), 3), (CellIndex::new(5, 0, 0), 1)]);
    let want31 = oracle::entropy_of([3u64, 1]);
    let err31 = (h31.entropy() - 0.562335).abs();
    outcome(
        worst < 1e-12 && err31 < 1e-6 && (want31 - 0.562335).abs() < 1e-6,
        format!(
            "max |H - ln k| = {worst:.1e}, H(3,1) = {:.6}",
            h31.entropy()
        ),
    )
}

fn incremental_consistency() -> Outcome {
    let mut rng = seeded_rng(2024);
    let mut worst: f64 = 0.0;
    let sequences = 1000;
    for _ in 0..sequences {
        let span = rng.random_range(1..=40i64);
        let mut state = EntropyState::new();
        let mut counts = BTreeMap::new();
        for _ in 0..rng.random_range(1..=60) {
            let cells: Vec<(CellIndex, u64)> = (0..rng.random_range(1..=6))
                .map(|_| {
                    let c =
                        CellIndex::new(rng.random_range(-span..=span), rng.random_range(0..3), 0);
                    (c, rng.random_range(1..=50))
                })
                .collect();
            for &(c, n) in &cells {
                *counts.entry(c).or_insert(0u64) += n;
            }
            state.apply(&CellDelta::from_counts(cells));
            worst =
                worst.max((state.entropy() - oracle::entropy_of(counts.values().copied())).abs());
        }
    }
    outcome(
        worst < 1e-9,
        format!("{sequences} sequences, max error {worst:.1e}"),
    )
}

/// Datasets of one-point trajectories over four unit cells.
fn assignments() -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    // every ordered assignment for n <= 6
    for n in 2..=6u32 {
        for code in 0..4usize.pow(n) {
            out.push((0..n).map(|k| (code / 4usize.pow(k)) % 4).collect());
        }
    }
    // every multiset of cells for 7 <= n <= 12
    for n in 7..=12usize {
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    let mut v = vec![0; a];
                    v.extend(std::iter::repeat_n(1, b));
                    v.extend(std::iter::repeat_n(2, c));
                    v.extend(std::iter::repeat_n(3, d));
                    out.push(v);
                }
            }
        }
    }
    out
}

fn greedy_oracle() -> Outcome {
    const CENTERS: [(f64, f64); 4] = [(0.5, 0.5), (1.5, 0.5), (0.5, 1.5), (1.5, 1.5)];
    let grid = GridSpec::planar(1.0).unwrap();
    let cases = assignments();
    let mut mismatches = 0;
    let mut checked = 0;
    for (case, cells) in cases.iter().enumerate() {
        let n = cells.len();
        let data: Vec<Trajectory> = cells
            .iter()
            .enumerate()
            .map(|(i, &c)| traj(format!("t{i}"), &[CENTERS[c]]))
            .collect();
        for ratio in [0.25, 0.5] {
            let seed = case as u64;
            let params = PruneParams {
                initial_size: 1,
                batch_size: n - 1,
                ..PruneParams::for_dataset(n, ratio, seed, grid)
            };
            let got = prune_entropy(&data, &params).unwrap().retained_indices;
            let want = oracle::single_batch(&data, ratio, seed);
            checked += 1;
            if got != want {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && checked >= 200,
        format!(
            "{checked} instances ({} datasets), {mismatches} mismatches",
            cases.len()
        ),
    )
}

fn ratio_exactness() -> Outcome {
    let all = generate_synthetic(&SyntheticSpec {
        count: 100_000,
        seed: 1,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let grid = GridSpec::default();
    let mut bad = Vec::new();
    let mut runs = 0;
    for n in [17usize, 100, 1001, 100_000] {
        let data = &all[..n];
        for ratio in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let want = ((1.0 - ratio) * n as f64).round() as usize;
            let e = prune_entropy(data, &PruneParams::for_dataset(n, ratio, 3, grid)).unwrap();
            let r = prune_random(data, ratio, 3, &grid, 0.0).unwrap();
            runs += 2;
            for (method, got) in [
                ("entropy", e.retained_ids.len()),
                ("random", r.retained_ids.len()),
            ] {
                if got != want {
                    bad.push(format!("{method} n={n} ratio={ratio}: {got} != {want}"));
                }
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{runs} runs exact")
    } else {
        bad.join("; ")
    };
    outcome(bad.is_empty(), detail)
}

fn imbalanced_synthetic() -> Vec<(String, Outcome)> {
    let spec = SyntheticSpec {
        count: 100_000,
        ..SyntheticSpec::default()
    };
    let data = generate_synthetic(&spec).unwrap();
    let grid = GridSpec::default();
    let is_turn: Vec<bool> = data
        .iter()
        .map(|t| Category::from_id(t.id()).is_some_and(Category::is_turn))
        .collect();
    let turns = is_turn.iter().filter(|&&b| b).count() as f64;
    let p = Histogram::from_trajectories(&data, &grid).unwrap();
    let h_original = p.entropy();

    #[derive(Default)]
    struct Totals {
        h: f64,
        turn_fraction: f64,
        kl_smoothed: f64,
        kl_infinite: usize,
        coverage: Vec<f64>,
    }
    let (mut ent, mut rnd) = (Totals::default(), Totals::default());
    let seeds = 10;
    for seed in 0..seeds {
        let e = prune_entropy(
            &data,
            &PruneParams::for_dataset(data.len(), 0.5, seed, grid),
        )
        .unwrap();
        let r = prune_random(&data, 0.5, seed, &grid, 0.0).unwrap();
        for (tot, res) in [(&mut ent, &e), (&mut rnd, &r)] {
            let q =
                Histogram::from_trajectories(res.retained_indices.iter().map(|&i| &data[i]), &grid)
                    .unwrap();
            tot.h += res.report.entropy_pruned;
            tot.turn_fraction +=
                res.retained_indices.iter().filter(|&&i| is_turn[i]).count() as f64 / turns;
            tot.kl_smoothed += kl_divergence(&p, &q, default_epsilon(&q)).unwrap().as_f64();
            tot.kl_infinite += usize::from(res.report.kl_original_vs_pruned.is_infinite());
            tot.coverage.push(res.report.support_coverage);
        }
    }
    let k = seeds as f64;
    let (he, hr) = (ent.h / k, rnd.h / k);
    let (te, tr) = (ent.turn_fraction / k, rnd.turn_fraction / k);
    let (ke, kr) = (ent.kl_smoothed / k, rnd.kl_smoothed / k);
    let coverage_ok = ent.coverage.iter().zip(&rnd.coverage).all(|(e, r)| e >= r);
    let worst_cov = ent
        .coverage
        .iter()
        .zip(&rnd.coverage)
        .map(|(e, r)| e - r)
        .fold(f64::INFINITY, f64::min);
    vec![
        (
            "(a) entropy margin".into(),
            outcome(
                he - hr >= 0.05 * h_original,
                format!(
                    "H_pruned entropy {he:.4} vs random {hr:.4}, margin {:.4} >= {:.4}",
                    he - hr,
                    0.05 * h_original
                ),
            ),
        ),
        (
            "(b) turn retention".into(),
            outcome(
                te >= 2.0 * tr,
                format!(
                    "turn fraction entropy {te:.4} vs random {tr:.4}, ratio {:.4} (need >= 2)",
                    te / tr
                ),
            ),
        ),
        (
            "(c) support coverage".into(),
            outcome(
                coverage_ok,
                format!("entropy >= random in every seed, min difference {worst_cov:.4}"),
            ),
        ),
        (
            "KL smoothed mean".into(),
            outcome(
                ke <= kr,
                format!("mean KL(P||Q) entropy {ke:.4} vs random {kr:.4}"),
            ),
        ),
        (
            "KL infinite rate".into(),
            outcome(
                ent.kl_infinite <= rnd.kl_infinite,
                format!(
                    "entropy {}/{seeds} vs random {}/{seeds}",
                    ent.kl_infinite, rnd.kl_infinite
                ),
            ),
        ),
    ]
}

fn median_prune_time(data: &[Trajectory]) -> f64 {
    let params = PruneParams::for_dataset(data.len(), 0.5, 0, GridSpec::default());
    let mut times: Vec<f64> = (0..3)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(prune_entropy(data, &params).unwrap());
            start.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[1]
}

fn linear_scaling() -> Outcome {
    let data = generate_synthetic(&SyntheticSpec {
        count: 400_000,
        seed: 2,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let small = median_prune_time(&data[..200_000]);
    let large = median_prune_time(&data);
    let ratio = large / small;
    outcome(
        ratio <= 2.5,
        format!("median {small:.3}s at 2e5, {large:.3}s at 4e5, ratio {ratio:.2}"),
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trajprune"))
}

fn run_ok(cmd: &mut Command) -> std::process::Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.jsonl");
    run_ok(bin().args([
        "gen",
        "--count",
        "50000",
        "--seed",
        "5",
        "--output",
        p(&input),
    ]));
    let mut runs = Vec::new();
    for (k, threads) in ["1", "1", "4", "4"].iter().enumerate() {
        let ids = dir.path().join(format!("ids{k}.txt"));
        let output = dir.path().join(format!("out{k}.jsonl"));
        run_ok(bin().args([
            "prune",
            "--input",
            p(&input),
            "--output",
            p(&output),
            "--ids-out",
            p(&ids),
            "--ratio",
            "0.4",
            "--seed",
            "7",
            "--threads",
            threads,
        ]));
        runs.push((
            std::fs::read(&ids).unwrap(),
            std::fs::read(&output).unwrap(),
        ));
    }
    let same = runs.iter().all(|r| *r == runs[0]);
    let n_ids = runs[0].0.iter().filter(|&&b| b == b'\n').count();
    outcome(
        same && n_ids == 30_000,
        format!("{n_ids} retained ids, identical over runs and threads 1/4: {same}"),
    )
}

/// Runs the filter and returns (stdout, decisions), each decision being
/// the id, verdict and gain columns of the verbose log.
fn filter_run(state: Option<&Path>, policy: &[&str], input: &[u8]) -> (Vec<u8>, Vec<String>) {
    use std::io::Write;
    let mut cmd = bin();
    cmd.arg("filter").args(policy).arg("--verbose");
    if let Some(s) = state {
        cmd.args(["--state", p(s)]);
    }
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let bytes = input.to_vec();
    let writer = std::thread::spawn(move || stdin.write_all(&bytes).unwrap());
    let out = child.wait_with_output().unwrap();
    writer.join().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let decisions = String::from_utf8(out.stderr)
        .unwrap()
        .lines()
        .map(|l| l.split_once('\t').unwrap().1.to_owned())
        .collect();
    (out.stdout, decisions)
}

fn streaming_equivalence() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.jsonl");
    run_ok(bin().args([
        "gen",
        "--count",
        "10000",
        "--seed",
        "9",
        "--output",
        p(&input),
    ]));
    let text = std::fs::read(&input).unwrap();
    let lines: Vec<&[u8]> = text.split_inclusive(|&b| b == b'\n').collect();

    let policies: [&[&str]; 2] = [
        &[
            "--policy",
            "top-fraction",
            "--keep-fraction",
            "0.4",
            "--window",
            "500",
        ],
        &["--policy", "threshold", "--threshold", "0"],
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for policy in policies {
        let (whole_out, whole_dec) = filter_run(None, policy, &text);
        for cuts in [&[5000usize][..], &[1, 2417, 7771]] {
            let state = dir.path().join("state.csv");
            let _ = std::fs::remove_file(&state);
            let (mut out, mut dec) = (Vec::new(), Vec::new());
            let mut bounds = vec![0];
            bounds.extend_from_slice(cuts);
            bounds.push(lines.len());
            for w in bounds.windows(2) {
                let (o, d) = filter_run(Some(&state), policy, &lines[w[0]..w[1]].concat());
                out.extend(o);
                dec.extend(d);
            }
            pass &= out == whole_out && dec == whole_dec;
        }
        let accepted = whole_dec
            .iter()
            .filter(|d| d.contains("\taccept\t"))
            .count();
        details.push(format!(
            "{} {accepted}/{} accepted",
            policy[1],
            whole_dec.len()
        ));
    }
    outcome(
        pass,
        format!("{}; resumed runs identical: {pass}", details.join(", ")),
    )
}

fn traj(id: String, pts: &[(f64, f64)]) -> Trajectory {
    Trajectory::new(
        id,
        pts.iter()
            .map(|&(x, y)| Waypoint::new(x, y, 0.0).unwrap())
            .collect(),
    )
    .unwrap()
}

/// From-scratch reference computations.
mod oracle {
    use std::collections::BTreeMap;

    use super::{shuffled_indices, Trajectory};

    type Counts = BTreeMap<(i64, i64), u64>;

    pub fn entropy_of(counts: impl IntoIterator<Item = u64>) -> f64 {
        let counts: Vec<u64> = counts.into_iter().collect();
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return 0.0;
        }
        -counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n as f64;
                p * p.ln()
            })
            .sum::<f64>()
    }

    fn add(counts: &mut Counts, t: &Trajectory) {
        for p in t.points() {
            *counts
                .entry((p.x.floor() as i64, p.y.floor() as i64))
                .or_insert(0) += 1;
        }
    }

    fn gain(counts: &Counts, t: &Trajectory) -> f64 {
        let mut with = counts.clone();
        add(&mut with, t);
        entropy_of(with.values().copied()) - entropy_of(counts.values().copied())
    }

    /// One seed trajectory, then every other candidate scored once against
    /// it and the best `round((1 - ratio)·n) - 1` kept, ties in shuffled
    /// order. Unit cells.
    pub fn single_batch(data: &[Trajectory], ratio: f64, seed: u64) -> Vec<usize> {
        let order = shuffled_indices(data.len(), seed);
        let keep = ((1.0 - ratio) * data.len() as f64).round() as usize;
        let mut counts = Counts::new();
        add(&mut counts, &data[order[0]]);
        let rest = &order[1..];
        let gains: Vec<f64> = rest.iter().map(|&i| gain(&counts, &data[i])).collect();
        let mut idx: Vec<usize> = (0..rest.len()).collect();
        idx.sort_by(|&a, &b| {
            if (gains[a] - gains[b]).abs() < 1e-9 {
                std::cmp::Ordering::Equal
            } else {
                gains[b].total_cmp(&gains[a])
            }
        });
        let mut out = vec![order[0]];
        out.extend(idx[..keep - 1].iter().map(|&j| rest[j]));
        out
    }
}
