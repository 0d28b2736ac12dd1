//! Reference implementations used as test oracles. They share nothing with
//! the library's entropy path: binning is re-derived with `floor`, counts
//! live in a `BTreeMap`, and entropy is evaluated as `-Σ p ln p` from scratch
//! every time.
#![allow(dead_code)]

use std::collections::BTreeMap;

use trajprune::rng::shuffled_indices;
use trajprune::{Trajectory, Waypoint};

pub type Counts = BTreeMap<(i64, i64), u64>;

pub fn cells_of(t: &Trajectory, cell_size: f64) -> Vec<(i64, i64)> {
    t.points()
        .iter()
        .map(|p| {
            (
                (p.x / cell_size).floor() as i64,
                (p.y / cell_size).floor() as i64,
            )
        })
        .collect()
}

pub fn add(counts: &mut Counts, t: &Trajectory, cell_size: f64) {
    for c in cells_of(t, cell_size) {
        *counts.entry(c).or_insert(0) += 1;
    }
}

pub fn entropy(counts: &Counts) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    -counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

pub fn counts_of<'a>(ts: impl IntoIterator<Item = &'a Trajectory>, cell_size: f64) -> Counts {
    let mut c = Counts::new();
    for t in ts {
        add(&mut c, t, cell_size);
    }
    c
}

/// Gain of adding `t` to `counts`, by two full evaluations.
pub fn gain(counts: &Counts, t: &Trajectory, cell_size: f64) -> f64 {
    let mut with = counts.clone();
    add(&mut with, t, cell_size);
    entropy(&with) - entropy(counts)
}

/// Sorts candidate positions by gain, descending, keeping input order among
/// gains closer than `1e-9` (distinct gains in the small test instances
/// differ by far more than that).
pub fn rank(gains: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..gains.len()).collect();
    idx.sort_by(|&a, &b| {
        if (gains[a] - gains[b]).abs() < 1e-9 {
            std::cmp::Ordering::Equal
        } else {
            gains[b].total_cmp(&gains[a])
        }
    });
    idx
}

pub fn target(n: usize, ratio: f64) -> usize {
    ((1.0 - ratio) * n as f64).round() as usize
}

/// The batch-greedy procedure with every score recomputed from scratch.
/// Returns retained dataset positions in acceptance order.
pub fn reference_prune(
    data: &[Trajectory],
    ratio: f64,
    initial: usize,
    batch: usize,
    seed: u64,
    cell_size: f64,
) -> Vec<usize> {
    let order = shuffled_indices(data.len(), seed);
    let mut retained: Vec<usize> = order[..initial].to_vec();
    let mut counts = counts_of(retained.iter().map(|&i| &data[i]), cell_size);
    let mut processed = initial;
    for chunk in order[initial..].chunks(batch) {
        let gains: Vec<f64> = chunk
            .iter()
            .map(|&i| gain(&counts, &data[i], cell_size))
            .collect();
        processed += chunk.len();
        let quota = target(processed, ratio)
            .saturating_sub(retained.len())
            .min(chunk.len());
        for &j in &rank(&gains)[..quota] {
            add(&mut counts, &data[chunk[j]], cell_size);
            retained.push(chunk[j]);
        }
    }
    retained
}

pub fn traj(id: impl Into<String>, pts: &[(f64, f64)]) -> Trajectory {
    Trajectory::new(
        id,
        pts.iter()
            .map(|&(x, y)| Waypoint::new(x, y, 0.0).unwrap())
            .collect(),
    )
    .unwrap()
}
