//! Tools for choosing `theta` and reading cluster structure: threshold
//! sweeps, plateau detection, cluster-size elbows, top-M selection and the
//! ordering-based sparsity probe.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::nmi;
use crate::primitives::{seeded_permutation, DataMatrix, Metric, Seed};
use crate::theta::{mean_by_label, nearest, tdg, tsg, Clustering};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub k_found: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nmi: Option<f64>,
    /// Seconds.
    pub wall_time: f64,
}

/// Cluster counts over an increasing grid of thresholds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new(rows: Vec<SweepRow>) -> Result<Self> {
        check_increasing(rows.iter().map(|r| r.theta))?;
        if rows.iter().any(|r| r.k_found == 0) {
            return Err(Error::invalid("rows", "k_found must be at least 1"));
        }
        Ok(Self { rows })
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.theta).collect()
    }

    pub fn ks(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.k_found).collect()
    }
}

fn check_increasing(thetas: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev: Option<f64> = None;
    for t in thetas {
        if t.is_nan() || t < 0.0 {
            return Err(Error::invalid("thetas", format!("must be >= 0, got {t}")));
        }
        if let Some(p) = prev {
            if t <= p {
                return Err(Error::invalid(
                    "thetas",
                    format!("must be strictly increasing ({p} then {t})"),
                ));
            }
        }
        prev = Some(t);
    }
    Ok(())
}

/// Runs [`tdg`] once per threshold with the same seed and records the number
/// of clusters found, the wall time and, when `truth` is given, the NMI.
pub fn theta_sweep(
    x: &DataMatrix,
    thetas: &[f64],
    iterations: usize,
    seed: Seed,
    truth: Option<&[usize]>,
    metric: Metric,
) -> Result<SweepResult> {
    if thetas.is_empty() {
        return Err(Error::Empty("theta grid is empty"));
    }
    check_increasing(thetas.iter().copied())?;
    if let Some(t) = truth {
        if t.len() != x.n_samples() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: x.n_samples(),
            });
        }
    }
    let rows = thetas
        .par_iter()
        .map(|&theta| {
            let (c, stats) = tdg(x, theta, iterations, seed, metric)?;
            let score = truth.map(|t| nmi(c.labels(), t)).transpose()?;
            Ok(SweepRow {
                theta,
                k_found: c.k(),
                nmi: score,
                wall_time: stats.wall_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SweepResult::new(rows)
}

/// Evenly spaced grid from `min` to `max` inclusive.
///
/// Points are computed as `min + i * step` rather than by accumulation, and
/// `max` is included when it falls on the grid up to a relative slack of
/// 1e-9 steps.
pub fn theta_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && min >= 0.0) {
        return Err(Error::invalid("theta range", "bounds must be finite and >= 0"));
    }
    if max < min {
        return Err(Error::invalid("theta range", format!("max {max} is below min {min}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid("theta step", "must be positive"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

/// Maximal run of consecutive grid points with the same cluster count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRange {
    pub lo: f64,
    pub hi: f64,
    pub k: usize,
    /// Number of grid points in the run.
    pub points: usize,
}

impl ThetaRange {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Run-length encodes the sweep by cluster count, optionally keeping only
/// runs with `k == target_k`.
pub fn optimal_theta_ranges(sweep: &SweepResult, target_k: Option<usize>) -> Vec<ThetaRange> {
    let mut ranges: Vec<ThetaRange> = Vec::new();
    for row in &sweep.rows {
        match ranges.last_mut() {
            Some(last) if last.k == row.k_found => {
                last.hi = row.theta;
                last.points += 1;
            }
            _ => ranges.push(ThetaRange {
                lo: row.theta,
                hi: row.theta,
                k: row.k_found,
                points: 1,
            }),
        }
    }
    if let Some(k) = target_k {
        ranges.retain(|r| r.k == k);
    }
    ranges
}

/// Widest range (first on ties) among `ranges`.
pub fn widest_range(ranges: &[ThetaRange]) -> Option<ThetaRange> {
    ranges
        .iter()
        .copied()
        .reduce(|best, r| if r.width() > best.width() { r } else { best })
}

/// Estimates the number of real clusters from an over-segmented result.
///
/// Sizes are sorted in descending order and the estimate is the position of
/// the largest ratio between consecutive sizes (ties go to the later
/// position). Without any drop, every cluster counts.
pub fn cluster_size_elbow(clustering: &Clustering) -> (usize, Vec<usize>) {
    elbow_from_sizes(clustering.sizes())
}

/// [`cluster_size_elbow`] on raw cluster sizes.
pub fn elbow_from_sizes(sizes: &[usize]) -> (usize, Vec<usize>) {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    if sorted.len() <= 1 {
        return (sorted.len().max(1), sorted);
    }
    let mut best = (1.0f64, sorted.len());
    for i in 0..sorted.len() - 1 {
        let ratio = sorted[i] as f64 / sorted[i + 1].max(1) as f64;
        if ratio > 1.0 && ratio >= best.0 {
            best = (ratio, i + 1);
        }
    }
    (best.1, sorted)
}

/// Keeps the `m` most populated clusters (ties to the lower id), reassigns
/// every sample to its nearest kept centroid and recomputes the kept
/// centroids as member means.
///
/// Should a kept cluster lose all its members in the reassignment, it takes
/// over the sample farthest from its assigned centroid so that exactly `m`
/// clusters remain.
pub fn top_m_clusters(x: &DataMatrix, clustering: &Clustering, m: usize, metric: Metric) -> Result<Clustering> {
    let k = clustering.k();
    if m == 0 || m > k {
        return Err(Error::invalid("m", format!("must be in 1..={k}, got {m}")));
    }
    if clustering.n_samples() != x.n_samples() {
        return Err(Error::LengthMismatch {
            left: clustering.n_samples(),
            right: x.n_samples(),
        });
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| clustering.sizes()[b].cmp(&clustering.sizes()[a]).then(a.cmp(&b)));
    let mut kept = order[..m].to_vec();
    kept.sort_unstable();
    let kept_centroids = clustering.centroids().select_rows(&kept)?;

    let d = x.n_features();
    let mut labels = Vec::with_capacity(x.n_samples());
    let mut cost = Vec::with_capacity(x.n_samples());
    for row in x.rows() {
        let (l, s) = nearest(row, kept_centroids.as_slice(), d, metric);
        labels.push(l);
        cost.push(s);
    }
    let mut counts = vec![0usize; m];
    labels.iter().for_each(|&l| counts[l] += 1);
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let far = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(b.cmp(&a)))
            .ok_or_else(|| Error::invalid("m", "more clusters requested than samples"))?;
        counts[labels[far]] -= 1;
        labels[far] = empty;
        counts[empty] = 1;
        cost[far] = 0.0;
    }
    let centroids = mean_by_label(x, &labels, m);
    Clustering::new(labels, centroids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsity {
    /// Every ordering produced the same partition.
    ThetaSparseProbable,
    /// Some ordering changed the partition.
    ThetaDense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityVerdict {
    pub verdict: Sparsity,
    pub repeats_run: usize,
    /// Index of the first repeat whose partition differed from repeat 0.
    pub first_disagreement: Option<usize>,
}

/// Canonical form of a partition: labels renumbered by first appearance in
/// sample order. Two labelings describe the same partition iff their
/// canonical forms are equal.
pub fn canonical_partition(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Labels of [`tsg`] run over the rows in `perm` order, reported in the
/// original row order.
pub fn tsg_under_permutation(x: &DataMatrix, theta: f64, perm: &[usize], metric: Metric) -> Result<Vec<usize>> {
    let shuffled = x.select_rows(perm)?;
    let (c, _) = tsg(&shuffled, theta, metric)?;
    let mut labels = vec![0usize; x.n_samples()];
    for (pos, &orig) in perm.iter().enumerate() {
        labels[orig] = c.labels()[pos];
    }
    Ok(labels)
}

/// Probes whether `x` is theta-sparse by running [`tsg`] under `repeats`
/// seeded orderings (ordering `r` uses `seed.derive(r)`) and comparing the
/// partitions. Stops at the first disagreement.
pub fn sparsity_check(x: &DataMatrix, theta: f64, repeats: usize, seed: Seed, metric: Metric) -> Result<SparsityVerdict> {
    if repeats < 2 {
        return Err(Error::invalid("repeats", "at least two orderings are needed"));
    }
    let mut reference: Option<Vec<usize>> = None;
    for r in 0..repeats {
        let perm = seeded_permutation(x.n_samples(), seed.derive(r as u64))?;
        let part = canonical_partition(&tsg_under_permutation(x, theta, &perm, metric)?);
        match &reference {
            None => reference = Some(part),
            Some(first) if *first != part => {
                return Ok(SparsityVerdict {
                    verdict: Sparsity::ThetaDense,
                    repeats_run: r + 1,
                    first_disagreement: Some(r),
                });
            }
            _ => {}
        }
    }
    Ok(SparsityVerdict {
        verdict: Sparsity::ThetaSparseProbable,
        repeats_run: repeats,
        first_disagreement: None,
    })
}
