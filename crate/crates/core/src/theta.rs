//! Threshold grouping: sequential sparse grouping ([`tsg`]), shuffled dense
//! grouping ([`tdg`]) and nonlinear chaining ([`tnc`]).

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{fold_mean, seeded_permutation, DataMatrix, Metric, Seed};

/// How a cluster centroid evolves when a sample is inserted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentroidUpdate {
    /// Centroid is the mean of all members inserted so far.
    #[default]
    RunningMean,
    /// Centroid stays at the founding sample.
    Frozen,
}

impl std::str::FromStr for CentroidUpdate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "running_mean" | "running-mean" => Ok(CentroidUpdate::RunningMean),
            "frozen" => Ok(CentroidUpdate::Frozen),
            other => Err(Error::invalid(
                "centroid_update",
                format!("unknown mode `{other}` (expected running_mean or frozen)"),
            )),
        }
    }
}

/// Parameters shared by the threshold algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    /// Insertion radius around a centroid.
    pub theta: f64,
    /// Number of shuffled passes in [`tdg`].
    pub iterations: usize,
    /// Chaining radius for [`tnc`] (strict).
    pub epsilon: f64,
    /// Upper bound on chaining merge rounds.
    pub max_chain_rounds: usize,
    pub centroid_update: CentroidUpdate,
}

impl ThetaParams {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            ..Self::default()
        }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_centroid_update(mut self, mode: CentroidUpdate) -> Self {
        self.centroid_update = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_theta(self.theta)?;
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        check_epsilon(self.epsilon)?;
        if self.max_chain_rounds == 0 {
            return Err(Error::invalid("max_chain_rounds", "must be at least 1"));
        }
        Ok(())
    }
}

impl Default for ThetaParams {
    fn default() -> Self {
        Self {
            theta: 0.0,
            iterations: 1,
            epsilon: 0.0,
            max_chain_rounds: 100,
            centroid_update: CentroidUpdate::RunningMean,
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::invalid("theta", format!("must be >= 0, got {theta}")));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::invalid(
            "epsilon",
            format!("must be >= 0, got {epsilon}"),
        ));
    }
    Ok(())
}

/// A hard partition of samples with one centroid per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    labels: Vec<usize>,
    centroids: DataMatrix,
    sizes: Vec<usize>,
}

impl Clustering {
    /// Validates that `labels` and `sizes` agree and every cluster is non-empty.
    pub fn new(labels: Vec<usize>, centroids: DataMatrix) -> Result<Self> {
        let k = centroids.n_samples();
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            if l >= k {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    clusters: k,
                });
            }
            sizes[l] += 1;
        }
        if labels.is_empty() {
            return Err(Error::Empty("clustering has no samples"));
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::invalid(
                "labels",
                format!("cluster {empty} has no members"),
            ));
        }
        Ok(Self {
            labels,
            centroids,
            sizes,
        })
    }

    /// Builds a clustering from arbitrary labels: ids are compacted in order
    /// of first appearance and centroids are the member means.
    pub fn from_labels(x: &DataMatrix, labels: &[usize]) -> Result<Self> {
        if labels.len() != x.n_samples() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: x.n_samples(),
            });
        }
        let compact = compact_labels(labels);
        let k = compact.iter().max().map_or(0, |m| m + 1);
        let centroids = mean_by_label(x, &compact, k);
        Self::new(compact, centroids)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn centroids(&self) -> &DataMatrix {
        &self.centroids
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }
}

/// Instrumentation collected while clustering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// One per (sample, centroid) distance computed.
    pub distance_evaluations: u64,
    /// Seconds on a monotonic clock.
    pub wall_time: f64,
    pub shuffles_performed: usize,
}

/// Relabels to `0..K` in order of first appearance.
pub(crate) fn compact_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Mean of the rows carrying each label in `0..k`. Labels with no members get
/// a zero row; callers are expected to have compacted labels.
pub(crate) fn mean_by_label(x: &DataMatrix, labels: &[usize], k: usize) -> DataMatrix {
    let d = x.n_features();
    let mut acc = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (row, &l) in x.rows().zip(labels) {
        counts[l] += 1;
        for (a, v) in acc[l * d..(l + 1) * d].iter_mut().zip(row) {
            *a += v;
        }
    }
    for (chunk, &c) in acc.chunks_exact_mut(d).zip(&counts) {
        if c > 0 {
            let inv = c as f64;
            chunk.iter_mut().for_each(|a| *a /= inv);
        }
    }
    DataMatrix::new(k, d, acc).expect("means of finite rows are finite")
}

struct Grouping {
    labels: Vec<usize>,
    centroids: Vec<f64>,
    sizes: Vec<usize>,
    evaluations: u64,
}

/// Sequential threshold pass over `n` rows supplied by `row`.
fn group_sequential<'a, F>(
    n: usize,
    d: usize,
    row: F,
    theta: f64,
    metric: Metric,
    update: CentroidUpdate,
) -> Grouping
where
    F: Fn(usize) -> &'a [f64],
{
    let threshold = metric.to_surrogate(theta);
    let mut labels = Vec::with_capacity(n);
    let mut centroids: Vec<f64> = row(0).to_vec();
    let mut sizes = vec![1usize];
    let mut evaluations = 0u64;
    labels.push(0);

    for i in 1..n {
        let x = row(i);
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in centroids.chunks_exact(d).enumerate() {
            let bound = best.map_or(threshold, |(_, b)| b.min(threshold));
            let s = metric.surrogate_bounded(x, c, bound);
            if s <= threshold && best.is_none_or(|(_, b)| s < b) {
                best = Some((k, s));
            }
        }
        evaluations += sizes.len() as u64;
        match best {
            Some((k, _)) => {
                if update == CentroidUpdate::RunningMean {
                    fold_mean(&mut centroids[k * d..(k + 1) * d], sizes[k], x);
                }
                sizes[k] += 1;
                labels.push(k);
            }
            None => {
                labels.push(sizes.len());
                sizes.push(1);
                centroids.extend_from_slice(x);
            }
        }
    }
    Grouping {
        labels,
        centroids,
        sizes,
        evaluations,
    }
}

fn grouping_to_clustering(g: Grouping, d: usize) -> Clustering {
    let k = g.sizes.len();
    Clustering {
        labels: g.labels,
        centroids: DataMatrix::new(k, d, g.centroids).expect("centroids of finite rows are finite"),
        sizes: g.sizes,
    }
}

/// Single-pass threshold grouping in row order with running-mean centroids.
///
/// Each sample joins the nearest cluster whose centroid is within `theta`
/// (ties go to the lower cluster id) or founds a new cluster.
pub fn tsg(x: &DataMatrix, theta: f64, metric: Metric) -> Result<(Clustering, RunStats)> {
    tsg_with(x, theta, metric, CentroidUpdate::RunningMean)
}

/// [`tsg`] with an explicit centroid update mode.
pub fn tsg_with(
    x: &DataMatrix,
    theta: f64,
    metric: Metric,
    update: CentroidUpdate,
) -> Result<(Clustering, RunStats)> {
    check_theta(theta)?;
    let start = Instant::now();
    let g = group_sequential(x.n_samples(), x.n_features(), |i| x.row(i), theta, metric, update);
    let stats = RunStats {
        distance_evaluations: g.evaluations,
        wall_time: start.elapsed().as_secs_f64(),
        shuffles_performed: 0,
    };
    Ok((grouping_to_clustering(g, x.n_features()), stats))
}

/// Nearest-centroid labels with no threshold; ties go to the lowest index.
pub fn assign_to_centroids(x: &DataMatrix, centroids: &DataMatrix, metric: Metric) -> Result<Vec<usize>> {
    if x.n_features() != centroids.n_features() {
        return Err(Error::DimensionMismatch {
            left: x.n_features(),
            right: centroids.n_features(),
        });
    }
    Ok(nearest_labels(x, centroids.as_slice(), metric))
}

pub(crate) fn nearest_labels(x: &DataMatrix, centroids: &[f64], metric: Metric) -> Vec<usize> {
    let d = x.n_features();
    x.rows()
        .map(|row| nearest(row, centroids, d, metric).0)
        .collect()
}

/// Index and surrogate distance of the closest centroid.
#[inline]
pub(crate) fn nearest(row: &[f64], centroids: &[f64], d: usize, metric: Metric) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (k, c) in centroids.chunks_exact(d).enumerate() {
        let s = metric.surrogate_bounded(row, c, best.1);
        if s < best.1 {
            best = (k, s);
        }
    }
    best
}

/// Shuffled threshold grouping.
///
/// Runs [`tsg`] over `iterations` seeded permutations of the rows (iteration
/// `i` uses `seed.derive(i)`), pools the resulting centroids in iteration
/// order, groups the pool again with the same `theta`, and finally assigns
/// every sample to its nearest pooled centroid. Pooled centroids that attract
/// no samples are dropped; the remaining centroids are the member means.
pub fn tdg(
    x: &DataMatrix,
    theta: f64,
    iterations: usize,
    seed: Seed,
    metric: Metric,
) -> Result<(Clustering, RunStats)> {
    let params = ThetaParams::new(theta).with_iterations(iterations);
    tdg_with(x, &params, seed, metric)
}

/// [`tdg`] driven by a full parameter set (uses `theta`, `iterations` and
/// `centroid_update`).
pub fn tdg_with(
    x: &DataMatrix,
    params: &ThetaParams,
    seed: Seed,
    metric: Metric,
) -> Result<(Clustering, RunStats)> {
    check_theta(params.theta)?;
    if params.iterations == 0 {
        return Err(Error::invalid("iterations", "must be at least 1"));
    }
    let start = Instant::now();
    let n = x.n_samples();
    let d = x.n_features();

    let runs: Vec<Grouping> = (0..params.iterations)
        .into_par_iter()
        .map(|it| {
            let perm = seeded_permutation(n, seed.derive(it as u64)).expect("n >= 1");
            group_sequential(n, d, |j| x.row(perm[j]), params.theta, metric, params.centroid_update)
        })
        .collect();

    let mut evaluations: u64 = runs.iter().map(|g| g.evaluations).sum();
    let pool_len: usize = runs.iter().map(|g| g.sizes.len()).sum();
    let mut pool = Vec::with_capacity(pool_len * d);
    for g in &runs {
        pool.extend_from_slice(&g.centroids);
    }
    drop(runs);

    let meta = group_sequential(
        pool_len,
        d,
        |j| &pool[j * d..(j + 1) * d],
        params.theta,
        metric,
        params.centroid_update,
    );
    evaluations += meta.evaluations;
    let meta_k = meta.sizes.len();

    let raw = nearest_labels(x, &meta.centroids, metric);
    evaluations += (n * meta_k) as u64;

    let clustering = finalize_assignment(x, &raw, meta_k);
    let stats = RunStats {
        distance_evaluations: evaluations,
        wall_time: start.elapsed().as_secs_f64(),
        shuffles_performed: params.iterations,
    };
    Ok((clustering, stats))
}

/// Drops empty clusters (keeping the relative order of the rest) and
/// recomputes centroids as member means.
fn finalize_assignment(x: &DataMatrix, raw: &[usize], k: usize) -> Clustering {
    let mut counts = vec![0usize; k];
    raw.iter().for_each(|&l| counts[l] += 1);
    let mut remap = vec![usize::MAX; k];
    let mut next = 0;
    for (old, &c) in counts.iter().enumerate() {
        if c > 0 {
            remap[old] = next;
            next += 1;
        }
    }
    let labels: Vec<usize> = raw.iter().map(|&l| remap[l]).collect();
    let centroids = mean_by_label(x, &labels, next);
    Clustering::new(labels, centroids).expect("every kept cluster has members")
}

/// Symmetric adjacency between centroid ids used by the chaining step.
///
/// Entry `k` always contains `k`; linking `j` and `k` inserts each id into the
/// other's set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainingList {
    sets: Vec<BTreeSet<usize>>,
}

impl ChainingList {
    pub fn new(k: usize) -> Self {
        Self {
            sets: (0..k).map(|i| BTreeSet::from([i])).collect(),
        }
    }

    /// Links every pair of centroids closer than `epsilon` (strict).
    pub fn from_centroids(centroids: &DataMatrix, epsilon: f64, metric: Metric) -> Result<Self> {
        check_epsilon(epsilon)?;
        let k = centroids.n_samples();
        let mut list = Self::new(k);
        let bound = metric.to_surrogate(epsilon);
        for j in 0..k {
            for i in (j + 1)..k {
                if metric.surrogate_bounded(centroids.row(j), centroids.row(i), bound) < bound {
                    list.link(j, i);
                }
            }
        }
        Ok(list)
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut list = Self::new(k);
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::invalid(
                    "edges",
                    format!("edge ({a}, {b}) out of range for {k} centroids"),
                ));
            }
            list.link(a, b);
        }
        Ok(list)
    }

    pub fn link(&mut self, a: usize, b: usize) {
        self.sets[a].insert(b);
        self.sets[b].insert(a);
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Merges linked sets transitively, repeating until the number of
    /// distinct clusters stops changing (at most `max_rounds` rounds), then
    /// maps every id to the smallest id it is chained to.
    pub fn relabel(&self, max_rounds: usize) -> Vec<usize> {
        let k = self.sets.len();
        let mut sets = self.sets.clone();
        let mut labels: Vec<usize> = (0..k).collect();
        let mut clusters = k;
        for _ in 0..max_rounds.max(1) {
            let mut forest = MinForest::new(k);
            for (a, set) in sets.iter().enumerate() {
                for &b in set {
                    forest.union(a, b);
                }
            }
            labels = (0..k).map(|i| forest.find(i)).collect();
            let mut members: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
            for (i, &root) in labels.iter().enumerate() {
                members[root].insert(i);
            }
            sets = labels.iter().map(|&root| members[root].clone()).collect();
            let now = members.iter().filter(|m| !m.is_empty()).count();
            if now == clusters {
                break;
            }
            clusters = now;
        }
        labels
    }
}

/// Disjoint-set forest whose representative is always the smallest id.
struct MinForest {
    parent: Vec<usize>,
}

impl MinForest {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Maps every centroid to the smallest centroid id it is chained to, where
/// two centroids are chained when a path of pairwise distances `< epsilon`
/// connects them.
pub fn chain_merge(centroids: &DataMatrix, epsilon: f64, metric: Metric) -> Result<Vec<usize>> {
    Ok(ChainingList::from_centroids(centroids, epsilon, metric)?.relabel(ThetaParams::default().max_chain_rounds))
}

/// Output of [`tnc`].
#[derive(Debug, Clone)]
pub struct TncClustering {
    /// Final partition. The centroid of each cluster is the centroid of its
    /// lowest-id micro-cluster; merged centroids are not recomputed.
    pub clustering: Clustering,
    /// Micro-cluster ids (into `micro.centroids()`) chained into each cluster.
    pub chains: Vec<Vec<usize>>,
    /// The [`tdg`] result the chains were built from.
    pub micro: Clustering,
    pub stats: RunStats,
}

/// Nonlinear chaining: [`tdg`] followed by [`chain_merge`] of its centroids.
pub fn tnc(x: &DataMatrix, params: &ThetaParams, seed: Seed, metric: Metric) -> Result<TncClustering> {
    params.validate()?;
    let start = Instant::now();
    let (micro, mut stats) = tdg_with(x, params, seed, metric)?;
    let k = micro.k();
    let list = ChainingList::from_centroids(micro.centroids(), params.epsilon, metric)?;
    stats.distance_evaluations += (k * k.saturating_sub(1) / 2) as u64;
    let chain = list.relabel(params.max_chain_rounds);

    // Chain roots are the smallest ids, so compacting in id order keeps the
    // smallest-index ordering.
    let compact = compact_labels(&chain);
    let k_out = compact.iter().max().map_or(0, |m| m + 1);
    let mut chains = vec![Vec::new(); k_out];
    for (micro_id, &c) in compact.iter().enumerate() {
        chains[c].push(micro_id);
    }
    let d = x.n_features();
    let mut reps = Vec::with_capacity(k_out * d);
    for members in &chains {
        reps.extend_from_slice(micro.centroids().row(members[0]));
    }
    let labels: Vec<usize> = micro.labels().iter().map(|&l| compact[l]).collect();
    let clustering = Clustering::new(labels, DataMatrix::new(k_out, d, reps)?)?;
    stats.wall_time = start.elapsed().as_secs_f64();
    Ok(TncClustering {
        clustering,
        chains,
        micro,
        stats,
    })
}
