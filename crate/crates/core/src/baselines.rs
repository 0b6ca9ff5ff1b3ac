//! K-Means baseline: K-Means++ seeding, Lloyd iterations and seeded restarts.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{DataMatrix, Metric, Seed};
use crate::theta::{nearest, Clustering, RunStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    /// Number of seeded restarts; the lowest-inertia run wins.
    pub n_init: usize,
    pub max_iter: usize,
    /// Convergence threshold on the largest centroid shift.
    pub tol: f64,
    pub seed: Seed,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            n_init: 10,
            max_iter: 300,
            tol: 1e-4,
            seed: Seed(0),
        }
    }

    pub fn with_n_init(mut self, n_init: usize) -> Self {
        self.n_init = n_init;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::invalid(
                "k",
                format!("must be in 1..={n}, got {}", self.k),
            ));
        }
        if self.n_init == 0 {
            return Err(Error::invalid("n_init", "must be at least 1"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::invalid("tol", format!("must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// K-Means++ seeding: the first center is a uniform sample; each further
/// center is drawn with probability proportional to the squared distance to
/// the nearest center chosen so far. When every remaining weight is zero
/// (duplicates), the next center is drawn uniformly among unchosen samples.
pub fn kmeanspp_init(x: &DataMatrix, k: usize, seed: Seed) -> Result<DataMatrix> {
    let (centers, _) = kmeanspp_indices(x, k, seed, Metric::Euclidean)?;
    x.select_rows(&centers)
}

/// Chosen row indices and the number of distance evaluations spent.
pub(crate) fn kmeanspp_indices(x: &DataMatrix, k: usize, seed: Seed, metric: Metric) -> Result<(Vec<usize>, u64)> {
    let n = x.n_samples();
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("must be in 1..={n}, got {k}")));
    }
    let mut rng = seed.rng();
    let mut chosen = vec![false; n];
    let mut centers = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    centers.push(first);
    chosen[first] = true;

    let mut weights: Vec<f64> = x
        .rows()
        .map(|r| {
            let d = metric.distance_unchecked(r, x.row(first));
            d * d
        })
        .collect();
    let mut evaluations = n as u64;

    while centers.len() < k {
        let next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(&mut rng),
            Err(_) => {
                let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
                free[rng.random_range(0..free.len())]
            }
        };
        centers.push(next);
        chosen[next] = true;
        let c = x.row(next);
        for (w, r) in weights.iter_mut().zip(x.rows()) {
            let d = metric.distance_unchecked(r, c);
            *w = w.min(d * d);
        }
        weights[next] = 0.0;
        evaluations += n as u64;
    }
    Ok((centers, evaluations))
}

/// Result of [`lloyd`].
#[derive(Debug, Clone)]
pub struct LloydOutcome {
    /// Labels from the last assignment step; centroids are their means.
    pub clustering: Clustering,
    pub inertia: f64,
    pub iters_run: usize,
    /// Assignment-step inertia of every iteration, in order.
    pub inertia_history: Vec<f64>,
    pub distance_evaluations: u64,
}

/// Lloyd iterations from `init`.
///
/// Each iteration assigns samples to their nearest centroid (ties to the
/// lowest index), re-seeds any empty cluster with the sample farthest from
/// its own centroid, and moves centroids to member means. Iteration stops
/// once the largest centroid shift is at most `tol` or after `max_iter`
/// iterations.
pub fn lloyd(x: &DataMatrix, init: &DataMatrix, max_iter: usize, tol: f64, metric: Metric) -> Result<LloydOutcome> {
    if init.n_features() != x.n_features() {
        return Err(Error::DimensionMismatch {
            left: x.n_features(),
            right: init.n_features(),
        });
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be at least 1"));
    }
    let n = x.n_samples();
    let d = x.n_features();
    let k = init.n_samples();
    let mut centroids = init.as_slice().to_vec();
    let mut labels = vec![0usize; n];
    let mut cost = vec![0.0f64; n];
    let mut history = Vec::new();
    let mut evaluations = 0u64;
    let mut iters_run = 0;

    loop {
        iters_run += 1;
        for (i, row) in x.rows().enumerate() {
            let (l, s) = nearest(row, &centroids, d, metric);
            labels[i] = l;
            cost[i] = s;
        }
        evaluations += (n * k) as u64;

        let mut counts = vec![0usize; k];
        labels.iter().for_each(|&l| counts[l] += 1);
        // Re-seed empty clusters: each takes the sample currently farthest
        // from its own centroid, which only lowers the objective.
        while let Some(empty) = counts.iter().position(|&c| c == 0) {
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .max_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(b.cmp(&a)));
            let Some(far) = far else { break };
            counts[labels[far]] -= 1;
            labels[far] = empty;
            counts[empty] = 1;
            cost[far] = 0.0;
            centroids[empty * d..(empty + 1) * d].copy_from_slice(x.row(far));
        }
        history.push(cost.iter().map(|&s| metric.surrogate_to_distance(s).powi(2)).sum());

        let mut next = vec![0.0; k * d];
        for (row, &l) in x.rows().zip(&labels) {
            for (a, v) in next[l * d..(l + 1) * d].iter_mut().zip(row) {
                *a += v;
            }
        }
        let mut shift = 0.0f64;
        for c in 0..k {
            let slot = &mut next[c * d..(c + 1) * d];
            if counts[c] == 0 {
                slot.copy_from_slice(&centroids[c * d..(c + 1) * d]);
            } else {
                let inv = counts[c] as f64;
                slot.iter_mut().for_each(|a| *a /= inv);
            }
            shift = shift.max(metric.distance_unchecked(slot, &centroids[c * d..(c + 1) * d]));
        }
        centroids = next;
        if shift <= tol || iters_run >= max_iter {
            break;
        }
    }

    let centroid_matrix = DataMatrix::new(k, d, centroids)?;
    let inertia = crate::metrics::inertia_of(x, &labels, &centroid_matrix, metric)?;
    let clustering = compact_nonempty(labels, centroid_matrix);
    Ok(LloydOutcome {
        clustering,
        inertia,
        iters_run,
        inertia_history: history,
        distance_evaluations: evaluations,
    })
}

/// Drops clusters that stayed empty (possible only with fewer distinct
/// samples than clusters).
fn compact_nonempty(labels: Vec<usize>, centroids: DataMatrix) -> Clustering {
    let k = centroids.n_samples();
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&l| counts[l] += 1);
    if counts.iter().all(|&c| c > 0) {
        return Clustering::new(labels, centroids).expect("all clusters populated");
    }
    let keep: Vec<usize> = (0..k).filter(|&c| counts[c] > 0).collect();
    let mut remap = vec![0usize; k];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let labels = labels.into_iter().map(|l| remap[l]).collect();
    let centroids = centroids.select_rows(&keep).expect("indices in range");
    Clustering::new(labels, centroids).expect("all kept clusters populated")
}

/// Best of `n_init` seeded K-Means++ + Lloyd trials by inertia (ties to the
/// lowest restart index). Restart `r` is seeded with `config.seed.derive(r)`.
pub fn kmeans(x: &DataMatrix, config: &KMeansConfig, metric: Metric) -> Result<(Clustering, RunStats)> {
    config.validate(x.n_samples())?;
    let start = Instant::now();
    let trials: Vec<Result<(LloydOutcome, u64)>> = (0..config.n_init)
        .into_par_iter()
        .map(|r| {
            let (idx, init_evals) = kmeanspp_indices(x, config.k, config.seed.derive(r as u64), metric)?;
            let init = x.select_rows(&idx)?;
            let out = lloyd(x, &init, config.max_iter, config.tol, metric)?;
            Ok((out, init_evals))
        })
        .collect();

    let mut evaluations = 0u64;
    let mut best: Option<LloydOutcome> = None;
    for trial in trials {
        let (out, init_evals) = trial?;
        evaluations += init_evals + out.distance_evaluations;
        if best.as_ref().is_none_or(|b| out.inertia < b.inertia) {
            best = Some(out);
        }
    }
    let best = best.expect("n_init >= 1");
    let stats = RunStats {
        distance_evaluations: evaluations,
        wall_time: start.elapsed().as_secs_f64(),
        shuffles_performed: 0,
    };
    Ok((best.clustering, stats))
}
