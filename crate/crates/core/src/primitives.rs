//! Shared numeric building blocks: the sample matrix, the distance metric,
//! seeded permutations and incremental means.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `n_samples` x `n_features` finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n_samples: usize,
    n_features: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from a flat row-major buffer, rejecting empty shapes
    /// and non-finite entries.
    pub fn new(n_samples: usize, n_features: usize, values: Vec<f64>) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Empty("data matrix has no samples"));
        }
        if n_features == 0 {
            return Err(Error::Empty("data matrix has no features"));
        }
        if values.len() != n_samples * n_features {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: n_samples * n_features,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_features,
                col: pos % n_features,
            });
        }
        Ok(Self {
            n_samples,
            n_features,
            values,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("data matrix has no samples"))?;
        let d = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), d, values)
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_features)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// New matrix whose row `j` is row `indices[j]` of `self`.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            if i >= self.n_samples {
                return Err(Error::invalid(
                    "indices",
                    format!("row {i} out of range for {} samples", self.n_samples),
                ));
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.n_features, values)
    }

    /// Column-wise mean of all rows.
    pub fn mean(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for row in self.rows() {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        let n = self.n_samples as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }
}

/// Distance function over feature vectors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
        }
    }

    /// Checked distance between two vectors of equal length.
    pub fn distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(self.distance_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn distance_unchecked(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean(a, b).sqrt(),
        }
    }

    /// Maps a distance threshold into surrogate units.
    #[inline]
    pub(crate) fn to_surrogate(self, d: f64) -> f64 {
        match self {
            Metric::Euclidean => d * d,
        }
    }

    /// Monotone surrogate of the distance used for comparisons (the squared
    /// distance for Euclidean), possibly cut short once it exceeds `bound`.
    #[inline]
    pub(crate) fn surrogate_bounded(self, a: &[f64], b: &[f64], bound: f64) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean_bounded(a, b, bound),
        }
    }

    #[inline]
    pub(crate) fn surrogate_to_distance(self, s: f64) -> f64 {
        match self {
            Metric::Euclidean => s.sqrt(),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            other => Err(Error::invalid(
                "metric",
                format!("unknown metric `{other}` (supported: euclidean)"),
            )),
        }
    }
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four independent accumulators let the compiler vectorise the loop.
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (rem_a, rem_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for j in 0..4 {
            let d = ca[j] - cb[j];
            acc[j] += d * d;
        }
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in rem_a.iter().zip(rem_b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

/// Squared Euclidean distance that may stop early once the partial sum
/// exceeds `bound`. The returned value is exact whenever it is `<= bound`, and
/// bit-identical to [`squared_euclidean`] when the loop runs to completion.
#[inline]
pub(crate) fn squared_euclidean_bounded(a: &[f64], b: &[f64], bound: f64) -> f64 {
    const BLOCK: usize = 32;
    if a.len() < 2 * BLOCK {
        return squared_euclidean(a, b);
    }
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (rem_a, rem_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (n, (ca, cb)) in chunks_a.zip(chunks_b).enumerate() {
        for j in 0..4 {
            let d = ca[j] - cb[j];
            acc[j] += d * d;
        }
        if (n + 1) % (BLOCK / 4) == 0 {
            let partial = (acc[0] + acc[1]) + (acc[2] + acc[3]);
            if partial > bound {
                return partial;
            }
        }
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in rem_a.iter().zip(rem_b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

/// Euclidean (or other metric) distance between `a` and `b`.
pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> Result<f64> {
    metric.distance(a, b)
}

/// Seed for every stochastic operation.
///
/// Streams are ChaCha8 keyed by the 64-bit value; derived sub-seeds pass
/// `(seed, index)` through the SplitMix64 finalizer so that iteration `i` of a
/// repeated procedure draws from its own stream regardless of execution order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn derive(self, index: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Uniformly random permutation of `0..n` (Fisher-Yates over a ChaCha8 stream).
pub fn seeded_permutation(n: usize, seed: Seed) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::invalid("n", "permutation length must be at least 1"));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed.rng());
    Ok(perm)
}

/// Folds `point` into a mean of `count` points.
pub fn running_mean_update(centroid: &[f64], count: usize, point: &[f64]) -> Result<(Vec<f64>, usize)> {
    if centroid.len() != point.len() {
        return Err(Error::DimensionMismatch {
            left: centroid.len(),
            right: point.len(),
        });
    }
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let mut out = centroid.to_vec();
    fold_mean(&mut out, count, point);
    Ok((out, count + 1))
}

/// In-place running mean: `centroid` currently averages `count` points.
#[inline]
pub(crate) fn fold_mean(centroid: &mut [f64], count: usize, point: &[f64]) {
    let n = count as f64;
    let inv = 1.0 / (n + 1.0);
    for (c, p) in centroid.iter_mut().zip(point) {
        *c = (n * *c + p) * inv;
    }
}
