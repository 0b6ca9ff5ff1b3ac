//! Clustering quality: normalized mutual information, centroid recovery
//! score and inertia.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::primitives::{squared_euclidean, DataMatrix, Metric};
use crate::theta::Clustering;

/// Joint counts between two labelings of the same samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    total: usize,
}

impl ContingencyTable {
    /// Rows follow the distinct values of `a` in order of first appearance,
    /// columns those of `b`.
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::Empty("labelings are empty"));
        }
        let (ra, nr) = dense_ids(a);
        let (rb, nc) = dense_ids(b);
        let mut counts = vec![vec![0usize; nc]; nr];
        for (&i, &j) in ra.iter().zip(&rb) {
            counts[i][j] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..nc).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            total: a.len(),
        })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Mutual information in nats.
    pub fn mutual_information(&self) -> f64 {
        let n = self.total as f64;
        let mut terms = Vec::new();
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                let outer = self.row_sums[i] as f64 * self.col_sums[j] as f64;
                terms.push((c / n) * ((c * n).ln() - outer.ln()));
            }
        }
        // Summing in sorted order makes the result independent of which
        // labeling indexes the rows.
        terms.sort_by(f64::total_cmp);
        terms.iter().sum::<f64>().max(0.0)
    }

    pub fn row_entropy(&self) -> f64 {
        entropy(&self.row_sums, self.total)
    }

    pub fn col_entropy(&self) -> f64 {
        entropy(&self.col_sums, self.total)
    }
}

fn dense_ids(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let ids = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (ids, map.len())
}

fn entropy(sums: &[usize], total: usize) -> f64 {
    let n = total as f64;
    let h: f64 = sums
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

/// Normalized mutual information with arithmetic-mean normalization and
/// natural logarithms.
///
/// Two constant labelings score 1; a constant labeling against a non-constant
/// one scores 0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(a, b)?;
    let ha = table.row_entropy();
    let hb = table.col_entropy();
    let single_a = table.row_sums().len() == 1;
    let single_b = table.col_sums().len() == 1;
    if single_a && single_b {
        return Ok(1.0);
    }
    if single_a || single_b {
        return Ok(0.0);
    }
    if is_bijection(&table) {
        // Identical partitions: avoids a result of 1 - ulp from rounding.
        return Ok(1.0);
    }
    let mi = table.mutual_information();
    let denom = 0.5 * (ha + hb);
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// True when every row and every column of the table has exactly one
/// non-zero cell, i.e. the labelings describe the same partition.
fn is_bijection(table: &ContingencyTable) -> bool {
    let nr = table.row_sums().len();
    let nc = table.col_sums().len();
    nr == nc
        && table
            .counts()
            .iter()
            .all(|row| row.iter().filter(|&&c| c > 0).count() == 1)
}

/// Percentage of ground-truth centroids recovered within `tol`.
///
/// Pairs are matched greedily: the globally closest remaining
/// (truth, predicted) pair is taken first, and both sides leave the pool. A
/// truth centroid counts as identified when its matched squared distance is
/// at most `tol * tol`.
pub fn ssd_centroid_score(predicted: &DataMatrix, truth: &DataMatrix, tol: f64) -> Result<f64> {
    if predicted.n_features() != truth.n_features() {
        return Err(Error::DimensionMismatch {
            left: predicted.n_features(),
            right: truth.n_features(),
        });
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid("tol", format!("must be >= 0, got {tol}")));
    }
    let mut pairs = Vec::with_capacity(predicted.n_samples() * truth.n_samples());
    for (t, trow) in truth.rows().enumerate() {
        for (p, prow) in predicted.rows().enumerate() {
            pairs.push((squared_euclidean(trow, prow), t, p));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut truth_used = vec![false; truth.n_samples()];
    let mut pred_used = vec![false; predicted.n_samples()];
    let limit = tol * tol;
    let mut identified = 0usize;
    for (d2, t, p) in pairs {
        if truth_used[t] || pred_used[p] {
            continue;
        }
        truth_used[t] = true;
        pred_used[p] = true;
        if d2 <= limit {
            identified += 1;
        }
    }
    Ok(100.0 * identified as f64 / truth.n_samples() as f64)
}

/// Sum over samples of the squared distance to the centroid of their label.
pub fn inertia(x: &DataMatrix, clustering: &Clustering, metric: Metric) -> Result<f64> {
    inertia_of(x, clustering.labels(), clustering.centroids(), metric)
}

/// [`inertia`] for raw labels and centroids.
pub fn inertia_of(x: &DataMatrix, labels: &[usize], centroids: &DataMatrix, metric: Metric) -> Result<f64> {
    if labels.len() != x.n_samples() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: x.n_samples(),
        });
    }
    if centroids.n_features() != x.n_features() {
        return Err(Error::DimensionMismatch {
            left: x.n_features(),
            right: centroids.n_features(),
        });
    }
    let k = centroids.n_samples();
    let mut total = 0.0;
    for (row, &l) in x.rows().zip(labels) {
        if l >= k {
            return Err(Error::LabelOutOfRange { label: l, clusters: k });
        }
        let d = metric.distance_unchecked(row, centroids.row(l));
        total += d * d;
    }
    Ok(total)
}
