//! Seeded synthetic datasets and plain-text dataset I/O.
//!
//! Samples are drawn cluster by cluster: all points of cluster 0 first, then
//! cluster 1, and so on. Gaussian noise comes from the ziggurat sampler of
//! `rand_distr::StandardNormal` driven by a ChaCha8 stream keyed by the seed,
//! so a given seed reproduces the same dataset on every platform.
//!
//! # File formats
//!
//! - Data: UTF-8 text, one sample per line, values separated by whitespace
//!   and/or commas. Blank lines and lines starting with `#` are skipped.
//!   Values are written with the shortest representation that round-trips
//!   exactly.
//! - Labels: one non-negative integer per line. An optional header ending
//!   with a line of dashes (`---...`) is skipped, which accepts the `.pa`
//!   partition files distributed with the S-sets.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::primitives::{DataMatrix, Seed};

/// Generating parameters and labels of a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub labels: Vec<usize>,
    /// Generating means, one row per cluster.
    pub true_centroids: DataMatrix,
    /// Designed spacing between neighbouring generating means.
    pub separation: f64,
    pub sigma: f64,
}

impl GroundTruth {
    pub fn k(&self) -> usize {
        self.true_centroids.n_samples()
    }
}

/// Number of points drawn for each cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointsPerCluster {
    Uniform(usize),
    /// One count per cluster, in cluster order.
    PerCluster(Vec<usize>),
}

impl PointsPerCluster {
    fn resolve(&self, k: usize) -> Result<Vec<usize>> {
        let counts = match self {
            PointsPerCluster::Uniform(n) => vec![*n; k],
            PointsPerCluster::PerCluster(v) => {
                if v.len() != k {
                    return Err(Error::LengthMismatch {
                        left: v.len(),
                        right: k,
                    });
                }
                v.clone()
            }
        };
        if counts.contains(&0) {
            return Err(Error::invalid("points_per_cluster", "every count must be positive"));
        }
        Ok(counts)
    }
}

impl From<Vec<usize>> for PointsPerCluster {
    fn from(counts: Vec<usize>) -> Self {
        PointsPerCluster::PerCluster(counts)
    }
}

impl From<usize> for PointsPerCluster {
    fn from(n: usize) -> Self {
        PointsPerCluster::Uniform(n)
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn sample_blobs(means: &DataMatrix, sigma: f64, counts: &[usize], seed: Seed) -> (DataMatrix, Vec<usize>) {
    let d = means.n_features();
    let total: usize = counts.iter().sum();
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(total * d);
    let mut labels = Vec::with_capacity(total);
    for (k, (&count, mean)) in counts.iter().zip(means.rows()).enumerate() {
        for _ in 0..count {
            for &m in mean {
                let z: f64 = rng.sample(StandardNormal);
                values.push(m + sigma * z);
            }
            labels.push(k);
        }
    }
    let x = DataMatrix::new(total, d, values).expect("finite means and sigma give finite samples");
    (x, labels)
}

/// Isotropic Gaussian blobs centred on a `rows` x `cols` grid.
///
/// Cluster `r * cols + c` has mean `(r * separation, c * separation)`.
pub fn grid_blobs(
    rows: usize,
    cols: usize,
    separation: f64,
    sigma: f64,
    points: impl Into<PointsPerCluster>,
    seed: Seed,
) -> Result<(DataMatrix, GroundTruth)> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("rows/cols", "grid must have at least one cell"));
    }
    check_positive("separation", separation)?;
    check_positive("sigma", sigma)?;
    let k = rows * cols;
    let counts = points.into().resolve(k)?;
    let mut means = Vec::with_capacity(k * 2);
    for r in 0..rows {
        for c in 0..cols {
            means.push(r as f64 * separation);
            means.push(c as f64 * separation);
        }
    }
    let means = DataMatrix::new(k, 2, means)?;
    let (x, labels) = sample_blobs(&means, sigma, &counts, seed);
    Ok((
        x,
        GroundTruth {
            labels,
            true_centroids: means,
            separation,
            sigma,
        },
    ))
}

/// `k` Gaussian blobs in `d` dimensions; cluster `m` is centred on the
/// constant vector `m * per_coord_offset`.
///
/// Consecutive means are `per_coord_offset * d` apart in Manhattan distance
/// and `per_coord_offset * sqrt(d)` apart in Euclidean distance, which is what
/// `GroundTruth::separation` records.
pub fn highdim_blobs(
    k: usize,
    d: usize,
    per_coord_offset: f64,
    sigma: f64,
    points: impl Into<PointsPerCluster>,
    seed: Seed,
) -> Result<(DataMatrix, GroundTruth)> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    check_positive("per_coord_offset", per_coord_offset)?;
    check_positive("sigma", sigma)?;
    let counts = points.into().resolve(k)?;
    let mut means = Vec::with_capacity(k * d);
    for m in 0..k {
        means.extend(std::iter::repeat_n(m as f64 * per_coord_offset, d));
    }
    let means = DataMatrix::new(k, d, means)?;
    let (x, labels) = sample_blobs(&means, sigma, &counts, seed);
    Ok((
        x,
        GroundTruth {
            labels,
            true_centroids: means,
            separation: per_coord_offset * (d as f64).sqrt(),
            sigma,
        },
    ))
}

/// Smallest distance between two samples carrying different labels, by
/// exhaustive pairwise comparison.
pub fn min_inter_cluster_distance(x: &DataMatrix, labels: &[usize]) -> Result<f64> {
    if labels.len() != x.n_samples() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: x.n_samples(),
        });
    }
    let mut best = f64::INFINITY;
    for i in 0..x.n_samples() {
        for j in (i + 1)..x.n_samples() {
            if labels[i] != labels[j] {
                let s = crate::primitives::squared_euclidean(x.row(i), x.row(j));
                best = best.min(s);
            }
        }
    }
    Ok(best.sqrt())
}

/// Grid blobs whose minimum inter-cluster sample distance is verified by
/// brute force to exceed `theta`.
///
/// Attempt `a` draws with `seed.derive(a)`; the first dataset that passes the
/// certificate is returned together with the seed that produced it. Fails
/// once `max_attempts` datasets have been rejected, reporting the largest
/// minimum distance seen.
#[allow(clippy::too_many_arguments)]
pub fn certified_sparse_grid(
    rows: usize,
    cols: usize,
    separation: f64,
    sigma: f64,
    points: impl Into<PointsPerCluster>,
    theta: f64,
    seed: Seed,
    max_attempts: usize,
) -> Result<(DataMatrix, GroundTruth, Seed)> {
    let points = points.into();
    let mut best_seen = 0.0f64;
    for attempt in 0..max_attempts {
        let s = seed.derive(attempt as u64);
        let (x, gt) = grid_blobs(rows, cols, separation, sigma, points.clone(), s)?;
        let gap = min_inter_cluster_distance(&x, &gt.labels)?;
        if gap > theta {
            return Ok((x, gt, s));
        }
        best_seen = best_seen.max(gap);
    }
    Err(Error::invalid(
        "fixture",
        format!(
            "no theta-sparse dataset at theta={theta} in {max_attempts} attempts \
             (largest minimum inter-cluster distance {best_seen:.4})"
        ),
    ))
}

/// Paths written by [`write_dataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPaths {
    pub data: PathBuf,
    pub labels: PathBuf,
    pub centroids: PathBuf,
}

impl DatasetPaths {
    pub fn for_prefix(prefix: impl AsRef<Path>) -> Self {
        let p = prefix.as_ref().as_os_str();
        let with = |ext: &str| {
            let mut s = p.to_os_string();
            s.push(ext);
            PathBuf::from(s)
        };
        Self {
            data: with(".data.txt"),
            labels: with(".labels.txt"),
            centroids: with(".centroids.txt"),
        }
    }
}

/// Writes `<prefix>.data.txt`, `<prefix>.labels.txt` and
/// `<prefix>.centroids.txt`.
pub fn write_dataset(x: &DataMatrix, gt: &GroundTruth, prefix: impl AsRef<Path>) -> Result<DatasetPaths> {
    let paths = DatasetPaths::for_prefix(prefix);
    write_matrix(&paths.data, x)?;
    write_labels(&paths.labels, &gt.labels)?;
    write_matrix(&paths.centroids, &gt.true_centroids)?;
    Ok(paths)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Renders a matrix in the data file format.
pub fn format_matrix(x: &DataMatrix) -> String {
    let mut out = String::with_capacity(x.n_samples() * x.n_features() * 20);
    for row in x.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn format_labels(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, x: &DataMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(format_matrix(x).as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_labels(labels)).map_err(io_err(path))
}

/// Parses the data file format.
pub fn parse_matrix(text: &str, path: &Path) -> Result<DataMatrix> {
    let mut values = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let before = values.len();
        for token in trimmed.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = token.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("not a number: `{token}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("non-finite value `{token}`"),
                });
            }
            values.push(v);
        }
        let n = values.len() - before;
        match width {
            None => width = Some(n),
            Some(w) if w != n => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("expected {w} values, found {n}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let width = width.ok_or(Error::Empty("data file contains no samples"))?;
    DataMatrix::new(rows, width, values)
}

/// Parses a label file.
pub fn parse_labels(text: &str, path: &Path) -> Result<Vec<usize>> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| {
            let t = l.trim();
            t.len() >= 3 && t.chars().all(|c| c == '-')
        })
        .map_or(0, |i| i + 1);
    let mut labels = Vec::new();
    for (idx, line) in lines.iter().enumerate().skip(start) {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let l: usize = t.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            reason: format!("not a non-negative integer label: `{t}`"),
        })?;
        labels.push(l);
    }
    if labels.is_empty() {
        return Err(Error::Empty("label file contains no labels"));
    }
    Ok(labels)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Loads a data file (including the published S1-S4 text files).
pub fn load_sset(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    parse_matrix(&read_text(path)?, path)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DataMatrix> {
    load_sset(path)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    parse_labels(&read_text(path)?, path)
}
