//! Subcommand implementations.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use theta_core::analysis::{optimal_theta_ranges, theta_grid, theta_sweep, widest_range, SweepRow, ThetaRange};
use theta_core::datagen::{format_labels, format_matrix, grid_blobs, highdim_blobs, DatasetPaths, GroundTruth, PointsPerCluster};
use theta_core::metrics::{nmi, ssd_centroid_score};
use theta_core::{Clustering, DataMatrix, Seed};

use crate::io::{read_labels, read_matrix, read_truth, write_atomic, write_json};
use crate::method::{EchoedParams, MethodSpec};
use crate::{usage, BenchArgs, ClusterArgs, Counts, EvalArgs, GridArgs, HighdimArgs, SweepArgs};

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn points(counts: Counts) -> PointsPerCluster {
    match counts.0.as_slice() {
        [n] => PointsPerCluster::Uniform(*n),
        _ => PointsPerCluster::PerCluster(counts.0),
    }
}

#[derive(Serialize)]
struct GenSummary {
    data: String,
    labels: String,
    centroids: String,
    n_samples: usize,
    n_features: usize,
    k: usize,
    separation: f64,
    sigma: f64,
    seed: u64,
}

fn write_generated(x: &DataMatrix, gt: &GroundTruth, prefix: &Path, seed: u64) -> Result<()> {
    let paths = DatasetPaths::for_prefix(prefix);
    write_atomic(&paths.data, format_matrix(x).as_bytes())?;
    write_atomic(&paths.labels, format_labels(&gt.labels).as_bytes())?;
    write_atomic(&paths.centroids, format_matrix(&gt.true_centroids).as_bytes())?;
    print_json(&GenSummary {
        data: paths.data.display().to_string(),
        labels: paths.labels.display().to_string(),
        centroids: paths.centroids.display().to_string(),
        n_samples: x.n_samples(),
        n_features: x.n_features(),
        k: gt.k(),
        separation: gt.separation,
        sigma: gt.sigma,
        seed,
    })
}

pub fn gen_grid(a: GridArgs) -> Result<()> {
    let (x, gt) = grid_blobs(a.rows, a.cols, a.sep, a.sigma, points(a.per_cluster), Seed(a.seed))?;
    write_generated(&x, &gt, &a.out, a.seed)
}

pub fn gen_highdim(a: HighdimArgs) -> Result<()> {
    let (x, gt) = highdim_blobs(a.k, a.d, a.offset, a.sigma, points(a.per_cluster), Seed(a.seed))?;
    write_generated(&x, &gt, &a.out, a.seed)
}

/// Result of one `cluster` invocation. Every field is always serialized;
/// unavailable values are `null`.
#[derive(Debug, Serialize)]
struct RunReport {
    method: &'static str,
    params: EchoedParams,
    seed: u64,
    metric: &'static str,
    data: String,
    n_samples: usize,
    n_features: usize,
    k_found: usize,
    nmi: Option<f64>,
    ssd: Option<f64>,
    ssd_tol: Option<f64>,
    wall_time: f64,
    distance_evaluations: u64,
    labels_out: Option<String>,
}

/// Quality of a clustering against whatever ground truth is available.
struct Scores {
    nmi: Option<f64>,
    ssd: Option<f64>,
}

fn score(clustering: &Clustering, truth: Option<&[usize]>, truth_centroids: Option<&DataMatrix>, ssd_tol: Option<f64>) -> Result<Scores> {
    let nmi = truth.map(|t| nmi(clustering.labels(), t)).transpose()?;
    let ssd = match (truth_centroids, ssd_tol) {
        (Some(tc), Some(tol)) => Some(ssd_centroid_score(clustering.centroids(), tc, tol)?),
        _ => None,
    };
    Ok(Scores { nmi, ssd })
}

fn load_truth_centroids(path: Option<&Path>, x: &DataMatrix) -> Result<Option<DataMatrix>> {
    let Some(path) = path else { return Ok(None) };
    let c = read_matrix(path)?;
    anyhow::ensure!(
        c.n_features() == x.n_features(),
        "{} has {} features but the data has {}",
        path.display(),
        c.n_features(),
        x.n_features()
    );
    Ok(Some(c))
}

// The negated comparisons below also reject NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_tol(tol: Option<f64>, flag: &str) -> Result<()> {
    match tol {
        Some(t) if !(t >= 0.0) => Err(usage(format!("{flag} must be >= 0, got {t}"))),
        _ => Ok(()),
    }
}

pub fn cluster(a: ClusterArgs) -> Result<()> {
    let spec = MethodSpec {
        method: a.method,
        theta: a.theta,
        iters: a.iters,
        epsilon: a.epsilon,
        max_chain_rounds: a.max_chain_rounds,
        centroid_update: a.centroid_update,
        k: a.k,
        n_init: a.n_init,
        max_iter: a.max_iter,
        tol: a.tol,
    };
    spec.check_required().map_err(usage)?;
    check_tol(a.ssd_tol, "--ssd-tol")?;
    let ssd_tol = a.ssd_tol.or(spec.theta.filter(|_| spec.is_threshold()).map(|t| t / 2.0));
    if a.truth_centroids.is_some() && ssd_tol.is_none() {
        return Err(usage("--truth-centroids with kmeans requires --ssd-tol"));
    }

    let x = read_matrix(&a.data)?;
    let truth = a.truth.as_deref().map(|p| read_truth(p, x.n_samples())).transpose()?;
    let truth_centroids = load_truth_centroids(a.truth_centroids.as_deref(), &x)?;

    let outcome = spec.run(&x, Seed(a.seed), a.metric)?;
    let scores = score(&outcome.clustering, truth.as_deref(), truth_centroids.as_ref(), ssd_tol)?;

    if let Some(out) = &a.out {
        write_atomic(out, format_labels(outcome.clustering.labels()).as_bytes())?;
    }
    let report = RunReport {
        method: spec.method.as_str(),
        params: spec.echo(),
        seed: a.seed,
        metric: a.metric.name(),
        data: a.data.display().to_string(),
        n_samples: x.n_samples(),
        n_features: x.n_features(),
        k_found: outcome.clustering.k(),
        nmi: scores.nmi,
        ssd: scores.ssd,
        ssd_tol: ssd_tol.filter(|_| scores.ssd.is_some()),
        wall_time: outcome.wall_time,
        distance_evaluations: outcome.distance_evaluations,
        labels_out: a.out.as_ref().map(|p| p.display().to_string()),
    };
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    print_json(&report)
}

#[derive(Serialize)]
struct SweepReport {
    iters: usize,
    seed: u64,
    metric: &'static str,
    rows: Vec<SweepRow>,
    /// Maximal runs of thresholds with equal cluster counts.
    ranges: Vec<ThetaRange>,
    target_k: Option<usize>,
    /// Runs with `k == target_k`; `null` without a target.
    target_ranges: Option<Vec<ThetaRange>>,
    /// Widest of `target_ranges` (or of `ranges` without a target).
    widest: Option<ThetaRange>,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn sweep(a: SweepArgs) -> Result<()> {
    if !(a.theta_step > 0.0) {
        return Err(usage(format!("--theta-step must be > 0, got {}", a.theta_step)));
    }
    if !(a.theta_min >= 0.0) {
        return Err(usage(format!("--theta-min must be >= 0, got {}", a.theta_min)));
    }
    if !(a.theta_min <= a.theta_max) {
        return Err(usage(format!(
            "--theta-min ({}) must not exceed --theta-max ({})",
            a.theta_min, a.theta_max
        )));
    }
    if a.iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let x = read_matrix(&a.data)?;
    let truth = a.truth.as_deref().map(|p| read_truth(p, x.n_samples())).transpose()?;
    let grid = theta_grid(a.theta_min, a.theta_max, a.theta_step)?;
    let result = theta_sweep(&x, &grid, a.iters, Seed(a.seed), truth.as_deref(), a.metric)?;

    let ranges = optimal_theta_ranges(&result, None);
    let target_ranges = a.target_k.map(|k| optimal_theta_ranges(&result, Some(k)));
    let widest = widest_range(target_ranges.as_deref().unwrap_or(&ranges));
    let report = SweepReport {
        iters: a.iters,
        seed: a.seed,
        metric: a.metric.name(),
        rows: result.rows,
        ranges,
        target_k: a.target_k,
        target_ranges,
        widest,
    };
    if let Some(path) = &a.csv {
        let mut csv = String::from("theta,k_found,nmi,wall_time\n");
        for r in &report.rows {
            let nmi = r.nmi.map(|v| v.to_string()).unwrap_or_default();
            csv.push_str(&format!("{},{},{},{}\n", r.theta, r.k_found, nmi, r.wall_time));
        }
        write_atomic(path, csv.as_bytes())?;
    }
    if let Some(path) = &a.json {
        write_json(path, &report)?;
    }
    print_json(&report)
}

#[derive(Serialize)]
struct BenchEntry {
    method: String,
    params: EchoedParams,
    k_found: usize,
    nmi: Option<f64>,
    ssd: Option<f64>,
    /// Median over repeats, in seconds.
    median_wall_time: f64,
    wall_times: Vec<f64>,
    distance_evaluations: u64,
}

#[derive(Serialize)]
struct BenchReport {
    data: String,
    repeats: u64,
    seed: u64,
    metric: &'static str,
    ssd_tol: Option<f64>,
    results: Vec<BenchEntry>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn bench(a: BenchArgs) -> Result<()> {
    check_tol(a.ssd_tol, "--ssd-tol")?;
    let ssd_tol = a.ssd_tol.or_else(|| {
        a.methods
            .iter()
            .filter(|m| m.is_threshold())
            .filter_map(|m| m.theta)
            .map(|t| t / 2.0)
            .reduce(f64::min)
    });
    let x = read_matrix(&a.data)?;
    let truth = a.truth.as_deref().map(|p| read_truth(p, x.n_samples())).transpose()?;
    let truth_centroids = load_truth_centroids(a.truth_centroids.as_deref(), &x)?;

    let mut results = Vec::with_capacity(a.methods.len());
    for spec in &a.methods {
        let mut times = Vec::with_capacity(a.repeats as usize);
        let mut first = None;
        for _ in 0..a.repeats {
            let outcome = spec
                .run(&x, Seed(a.seed), a.metric)
                .with_context(|| format!("running {}", spec.label()))?;
            times.push(outcome.wall_time);
            first.get_or_insert(outcome);
        }
        let outcome = first.expect("repeats is at least 1");
        let scores = score(&outcome.clustering, truth.as_deref(), truth_centroids.as_ref(), ssd_tol)?;
        results.push(BenchEntry {
            method: spec.label(),
            params: spec.echo(),
            k_found: outcome.clustering.k(),
            nmi: scores.nmi,
            ssd: scores.ssd,
            median_wall_time: median(&times),
            wall_times: times,
            distance_evaluations: outcome.distance_evaluations,
        });
    }
    let report = BenchReport {
        data: a.data.display().to_string(),
        repeats: a.repeats,
        seed: a.seed,
        metric: a.metric.name(),
        ssd_tol: ssd_tol.filter(|_| truth_centroids.is_some()),
        results,
    };
    print!("{}", bench_table(&report));
    if let Some(path) = &a.json {
        write_json(path, &report)?;
    }
    Ok(())
}

fn bench_table(report: &BenchReport) -> String {
    let fmt_opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"));
    let header = ["method", "K", "NMI", "SSD%", "median_s", "dist_evals"];
    let rows: Vec<[String; 6]> = report
        .results
        .iter()
        .map(|e| {
            [
                e.method.clone(),
                e.k_found.to_string(),
                fmt_opt(e.nmi, 4),
                fmt_opt(e.ssd, 1),
                format!("{:.4}", e.median_wall_time),
                e.distance_evaluations.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let mut parts = Vec::with_capacity(cells.len());
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            parts.push(if i == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") });
        }
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&header);
    for row in &rows {
        line(&row.each_ref().map(String::as_str));
    }
    out
}

#[derive(Serialize)]
struct EvalReport {
    n_samples: usize,
    k_a: usize,
    k_b: usize,
    nmi: f64,
    ssd: Option<f64>,
    ssd_tol: Option<f64>,
}

fn distinct(labels: &[usize]) -> usize {
    labels.iter().collect::<std::collections::HashSet<_>>().len()
}

pub fn eval(a: EvalArgs) -> Result<()> {
    check_tol(a.tol, "--tol")?;
    if a.centroids_a.is_some() && a.tol.is_none() {
        return Err(usage("--tol is required with centroid files"));
    }
    let la = read_labels(&a.labels_a)?;
    let lb = read_labels(&a.labels_b)?;
    anyhow::ensure!(
        la.len() == lb.len(),
        "label files differ in length: {} has {}, {} has {}",
        a.labels_a.display(),
        la.len(),
        a.labels_b.display(),
        lb.len()
    );
    let score = nmi(&la, &lb)?;
    let ssd = match (&a.centroids_a, &a.centroids_b, a.tol) {
        (Some(pa), Some(pb), Some(tol)) => {
            let ca = read_matrix(pa)?;
            let cb = read_matrix(pb)?;
            // `b` plays the role of the reference centroids.
            Some(ssd_centroid_score(&ca, &cb, tol)?)
        }
        _ => None,
    };
    print_json(&EvalReport {
        n_samples: la.len(),
        k_a: distinct(&la),
        k_b: distinct(&lb),
        nmi: score,
        ssd,
        ssd_tol: a.tol.filter(|_| ssd.is_some()),
    })
}
