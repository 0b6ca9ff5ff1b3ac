//! `theta`: generate datasets, run threshold clustering and baselines, sweep
//! thresholds, benchmark methods and evaluate label files.

mod commands;
mod io;
mod method;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use theta_core::{CentroidUpdate, Metric};

use crate::method::MethodSpec;

#[derive(Debug, Parser)]
#[command(name = "theta", version, about = "Distance-threshold clustering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset with ground truth.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Cluster a data file with one method.
    Cluster(ClusterArgs),
    /// Run threshold grouping over a grid of thresholds.
    Sweep(SweepArgs),
    /// Compare several methods on one dataset.
    Bench(BenchArgs),
    /// Compare two label files.
    Eval(EvalArgs),
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Gaussian blobs centred on a 2-D grid.
    Grid(GridArgs),
    /// Gaussian blobs on the diagonal of a high-dimensional space.
    Highdim(HighdimArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    /// Distance between neighbouring grid means.
    #[arg(long)]
    sep: f64,
    #[arg(long)]
    sigma: f64,
    /// Points per cluster: one integer, or a comma-separated list with one
    /// entry per cluster.
    #[arg(long, value_parser = parse_counts)]
    per_cluster: Counts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes <PREFIX>.data.txt, .labels.txt and .centroids.txt.
    #[arg(long, default_value = "dataset")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct HighdimArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    /// Per-coordinate offset between consecutive cluster means.
    #[arg(long)]
    offset: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long, value_parser = parse_counts)]
    per_cluster: Counts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "dataset")]
    out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Counts(Vec<usize>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    let counts = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("invalid count {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Counts(counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Tsg,
    Tdg,
    Tnc,
    Kmeans,
}

impl MethodName {
    fn as_str(self) -> &'static str {
        match self {
            MethodName::Tsg => "tsg",
            MethodName::Tdg => "tdg",
            MethodName::Tnc => "tnc",
            MethodName::Kmeans => "kmeans",
        }
    }
}

#[derive(Debug, Args)]
struct ClusterArgs {
    method: MethodName,
    /// Data file, one sample per line.
    #[arg(long)]
    data: PathBuf,
    /// Distance threshold (tsg, tdg, tnc).
    #[arg(long)]
    theta: Option<f64>,
    /// Number of shuffled passes (tdg, tnc).
    #[arg(long, default_value_t = 1)]
    iters: usize,
    /// Chaining distance (tnc).
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Maximum chaining rounds (tnc).
    #[arg(long, default_value_t = 100)]
    max_chain_rounds: usize,
    #[arg(long, default_value = "running_mean", value_parser = parse_update)]
    centroid_update: CentroidUpdate,
    /// Number of clusters (kmeans).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    /// Ground-truth labels; enables NMI.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Ground-truth centroids; enables the centroid recovery score.
    #[arg(long)]
    truth_centroids: Option<PathBuf>,
    /// Centroid match tolerance; defaults to theta / 2.
    #[arg(long)]
    ssd_tol: Option<f64>,
    /// Where to write the labels.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the JSON report (it is always printed to stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    theta_min: f64,
    #[arg(long)]
    theta_max: f64,
    #[arg(long)]
    theta_step: f64,
    #[arg(long, default_value_t = 1)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Only report threshold ranges yielding this many clusters.
    #[arg(long)]
    target_k: Option<usize>,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    /// Write the JSON result here as well as to stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write one CSV row per threshold here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    truth_centroids: Option<PathBuf>,
    /// Method with parameters, e.g. `tdg:theta=3.6,iters=50` or
    /// `kmeans:k=25,n_init=10`. Repeat for several methods.
    #[arg(long = "method", required = true, value_parser = method::parse_method_spec)]
    methods: Vec<MethodSpec>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    repeats: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Centroid match tolerance shared by all methods; defaults to the
    /// smallest theta / 2 among the threshold methods.
    #[arg(long)]
    ssd_tol: Option<f64>,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    /// Write the JSON result here as well.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    labels_a: PathBuf,
    labels_b: PathBuf,
    #[arg(long, requires = "centroids_b")]
    centroids_a: Option<PathBuf>,
    #[arg(long, requires = "centroids_a")]
    centroids_b: Option<PathBuf>,
    /// Centroid match tolerance (required with centroid files).
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse::<Metric>().map_err(|e| e.to_string())
}

fn parse_update(s: &str) -> Result<CentroidUpdate, String> {
    s.parse::<CentroidUpdate>().map_err(|e| e.to_string())
}

/// A flag combination that parses but makes no sense; reported like a clap
/// usage error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Joins the error and its causes, skipping causes already spelled out by
/// the message before them.
fn error_chain(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !out.ends_with(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(GenCommand::Grid(a)) => commands::gen_grid(a),
        Command::Gen(GenCommand::Highdim(a)) => commands::gen_highdim(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Bench(a) => commands::bench(a),
        Command::Eval(a) => commands::eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", error_chain(&e));
            ExitCode::from(1)
        }
    }
}
