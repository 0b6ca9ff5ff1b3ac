//! A clustering method together with its parameters, shared by `cluster` and
//! `bench`.

use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use theta_core::baselines::{kmeans, KMeansConfig};
use theta_core::theta::{tdg_with, tsg_with};
use theta_core::{tnc, CentroidUpdate, Clustering, DataMatrix, Metric, Seed, ThetaParams};

use crate::MethodName;

const VALID_METHODS: &str = "tsg, tdg, tnc, kmeans";

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub method: MethodName,
    pub theta: Option<f64>,
    pub iters: usize,
    pub epsilon: f64,
    pub max_chain_rounds: usize,
    pub centroid_update: CentroidUpdate,
    pub k: Option<usize>,
    pub n_init: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl MethodSpec {
    pub fn new(method: MethodName) -> Self {
        Self {
            method,
            theta: None,
            iters: 1,
            epsilon: 0.0,
            max_chain_rounds: 100,
            centroid_update: CentroidUpdate::RunningMean,
            k: None,
            n_init: 10,
            max_iter: 300,
            tol: 1e-4,
        }
    }

    /// Checks that the flags the method needs are present.
    pub fn check_required(&self) -> Result<(), String> {
        match self.method {
            MethodName::Kmeans if self.k.is_none() => Err("kmeans requires --k".into()),
            MethodName::Tsg | MethodName::Tdg | MethodName::Tnc if self.theta.is_none() => {
                Err(format!("{} requires --theta", self.method.as_str()))
            }
            _ => Ok(()),
        }
    }

    pub fn is_threshold(&self) -> bool {
        self.method != MethodName::Kmeans
    }

    fn theta_params(&self) -> ThetaParams {
        let mut p = ThetaParams::new(self.theta.unwrap_or(0.0))
            .with_iterations(self.iters)
            .with_epsilon(self.epsilon)
            .with_centroid_update(self.centroid_update);
        p.max_chain_rounds = self.max_chain_rounds;
        p
    }

    /// The parameters that matter for this method; the others are `None`.
    pub fn echo(&self) -> EchoedParams {
        let threshold = self.is_threshold();
        let shuffled = matches!(self.method, MethodName::Tdg | MethodName::Tnc);
        let chained = self.method == MethodName::Tnc;
        let km = self.method == MethodName::Kmeans;
        EchoedParams {
            theta: self.theta.filter(|_| threshold),
            iters: shuffled.then_some(self.iters),
            epsilon: chained.then_some(self.epsilon),
            max_chain_rounds: chained.then_some(self.max_chain_rounds),
            centroid_update: threshold.then(|| update_name(self.centroid_update).to_string()),
            k: self.k.filter(|_| km),
            n_init: km.then_some(self.n_init),
            max_iter: km.then_some(self.max_iter),
            tol: km.then_some(self.tol),
        }
    }

    /// Compact `name:key=value,...` form, as accepted by `bench --method`.
    pub fn label(&self) -> String {
        let e = self.echo();
        let mut parts = Vec::new();
        let mut push = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                parts.push(format!("{key}={v}"));
            }
        };
        push("theta", e.theta.map(|v| v.to_string()));
        push("iters", e.iters.map(|v| v.to_string()));
        push("epsilon", e.epsilon.filter(|&v| v != 0.0).map(|v| v.to_string()));
        push("k", e.k.map(|v| v.to_string()));
        push("n_init", e.n_init.map(|v| v.to_string()));
        if self.centroid_update != CentroidUpdate::RunningMean {
            push("centroid_update", e.centroid_update);
        }
        format!("{}:{}", self.method.as_str(), parts.join(","))
    }

    /// Runs the method once and times it on a monotonic clock.
    pub fn run(&self, x: &DataMatrix, seed: Seed, metric: Metric) -> Result<Outcome> {
        let start = Instant::now();
        let (clustering, evaluations) = match self.method {
            MethodName::Tsg => {
                let theta = self.theta.unwrap_or(0.0);
                let (c, s) = tsg_with(x, theta, metric, self.centroid_update)?;
                (c, s.distance_evaluations)
            }
            MethodName::Tdg => {
                let (c, s) = tdg_with(x, &self.theta_params(), seed, metric)?;
                (c, s.distance_evaluations)
            }
            MethodName::Tnc => {
                let out = tnc(x, &self.theta_params(), seed, metric)?;
                (out.clustering, out.stats.distance_evaluations)
            }
            MethodName::Kmeans => {
                let config = KMeansConfig::new(self.k.unwrap_or(0))
                    .with_n_init(self.n_init)
                    .with_max_iter(self.max_iter)
                    .with_tol(self.tol)
                    .with_seed(seed);
                let (c, s) = kmeans(x, &config, metric)?;
                (c, s.distance_evaluations)
            }
        };
        Ok(Outcome {
            clustering,
            distance_evaluations: evaluations,
            wall_time: start.elapsed().as_secs_f64(),
        })
    }
}

pub struct Outcome {
    pub clustering: Clustering,
    pub distance_evaluations: u64,
    pub wall_time: f64,
}

/// Method parameters as echoed in reports. Parameters that do not apply to
/// the method serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoedParams {
    pub theta: Option<f64>,
    pub iters: Option<usize>,
    pub epsilon: Option<f64>,
    pub max_chain_rounds: Option<usize>,
    pub centroid_update: Option<String>,
    pub k: Option<usize>,
    pub n_init: Option<usize>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
}

pub fn update_name(mode: CentroidUpdate) -> &'static str {
    match mode {
        CentroidUpdate::RunningMean => "running_mean",
        CentroidUpdate::Frozen => "frozen",
    }
}

/// Parses `name[:key=value,...]`.
pub fn parse_method_spec(s: &str) -> Result<MethodSpec, String> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let method = match name.trim() {
        "tsg" => MethodName::Tsg,
        "tdg" => MethodName::Tdg,
        "tnc" => MethodName::Tnc,
        "kmeans" => MethodName::Kmeans,
        other => return Err(format!("unknown method `{other}` (valid methods: {VALID_METHODS})")),
    };
    let mut spec = MethodSpec::new(method);
    for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got `{pair}`"))?;
        let value = value.trim();
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("invalid value for {key}: {e}"))
        }
        match key.trim() {
            "theta" => spec.theta = Some(num(key, value)?),
            "iters" => spec.iters = num(key, value)?,
            "epsilon" => spec.epsilon = num(key, value)?,
            "max_chain_rounds" => spec.max_chain_rounds = num(key, value)?,
            "centroid_update" => spec.centroid_update = value.parse().map_err(|e| format!("{e}"))?,
            "k" => spec.k = Some(num(key, value)?),
            "n_init" => spec.n_init = num(key, value)?,
            "max_iter" => spec.max_iter = num(key, value)?,
            "tol" => spec.tol = num(key, value)?,
            other => return Err(format!("unknown parameter `{other}` for {name}")),
        }
    }
    spec.check_required()?;
    Ok(spec)
}
