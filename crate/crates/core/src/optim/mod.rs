//! Noisy black-box minimisers: BayesMGD, MGD and SPSA.

mod bayesmgd;
mod belief;
mod features;
pub mod harness;
mod hyper;
mod mgd;
mod objective;
mod spsa;

pub use bayesmgd::bayesmgd_run;
pub use belief::{bayes_update, SurrogateBelief};
pub use features::{model_features, n_model, points_per_iteration, surrogate_gradient, surrogate_value};
pub use hyper::{Hyperparams, OptimizerKind, OptimizerSpec, SpsaParams, PRESETS};
pub use mgd::mgd_run;
pub use objective::{ExactObjective, NoisyObjective};
pub use spsa::spsa_run;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::simulator::rng::{task_seed, Stream};
use crate::{exec, Error};

/// State after one optimizer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub evals: usize,
    pub theta: Vec<f64>,
    pub predicted: f64,
    pub stderr: f64,
    pub step: f64,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub theta: Vec<f64>,
    pub value: f64,
    pub stderr: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterRecord>,
}

/// An objective failure together with the iterations completed before it.
#[derive(Debug)]
pub struct OptimFailure {
    pub error: Error,
    pub trace: Vec<IterRecord>,
}

impl From<OptimFailure> for Error {
    fn from(f: OptimFailure) -> Self {
        f.error
    }
}

pub type OptimOutcome = std::result::Result<OptimResult, OptimFailure>;

/// Run the optimizer described by `spec`.
pub fn run(spec: &OptimizerSpec, obj: &dyn NoisyObjective, theta0: &[f64], seed: u64) -> OptimOutcome {
    let fail = |error| OptimFailure { error, trace: Vec::new() };
    spec.validate().map_err(fail)?;
    match spec {
        OptimizerSpec::BayesMgd(h) => {
            bayesmgd_run(obj, theta0, h, SurrogateBelief::default_prior(obj.dim()), seed)
        }
        OptimizerSpec::Mgd(h) => mgd_run(obj, theta0, h, seed),
        OptimizerSpec::Spsa(s) => spsa_run(obj, theta0, s, seed),
    }
}

fn check_dim(obj: &dyn NoisyObjective, theta0: &[f64]) -> Result<(), OptimFailure> {
    if theta0.len() != obj.dim() {
        return Err(OptimFailure {
            error: Error::ParamLength { expected: obj.dim(), got: theta0.len() },
            trace: Vec::new(),
        });
    }
    Ok(())
}

/// `count` points drawn uniformly from the solid ball of `radius` around `center`.
pub fn sample_ball<R: Rng>(rng: &mut R, center: &[f64], radius: f64, count: usize) -> Vec<Vec<f64>> {
    let n = center.len();
    (0..count)
        .map(|_| {
            if n == 0 {
                return Vec::new();
            }
            let mut dir: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
            for (d, c) in dir.iter_mut().zip(center) {
                *d = c + r * *d / norm;
            }
            dir
        })
        .collect()
}

/// Evaluate `points` concurrently; call `first + i` gets its own seed.
fn evaluate_points(
    obj: &dyn NoisyObjective,
    points: &[Vec<f64>],
    seed: u64,
    first: usize,
) -> crate::Result<Vec<(f64, f64)>> {
    exec::try_map_range(points.len(), |i| {
        obj.evaluate(&points[i], task_seed(seed, Stream::Objective, (first + i) as u64))
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
