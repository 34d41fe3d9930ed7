//! Shots-matched optimizer comparison on a synthetic noisy quadratic.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{points_per_iteration, run, NoisyObjective, OptimResult, OptimizerSpec};
use crate::simulator::rng::{rng, Stream};
use crate::{exec, Error, Result};

/// f(θ) = ½ (θ−c)ᵀ H (θ−c) observed with additive Gaussian noise of width
/// `shot_sigma / sqrt(shots)`.
#[derive(Debug, Clone)]
pub struct NoisyQuadratic {
    pub hessian: DMatrix<f64>,
    pub center: Vec<f64>,
    pub shot_sigma: f64,
    pub shots: usize,
}

impl NoisyQuadratic {
    /// Random instance: eigenvalues log-uniform in [0.5, 2], random rotation,
    /// minimiser uniform in [−0.5, 0.5]^nc.
    pub fn random(nc: usize, seed: u64) -> Self {
        let mut r = rng(seed, Stream::Candidates, 0);
        let g = DMatrix::from_fn(nc, nc, |_, _| r.sample::<f64, _>(StandardNormal));
        let q = g.qr().q();
        let eig = DVector::from_fn(nc, |_, _| 0.5 * 4f64.powf(r.random::<f64>()));
        let hessian = &q * DMatrix::from_diagonal(&eig) * q.transpose();
        let center = (0..nc).map(|_| r.random::<f64>() - 0.5).collect();
        Self { hessian, center, shot_sigma: 1.0, shots: 1000 }
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        let d = DVector::from_iterator(theta.len(), theta.iter().zip(&self.center).map(|(a, b)| a - b));
        0.5 * d.dot(&(&self.hessian * &d))
    }

    pub fn sigma(&self) -> f64 {
        self.shot_sigma / (self.shots as f64).sqrt()
    }
}

impl NoisyObjective for NoisyQuadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn evaluate(&self, theta: &[f64], seed: u64) -> Result<(f64, f64)> {
        let z: f64 = rng(seed, Stream::Objective, 0).sample(StandardNormal);
        Ok((self.value(theta) + self.sigma() * z, self.sigma()))
    }

    fn exact(&self, theta: &[f64]) -> Option<f64> {
        Some(self.value(theta))
    }
}

/// Comparison setup: every optimizer gets `iterations` iterations and
/// `shots_per_iteration` shots per iteration, split evenly over the
/// evaluations it makes in one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSpec {
    pub n_params: usize,
    pub iterations: usize,
    pub shots_per_iteration: usize,
    pub shot_sigma: f64,
    pub instance_seed: u64,
    pub seeds: Vec<u64>,
}

impl Default for CompareSpec {
    fn default() -> Self {
        Self {
            n_params: 8,
            iterations: 30,
            shots_per_iteration: 68_000,
            shot_sigma: 1.0,
            instance_seed: 7,
            seeds: (0..10).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trial {
    pub label: String,
    pub seed: u64,
    pub evals_per_iteration: usize,
    pub shots_per_eval: usize,
    pub result: OptimResult,
    pub final_exact: f64,
}

/// Evaluations one iteration of `spec` makes on an `nc`-parameter problem.
pub fn evals_per_iteration(spec: &OptimizerSpec, nc: usize) -> usize {
    match spec {
        OptimizerSpec::BayesMgd(h) | OptimizerSpec::Mgd(h) => points_per_iteration(h.eta, nc),
        OptimizerSpec::Spsa(_) => 2,
    }
}

/// Run each labelled optimizer for every seed on the same instance.
pub fn compare(spec: &CompareSpec, optimizers: &[(String, OptimizerSpec)]) -> Result<Vec<Trial>> {
    if spec.n_params == 0 || spec.iterations == 0 || spec.seeds.is_empty() {
        return Err(Error::Config("comparison needs parameters, iterations and seeds".into()));
    }
    let base = NoisyQuadratic::random(spec.n_params, spec.instance_seed);
    let theta0 = vec![0.0; spec.n_params];
    let jobs: Vec<(usize, u64)> = (0..optimizers.len())
        .flat_map(|o| spec.seeds.iter().map(move |&s| (o, s)))
        .collect();
    exec::try_map_range(jobs.len(), |j| {
        let (o, seed) = jobs[j];
        let (label, opt) = &optimizers[o];
        let per_iter = evals_per_iteration(opt, spec.n_params);
        let shots = (spec.shots_per_iteration / per_iter).max(1);
        let obj = NoisyQuadratic { shots, shot_sigma: spec.shot_sigma, ..base.clone() };
        let mut opt = opt.clone();
        opt.set_max_evals(spec.iterations * per_iter);
        let result = run(&opt, &obj, &theta0, seed)?;
        let final_exact = obj.value(&result.theta);
        Ok(Trial {
            label: label.clone(),
            seed,
            evals_per_iteration: per_iter,
            shots_per_eval: shots,
            result,
            final_exact,
        })
    })
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Final exact values of all trials carrying `label`.
pub fn finals(trials: &[Trial], label: &str) -> Vec<f64> {
    trials.iter().filter(|t| t.label == label).map(|t| t.final_exact).collect()
}
