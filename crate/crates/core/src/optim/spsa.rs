use rand::Rng;

use super::{check_dim, evaluate_points, norm, IterRecord, NoisyObjective, OptimFailure, OptimOutcome, OptimResult};
use super::SpsaParams;
use crate::simulator::rng::{rng, Stream};

/// One-stage SPSA with Rademacher perturbations.
pub fn spsa_run(obj: &dyn NoisyObjective, theta0: &[f64], sp: &SpsaParams, seed: u64) -> OptimOutcome {
    check_dim(obj, theta0)?;
    let n = obj.dim();
    let mut theta = theta0.to_vec();
    let mut trace = Vec::new();
    let (mut evals, mut calls, mut k) = (0, 0, 0);
    let mut last = (f64::NAN, f64::NAN);
    while evals < sp.max_evals {
        k += 1;
        let ak = sp.a / (k as f64 + sp.stability).powf(sp.alpha);
        let ck = sp.c / (k as f64).powf(sp.gamma);
        let mut r = rng(seed, Stream::Optimizer, k as u64);
        let delta: Vec<f64> = (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let data = match evaluate_points(obj, &[plus, minus], seed, calls) {
            Ok(d) => d,
            Err(error) => return Err(OptimFailure { error, trace }),
        };
        calls += 2;
        evals += 2 * obj.cost();
        let ((yp, sp_), (ym, sm)) = (data[0], data[1]);
        let scale = (yp - ym) / (2.0 * ck);
        let g: Vec<f64> = delta.iter().map(|d| scale * d).collect();
        for (t, gi) in theta.iter_mut().zip(&g) {
            *t -= ak * gi;
        }
        last = (0.5 * (yp + ym), 0.5 * (sp_ * sp_ + sm * sm).sqrt());
        trace.push(IterRecord {
            iter: k,
            evals,
            theta: theta.clone(),
            predicted: last.0,
            stderr: last.1,
            step: ak * norm(&g),
            exact: obj.exact(&theta),
        });
    }
    Ok(OptimResult { theta, value: last.0, stderr: last.1, evals, iterations: k, converged: false, trace })
}
