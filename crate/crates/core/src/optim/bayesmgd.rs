use super::belief::{bayes_update, SurrogateBelief};
use super::features::points_per_iteration;
use super::{check_dim, evaluate_points, norm, sample_ball, IterRecord, NoisyObjective, OptimFailure, OptimOutcome, OptimResult};
use super::Hyperparams;
use crate::simulator::rng::{rng, Stream};

/// BayesMGD: sample around the iterate, update the Gaussian belief over the
/// quadratic surrogate, step along the surrogate gradient and inflate Σ in
/// proportion to the step length.
pub fn bayesmgd_run(
    obj: &dyn NoisyObjective,
    theta0: &[f64],
    hp: &Hyperparams,
    init: SurrogateBelief,
    seed: u64,
) -> OptimOutcome {
    check_dim(obj, theta0)?;
    let p = points_per_iteration(hp.eta, obj.dim());
    let mut theta = theta0.to_vec();
    let mut belief = init;
    let mut trace = Vec::new();
    let (mut evals, mut calls, mut m) = (0, 0, 0);
    let mut converged = false;
    while evals < hp.max_evals {
        m += 1;
        let radius = hp.radius(m);
        let gamma = hp.step(m);
        let points = sample_ball(&mut rng(seed, Stream::Optimizer, m as u64), &theta, radius, p);
        let data = match evaluate_points(obj, &points, seed, calls) {
            Ok(d) => d,
            Err(error) => return Err(OptimFailure { error, trace }),
        };
        calls += p;
        evals += p * obj.cost();
        let values: Vec<f64> = data.iter().map(|d| d.0).collect();
        let sigmas: Vec<f64> = data.iter().map(|d| d.1.max(hp.sigma_floor)).collect();
        belief = match bayes_update(&belief, &points, &values, &sigmas) {
            Ok(b) => b,
            Err(error) => return Err(OptimFailure { error, trace }),
        };
        let g = belief.gradient(&theta);
        let step = gamma * norm(&g);
        for (t, gi) in theta.iter_mut().zip(&g) {
            *t -= gamma * gi;
        }
        belief.inflate(step, hp.length_scale);
        let (predicted, stderr) = belief.predict(&theta);
        trace.push(IterRecord {
            iter: m,
            evals,
            theta: theta.clone(),
            predicted,
            stderr,
            step,
            exact: obj.exact(&theta),
        });
        if step < hp.epsilon {
            converged = true;
            break;
        }
    }
    let (value, stderr) = belief.predict(&theta);
    Ok(OptimResult { theta, value, stderr, evals, iterations: m, converged, trace })
}
