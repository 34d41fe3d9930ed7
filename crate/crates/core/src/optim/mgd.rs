use nalgebra::{DMatrix, DVector};

use super::features::{model_features, points_per_iteration};
use super::{check_dim, evaluate_points, norm, sample_ball, IterRecord, NoisyObjective, OptimFailure, OptimOutcome, OptimResult};
use super::Hyperparams;
use crate::simulator::rng::{rng, Stream};
use crate::Error;

struct Fit {
    beta: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Weighted least-squares quadratic fit in coordinates relative to `center`;
/// minimum-norm solution when underdetermined.
fn fit(memory: &[(Vec<f64>, f64, f64)], center: &[f64]) -> crate::Result<Fit> {
    let nm = super::n_model(center.len());
    let n = memory.len();
    let mut x = DMatrix::zeros(n, nm);
    let mut y = DVector::zeros(n);
    for (r, (pt, v, s)) in memory.iter().enumerate() {
        let rel: Vec<f64> = pt.iter().zip(center).map(|(a, b)| a - b).collect();
        let w = 1.0 / s;
        for (c, f) in model_features(&rel).into_iter().enumerate() {
            x[(r, c)] = w * f;
        }
        y[r] = w * v;
    }
    let svd = x.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10 * (n.max(nm) as f64);
    let beta = svd.solve(&y, tol).map_err(|e| Error::Numerical(e.to_string()))?;
    let v_t = svd.v_t.as_ref().expect("computed");
    let mut cov = DMatrix::zeros(nm, nm);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let row = v_t.row(k).transpose();
            cov.ger(1.0 / (s * s), &row, &row, 1.0);
        }
    }
    Ok(Fit { beta, cov })
}

/// Model gradient descent: plain least-squares fit over all samples inside
/// the current trust region, no prior and no memory of earlier fits.
pub fn mgd_run(obj: &dyn NoisyObjective, theta0: &[f64], hp: &Hyperparams, seed: u64) -> OptimOutcome {
    check_dim(obj, theta0)?;
    let nc = obj.dim();
    let p = points_per_iteration(hp.eta, nc);
    let mut theta = theta0.to_vec();
    let mut memory: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut trace = Vec::new();
    let (mut evals, mut calls, mut m) = (0, 0, 0);
    let mut converged = false;
    let mut last = (f64::NAN, f64::NAN);
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
        memory.extend(points.into_iter().zip(data).map(|(pt, (y, s))| (pt, y, s.max(hp.sigma_floor))));
        memory.retain(|(pt, _, _)| {
            let d: f64 = pt.iter().zip(&theta).map(|(a, b)| (a - b).powi(2)).sum();
            d.sqrt() <= radius * (1.0 + 1e-12)
        });
        let f = match fit(&memory, &theta) {
            Ok(f) => f,
            Err(error) => return Err(OptimFailure { error, trace }),
        };
        let g: Vec<f64> = f.beta.as_slice()[1..=nc].to_vec();
        let step = gamma * norm(&g);
        let rel: Vec<f64> = g.iter().map(|gi| -gamma * gi).collect();
        for (t, d) in theta.iter_mut().zip(&rel) {
            *t += d;
        }
        let phi = DVector::from_vec(model_features(&rel));
        let predicted = phi.dot(&f.beta);
        let stderr = (phi.transpose() * &f.cov * &phi)[(0, 0)].max(0.0).sqrt();
        last = (predicted, stderr);
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
    Ok(OptimResult { theta, value: last.0, stderr: last.1, evals, iterations: m, converged, trace })
}
