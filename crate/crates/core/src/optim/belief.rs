//! Gaussian belief over quadratic-model coefficients and its Bayesian update.

use nalgebra::{DMatrix, DVector};

use super::features::{model_features, n_model, surrogate_gradient};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateBelief {
    pub beta: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

impl SurrogateBelief {
    /// β = 0, Σ = diag(const_var for constant and linear terms, quad_var for
    /// quadratic terms).
    pub fn diagonal_prior(nc: usize, const_var: f64, quad_var: f64) -> Self {
        let nm = n_model(nc);
        let diag = DVector::from_fn(nm, |i, _| if i <= nc { const_var } else { quad_var });
        Self { beta: DVector::zeros(nm), sigma: DMatrix::from_diagonal(&diag) }
    }

    /// Initial belief used in all presets.
    pub fn default_prior(nc: usize) -> Self {
        Self::diagonal_prior(nc, 1e7, 1e5)
    }

    pub fn n_params(&self) -> usize {
        let nm = self.beta.len();
        // invert nm = (nc+1)(nc+2)/2
        let mut nc = 0;
        while n_model(nc) < nm {
            nc += 1;
        }
        nc
    }

    /// Surrogate value and its standard error at `theta`.
    pub fn predict(&self, theta: &[f64]) -> (f64, f64) {
        let phi = DVector::from_vec(model_features(theta));
        let value = phi.dot(&self.beta);
        let var = (phi.transpose() * &self.sigma * &phi)[(0, 0)];
        (value, var.max(0.0).sqrt())
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        surrogate_gradient(self.beta.as_slice(), theta)
    }

    /// Uncertainty growth after a step of length `step`: Σ += (step/l)² I.
    pub fn inflate(&mut self, step: f64, length_scale: f64) {
        let q = (step / length_scale).powi(2);
        for i in 0..self.sigma.nrows() {
            self.sigma[(i, i)] += q;
        }
    }
}

fn inverse_spd(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical(format!("{what} is not positive definite")))?;
    let inv = chol.inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Posterior after observing `values ± sigmas` at `points`:
/// Σ₁⁻¹ = XᵀWX + Σ₀⁻¹, β₁ = Σ₁(XᵀWy + Σ₀⁻¹β₀) with W = diag(1/σ²).
pub fn bayes_update(
    prior: &SurrogateBelief,
    points: &[Vec<f64>],
    values: &[f64],
    sigmas: &[f64],
) -> Result<SurrogateBelief> {
    if points.len() != values.len() || points.len() != sigmas.len() {
        return Err(Error::Numerical("points, values and sigmas differ in length".into()));
    }
    if points.is_empty() {
        return Ok(prior.clone());
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(Error::Numerical(format!("measurement sigma {s} must be positive")));
    }
    let nm = prior.beta.len();
    let prec0 = inverse_spd(&prior.sigma, "prior covariance")?;
    let mut prec = prec0.clone();
    let mut rhs = &prec0 * &prior.beta;
    for ((p, &y), &s) in points.iter().zip(values).zip(sigmas) {
        let phi = DVector::from_vec(model_features(p));
        if phi.len() != nm {
            return Err(Error::ParamLength { expected: prior.n_params(), got: p.len() });
        }
        let w = 1.0 / (s * s);
        prec.ger(w, &phi, &phi, 1.0);
        rhs.axpy(w * y, &phi, 1.0);
    }
    let sigma = inverse_spd(&prec, "posterior precision")?;
    let beta = &sigma * rhs;
    Ok(SurrogateBelief { beta, sigma })
}
