//! Quadratic model functions `[1, θ_j, θ_jθ_k (j ≤ k)]` and their gradient.

/// Number of model parameters of the full quadratic in `nc` variables.
pub fn n_model(nc: usize) -> usize {
    (nc + 1) * (nc + 2) / 2
}

/// Evaluation points per iteration for sampling ratio `eta`.
pub fn points_per_iteration(eta: f64, nc: usize) -> usize {
    let raw = eta * n_model(nc) as f64;
    // guard against 1.5 * 10 = 15.000000000000002 style round-up
    let p = (raw - 1e-9).ceil();
    (p as usize).max(1)
}

pub fn model_features(theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    let mut phi = Vec::with_capacity(n_model(n));
    phi.push(1.0);
    phi.extend_from_slice(theta);
    for j in 0..n {
        for k in j..n {
            phi.push(theta[j] * theta[k]);
        }
    }
    phi
}

pub fn surrogate_value(beta: &[f64], theta: &[f64]) -> f64 {
    model_features(theta).iter().zip(beta).map(|(p, b)| p * b).sum()
}

/// ∇_θ of the quadratic model with coefficients `beta` at `theta`.
pub fn surrogate_gradient(beta: &[f64], theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    let mut g: Vec<f64> = beta[1..=n].to_vec();
    let mut idx = n + 1;
    for j in 0..n {
        for k in j..n {
            let b = beta[idx];
            if j == k {
                g[j] += 2.0 * b * theta[j];
            } else {
                g[j] += b * theta[k];
                g[k] += b * theta[j];
            }
            idx += 1;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn features_small() {
        assert_eq!(model_features(&[2.0]), vec![1.0, 2.0, 4.0]);
        assert_eq!(n_model(3), 10);
        assert_eq!(model_features(&[0.0; 3]), {
            let mut v = vec![0.0; 10];
            v[0] = 1.0;
            v
        });
    }

    #[test]
    fn table_points() {
        assert_eq!(points_per_iteration(1.5, 3), 15);
        assert_eq!(points_per_iteration(1.5, 4), 23);
        assert_eq!(points_per_iteration(1.5, 6), 42);
    }
}
