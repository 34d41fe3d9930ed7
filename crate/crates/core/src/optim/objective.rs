use crate::Result;

/// A black-box function returning a noisy value and its standard error.
///
/// Evaluation must be deterministic given `seed`.
pub trait NoisyObjective: Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, theta: &[f64], seed: u64) -> Result<(f64, f64)>;

    /// Budget units consumed by one call of `evaluate`.
    fn cost(&self) -> usize {
        1
    }

    /// Noise-free value, when the objective can provide it (used for traces).
    fn exact(&self, _theta: &[f64]) -> Option<f64> {
        None
    }
}

/// Wraps a deterministic function as a zero-noise objective.
pub struct ExactObjective<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> NoisyObjective for ExactObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, theta: &[f64], _seed: u64) -> Result<(f64, f64)> {
        Ok(((self.f)(theta), 0.0))
    }

    fn exact(&self, theta: &[f64]) -> Option<f64> {
        Some((self.f)(theta))
    }
}
