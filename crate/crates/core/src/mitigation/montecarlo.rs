use crate::exec;
use crate::simulator::rng::{rng, Stream};
use rand_distr::{Distribution, StandardNormal};

/// Standard deviation of `f` when each input is drawn independently from
/// N(mean, stderr^2), over `resamples` draws.
pub fn monte_carlo_errorbars<F>(inputs: &[(f64, f64)], resamples: usize, seed: u64, f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    if resamples < 2 || inputs.iter().all(|&(_, s)| s == 0.0) {
        return 0.0;
    }
    let outs = exec::map_range(resamples, |k| {
        let mut r = rng(seed, Stream::Resample, k as u64);
        let x: Vec<f64> = inputs
            .iter()
            .map(|&(m, s)| {
                let z: f64 = StandardNormal.sample(&mut r);
                m + s * z
            })
            .collect();
        f(&x)
    });
    let n = outs.len() as f64;
    let mean = outs.iter().sum::<f64>() / n;
    (outs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
