//! Training with fermionic linear optics: learn the noisy -> exact map on
//! circuits with onsite angles zeroed and apply it to the target circuit.

use super::monte_carlo_errorbars;
use super::theil_sen::{r_squared, theil_sen};
use crate::error::Result;
use crate::exec;
use crate::observables::{Flag, ObservableEstimate, Stage};
use crate::simulator::rng::{rng, Stream};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPoint {
    pub params: Vec<f64>,
    pub exact: f64,
    pub noisy: f64,
    pub noisy_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfloTrainingSet {
    pub points: Vec<TrainingPoint>,
    /// Target parameters with onsite angles zeroed.
    pub closest: TrainingPoint,
}

/// Which correction an observable received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TfloPath {
    Full,
    CoherentOnly,
    PassThrough,
    NoTraining,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfloOutcome {
    /// Value after the fitted map (the TFLO stage).
    pub tflo: f64,
    /// Value after subtracting the residual at the closest FLO point (Coh stage).
    pub coherent: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub path: TfloPath,
}

/// Spread below which exact training values count as constant.
pub const FLAT_SPREAD: f64 = 0.05;
/// Minimum fit quality for applying the map to an observable.
pub const MIN_R2: f64 = 0.7;

fn full(exact: &[f64], noisy: &[f64], closest: (f64, f64), target: f64) -> Result<TfloOutcome> {
    let (slope, intercept) = theil_sen(noisy, exact)?;
    let m = |v: f64| slope * v + intercept;
    let tflo = m(target);
    let coherent = tflo - (m(closest.1) - closest.0);
    Ok(TfloOutcome {
        tflo,
        coherent,
        slope,
        intercept,
        r2: r_squared(noisy, exact, slope, intercept),
        path: TfloPath::Full,
    })
}

fn passthrough(target: f64, path: TfloPath) -> TfloOutcome {
    TfloOutcome {
        tflo: target,
        coherent: target,
        slope: 1.0,
        intercept: 0.0,
        r2: 0.0,
        path,
    }
}

/// Energy correction: always the full fit plus residual correction.
/// `closest` is (exact, noisy) at the closest FLO point.
pub fn tflo_correct_energy(exact: &[f64], noisy: &[f64], closest: (f64, f64), target: f64) -> TfloOutcome {
    if exact.len() < 2 {
        return passthrough(target, TfloPath::NoTraining);
    }
    full(exact, noisy, closest, target).unwrap_or_else(|_| passthrough(target, TfloPath::NoTraining))
}

/// Observable correction with the flat-spread and R^2 rules.
pub fn tflo_correct_observable(exact: &[f64], noisy: &[f64], closest: (f64, f64), target: f64) -> TfloOutcome {
    if exact.is_empty() {
        return passthrough(target, TfloPath::NoTraining);
    }
    let lo = exact.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = exact.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < FLAT_SPREAD {
        let mut o = passthrough(target, TfloPath::CoherentOnly);
        o.coherent = target - (closest.1 - closest.0);
        return o;
    }
    match full(exact, noisy, closest, target) {
        Ok(o) if o.r2 > MIN_R2 => o,
        Ok(o) => TfloOutcome {
            path: TfloPath::PassThrough,
            ..passthrough(target, TfloPath::PassThrough)
        }
        .with_fit(o),
        Err(_) => passthrough(target, TfloPath::PassThrough),
    }
}

impl TfloOutcome {
    fn with_fit(mut self, fit: TfloOutcome) -> Self {
        self.slope = fit.slope;
        self.intercept = fit.intercept;
        self.r2 = fit.r2;
        self
    }
}

/// TFLO and Coh stage estimates of the energy with Monte Carlo error bars
/// (all noisy inputs resampled from their Gaussians).
pub fn tflo_energy(
    training: &TfloTrainingSet,
    target: &ObservableEstimate,
    resamples: usize,
    seed: u64,
) -> (ObservableEstimate, ObservableEstimate, TfloOutcome) {
    let exact: Vec<f64> = training.points.iter().map(|p| p.exact).collect();
    let noisy: Vec<f64> = training.points.iter().map(|p| p.noisy).collect();
    let c = &training.closest;
    let out = tflo_correct_energy(&exact, &noisy, (c.exact, c.noisy), target.value);
    if out.path == TfloPath::NoTraining {
        let e = target.clone().with_flag(Flag::TfloNoTraining);
        return (e.clone(), e, out);
    }
    let mut inputs: Vec<(f64, f64)> = training
        .points
        .iter()
        .map(|p| (p.noisy, p.noisy_stderr))
        .collect();
    inputs.push((c.noisy, c.noisy_stderr));
    inputs.push((target.value, target.stderr));
    let n = exact.len();
    let run = |x: &[f64], coh: bool| {
        let o = tflo_correct_energy(&exact, &x[..n], (c.exact, x[n]), x[n + 1]);
        if coh {
            o.coherent
        } else {
            o.tflo
        }
    };
    let s_tflo = monte_carlo_errorbars(&inputs, resamples, seed, |x| run(x, false));
    let s_coh = monte_carlo_errorbars(&inputs, resamples, seed, |x| run(x, true));
    let t = target.staged(Stage::Tflo, out.tflo, s_tflo);
    let c = t.staged(Stage::Coherent, out.coherent, s_coh);
    (t, c, out)
}

/// Observable version: TFLO-stage and Coh-stage estimates plus path flags.
pub fn tflo_observable(
    exact: &[f64],
    noisy: &[(f64, f64)],
    closest: (f64, (f64, f64)),
    target: &ObservableEstimate,
    resamples: usize,
    seed: u64,
) -> (ObservableEstimate, ObservableEstimate, TfloOutcome) {
    let nv: Vec<f64> = noisy.iter().map(|p| p.0).collect();
    let out = tflo_correct_observable(exact, &nv, (closest.0, closest.1 .0), target.value);
    let flag = match out.path {
        TfloPath::Full => None,
        TfloPath::CoherentOnly => Some(Flag::TfloCoherentOnly),
        TfloPath::PassThrough => Some(Flag::TfloPassThrough),
        TfloPath::NoTraining => Some(Flag::TfloNoTraining),
    };
    let mut inputs = noisy.to_vec();
    inputs.push(closest.1);
    inputs.push((target.value, target.stderr));
    let n = exact.len();
    let path = out.path;
    let run = |x: &[f64], coh: bool| {
        let o = match path {
            TfloPath::Full => tflo_correct_energy(exact, &x[..n], (closest.0, x[n]), x[n + 1]),
            TfloPath::CoherentOnly => {
                let mut o = passthrough(x[n + 1], path);
                o.coherent = x[n + 1] - (x[n] - closest.0);
                o
            }
            _ => passthrough(x[n + 1], path),
        };
        if coh {
            o.coherent
        } else {
            o.tflo
        }
    };
    let s_tflo = monte_carlo_errorbars(&inputs, resamples, seed, |x| run(x, false));
    let s_coh = monte_carlo_errorbars(&inputs, resamples, seed, |x| run(x, true));
    let mut a = target.staged(Stage::Tflo, out.tflo, s_tflo);
    let mut b = a.staged(Stage::Coherent, out.coherent, s_coh);
    if let Some(f) = flag {
        a = a.with_flag(f);
        b = b.with_flag(f);
    }
    (a, b, out)
}

/// Candidate FLO parameter vectors: for one layer, a 16-point grid per
/// hopping angle; for more layers, 256 random hopping angles. Onsite angles
/// are always 0.
pub fn flo_candidates(params_per_layer: usize, layers: usize, seed: u64) -> Vec<Vec<f64>> {
    let n_hop = params_per_layer - 1;
    let grid: Vec<f64> = (0..16).map(|k| -PI + 2.0 * PI * k as f64 / 16.0).collect();
    if layers == 1 {
        let total = 16usize.pow(n_hop as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; params_per_layer];
                for h in (1..=n_hop).rev() {
                    p[h] = grid[idx % 16];
                    idx /= 16;
                }
                p
            })
            .collect()
    } else {
        let mut r = rng(seed, Stream::Candidates, 0);
        (0..256)
            .map(|_| {
                let mut p = vec![0.0; params_per_layer * layers];
                for (i, v) in p.iter_mut().enumerate() {
                    if i % params_per_layer != 0 {
                        *v = r.random_range(-PI..PI);
                    }
                }
                p
            })
            .collect()
    }
}

/// Greedy farthest-point selection on the energy axis: start from the
/// extremes, then repeatedly add the candidate farthest from all chosen.
/// Returns indices sorted by energy and whether the spread collapsed.
pub fn spread_select(energies: &[f64], count: usize) -> (Vec<usize>, bool) {
    let n = energies.len();
    if n == 0 {
        return (Vec::new(), true);
    }
    let count = count.min(n);
    let by = |a: &usize, b: &usize| energies[*a].partial_cmp(&energies[*b]).unwrap().then(a.cmp(b));
    let lo = (0..n).min_by(by).unwrap();
    let hi = (0..n).max_by(by).unwrap();
    let collapsed = energies[hi] - energies[lo] < 1e-12;
    let mut chosen = vec![lo];
    if count > 1 && hi != lo {
        chosen.push(hi);
    }
    let mut dist: Vec<f64> = (0..n)
        .map(|i| {
            chosen
                .iter()
                .map(|&c| (energies[i] - energies[c]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    for &c in &chosen {
        dist[c] = -1.0;
    }
    while chosen.len() < count {
        let mut best = None;
        for i in 0..n {
            if dist[i] >= 0.0 && best.is_none_or(|b: usize| dist[i] > dist[b]) {
                best = Some(i);
            }
        }
        let Some(b) = best else { break };
        chosen.push(b);
        dist[b] = -1.0;
        for i in 0..n {
            if dist[i] >= 0.0 {
                dist[i] = dist[i].min((energies[i] - energies[b]).abs());
            }
        }
    }
    chosen.sort_by(by);
    (chosen, collapsed)
}

/// Selected FLO training parameters with their exact energies.
#[derive(Debug, Clone, PartialEq)]
pub struct FloSelection {
    pub params: Vec<Vec<f64>>,
    pub exact: Vec<f64>,
    pub spread_collapse: bool,
}

/// Choose `count` well-spread FLO training points; `exact_energy` evaluates
/// an FLO parameter vector noiselessly.
pub fn choose_flo_points<F>(
    params_per_layer: usize,
    layers: usize,
    count: usize,
    seed: u64,
    exact_energy: F,
) -> Result<FloSelection>
where
    F: Fn(&[f64]) -> Result<f64> + Sync + Send,
{
    let cands = flo_candidates(params_per_layer, layers, seed);
    let energies = exec::try_map_range(cands.len(), |i| exact_energy(&cands[i]))?;
    let (idx, collapsed) = spread_select(&energies, count);
    Ok(FloSelection {
        params: idx.iter().map(|&i| cands[i].clone()).collect(),
        exact: idx.iter().map(|&i| energies[i]).collect(),
        spread_collapse: collapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_fit() {
        let ex = [1.0, 2.0, 3.5];
        let o = tflo_correct_energy(&ex, &ex, (2.0, 2.0), 2.7);
        assert!((o.coherent - 2.7).abs() < 1e-12);
    }

    #[test]
    fn affine_with_offset() {
        let ex = [-3.0, -2.0, -1.0, 0.5];
        let f = |e: f64| 0.6 * e + 0.3;
        let noisy: Vec<f64> = ex.iter().map(|&e| f(e) + 0.1).collect();
        let o = tflo_correct_energy(&ex, &noisy, (-2.5, f(-2.5) + 0.1), f(-2.2) + 0.1);
        assert!((o.coherent - -2.2).abs() < 1e-12);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(flo_candidates(3, 1, 0).len(), 256);
        assert_eq!(flo_candidates(4, 1, 0).len(), 4096);
        assert_eq!(flo_candidates(3, 2, 0).len(), 256);
        assert!(flo_candidates(3, 2, 0).iter().all(|p| p[0] == 0.0 && p[3] == 0.0));
    }

    #[test]
    fn spread() {
        let e: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let (idx, c) = spread_select(&e, 16);
        assert!(!c);
        assert_eq!(idx.len(), 16);
        assert!(idx.windows(2).all(|w| e[w[0]] < e[w[1]]));
    }
}
