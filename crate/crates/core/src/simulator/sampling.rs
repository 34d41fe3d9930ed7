use super::rng::{rng, Stream};
use super::state::StateVector;
use crate::exec;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Shots are drawn in blocks of this size, each block with its own generator.
pub const BLOCK: usize = 4096;

/// Measured bitstrings (bit q = qubit q).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotBatch {
    pub n_qubits: usize,
    pub bits: Vec<u32>,
    pub seed: u64,
}

impl ShotBatch {
    pub fn shots(&self) -> usize {
        self.bits.len()
    }
}

/// Cumulative distribution of |amplitude|^2, normalised so the last entry is 1.
pub fn cdf(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect();
    let total = acc;
    for v in &mut out {
        *v /= total;
    }
    out
}

/// Smallest index whose cumulative probability exceeds `u`.
pub fn lookup(cdf: &[f64], u: f64) -> u32 {
    let i = cdf.partition_point(|&c| c <= u);
    i.min(cdf.len() - 1) as u32
}

/// Uniform variates driving outcome selection, one per shot.
pub fn sampling_uniforms(seed: u64, shots: usize) -> Vec<f64> {
    let blocks = shots.div_ceil(BLOCK);
    exec::map_range(blocks, |b| {
        let mut r = rng(seed, Stream::Sampling, b as u64);
        let n = BLOCK.min(shots - b * BLOCK);
        (0..n).map(|_| r.random::<f64>()).collect::<Vec<_>>()
    })
    .concat()
}

/// i.i.d. computational-basis samples.
pub fn sample(state: &StateVector, shots: usize, seed: u64) -> ShotBatch {
    let c = cdf(state);
    let bits = sampling_uniforms(seed, shots)
        .into_iter()
        .map(|u| lookup(&c, u))
        .collect();
    ShotBatch {
        n_qubits: state.n_qubits(),
        bits,
        seed,
    }
}
