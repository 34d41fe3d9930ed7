//! Trajectory-sampled noise at native-gate granularity.

use super::rng::{rng, Stream};
use super::sampling::{cdf, lookup, sampling_uniforms, ShotBatch, BLOCK};
use super::state::{NcGate, StateVector};
use crate::circuits::gate::{gate_unitary, Unitary};
use crate::circuits::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::Pauli;
use crate::C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

/// Error channels applied when running a native circuit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    /// Probability of a uniformly random non-identity two-qubit Pauli after
    /// each sqrt(iSWAP).
    pub depolarizing_2q: f64,
    /// P(read 1 | true 0).
    pub readout_01: f64,
    /// P(read 0 | true 1).
    pub readout_10: f64,
    /// CPHASE angle chi, diag(1,1,1,e^{-i chi}) after every sqrt(iSWAP).
    pub parasitic_cphase: f64,
    /// Relative error on the sqrt(iSWAP) swap angle.
    pub overrotation: f64,
    /// Additive error on every hopping/onsite composite angle.
    pub angle_bias: f64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self::default()
    }

    /// Named presets: `none`, `readout`, `depolarizing`, `coherent`, `hardware`.
    pub fn preset(name: &str) -> Option<Self> {
        let m = match name {
            "none" => Self::none(),
            "readout" => Self {
                readout_01: 0.01,
                readout_10: 0.05,
                ..Self::none()
            },
            "depolarizing" => Self {
                depolarizing_2q: 0.005,
                ..Self::none()
            },
            "coherent" => Self {
                parasitic_cphase: 0.1,
                overrotation: 0.02,
                ..Self::none()
            },
            "hardware" => Self {
                depolarizing_2q: 0.006,
                readout_01: 0.01,
                readout_10: 0.05,
                parasitic_cphase: 0.1,
                overrotation: 0.01,
                angle_bias: 0.0,
            },
            _ => return None,
        };
        Some(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("depolarizing_2q", self.depolarizing_2q),
            ("readout_01", self.readout_01),
            ("readout_10", self.readout_10),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name}={p} is not a probability")));
            }
        }
        for (name, v) in [
            ("parasitic_cphase", self.parasitic_cphase),
            ("overrotation", self.overrotation),
            ("angle_bias", self.angle_bias),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::none()
    }

    pub fn has_coherent(&self) -> bool {
        self.parasitic_cphase != 0.0 || self.overrotation != 0.0
    }

    pub fn has_readout(&self) -> bool {
        self.readout_01 != 0.0 || self.readout_10 != 0.0
    }

    /// The sqrt(iSWAP) actually executed under coherent errors.
    pub fn sqrt_iswap(&self) -> NcGate {
        let Unitary::Two(m) = gate_unitary(&GateKind::SqrtISwap) else {
            unreachable!()
        };
        let mut g = NcGate::from_matrix(&m);
        if self.overrotation != 0.0 {
            let a = FRAC_PI_4 * (1.0 + self.overrotation);
            let (s, c) = a.sin_cos();
            g.block = [
                [C64::new(c, 0.0), C64::new(0.0, s)],
                [C64::new(0.0, s), C64::new(c, 0.0)],
            ];
        }
        if self.parasitic_cphase != 0.0 {
            g.p11 *= C64::from_polar(1.0, -self.parasitic_cphase);
        }
        g
    }
}

/// A native circuit flattened into operations, two-qubit gates numbered.
struct Program {
    n: usize,
    ops: Vec<Op>,
    /// ops index of each two-qubit gate
    two_qubit_at: Vec<usize>,
}

enum Op {
    One(usize, [[C64; 2]; 2]),
    Two(usize, usize, NcGate),
}

impl Program {
    fn new(c: &Circuit, noise: &NoiseModel) -> Result<Self> {
        if let Some(g) = c.gates().find(|g| !g.kind.is_native()) {
            return Err(Error::NotNative(g.kind.name().into()));
        }
        c.validate()?;
        let sq = noise.sqrt_iswap();
        let mut ops = Vec::new();
        let mut two_qubit_at = Vec::new();
        for g in c.gates() {
            match gate_unitary(&g.kind) {
                Unitary::One(m) => ops.push(Op::One(g.qubits[0], m)),
                Unitary::Two(m) => {
                    let nc = if noise.has_coherent() {
                        sq
                    } else {
                        NcGate::from_matrix(&m)
                    };
                    two_qubit_at.push(ops.len());
                    ops.push(Op::Two(g.qubits[0], g.qubits[1], nc));
                }
            }
        }
        Ok(Self {
            n: c.n_qubits,
            ops,
            two_qubit_at,
        })
    }

    fn run(&self, state: &mut StateVector, from: usize, to: usize) {
        for op in &self.ops[from..to] {
            match op {
                Op::One(q, m) => state.apply_1q(*q, m),
                Op::Two(a, b, g) => state.apply_nc(*a, *b, g),
            }
        }
    }
}

/// Errors hit by one shot: (two-qubit gate number, Pauli pair code 1..=15).
type Pattern = Vec<(u32, u8)>;

fn pauli_of(code: u8) -> Option<Pauli> {
    match code {
        1 => Some(Pauli::X),
        2 => Some(Pauli::Y),
        3 => Some(Pauli::Z),
        _ => None,
    }
}

/// Largest number of prefix snapshots kept (bytes) when caching clean states.
const SNAPSHOT_BUDGET: usize = 64 << 20;
/// Largest total size of simultaneously held outcome distributions (bytes).
const CDF_BUDGET: usize = 256 << 20;

/// Sample `shots` noisy executions of a native circuit.
///
/// With no depolarizing noise the final state is computed once; otherwise
/// each shot draws its error pattern and shots sharing a pattern share one
/// simulation. Readout flips are applied per qubit per shot afterwards.
/// With every channel at zero this equals `sample` on the ideal final state.
pub fn run_noisy(c: &Circuit, noise: &NoiseModel, shots: usize, seed: u64) -> Result<ShotBatch> {
    noise.validate()?;
    let prog = Program::new(c, noise)?;
    if noise.depolarizing_2q == 0.0 {
        let mut s = StateVector::zero(prog.n)?;
        prog.run(&mut s, 0, prog.ops.len());
        return Ok(measure_state(&s, noise, shots, seed));
    }
    let uniforms = sampling_uniforms(seed, shots);
    let mut bits = trajectories(&prog, noise.depolarizing_2q, &uniforms, seed)?;
    if noise.has_readout() {
        apply_readout(&mut bits, prog.n, noise, seed);
    }
    Ok(ShotBatch {
        n_qubits: prog.n,
        bits,
        seed,
    })
}

/// Apply a native circuit to `state` with the model's coherent errors
/// (depolarizing and readout channels are not applied here).
pub fn apply_native(state: &mut StateVector, c: &Circuit, noise: &NoiseModel) -> Result<()> {
    let prog = Program::new(c, noise)?;
    if prog.n > state.n_qubits() {
        return Err(Error::QubitRange {
            index: prog.n - 1,
            n_qubits: state.n_qubits(),
        });
    }
    prog.run(state, 0, prog.ops.len());
    Ok(())
}

/// Sample a final state and apply readout errors.
pub fn measure_state(state: &StateVector, noise: &NoiseModel, shots: usize, seed: u64) -> ShotBatch {
    let mut batch = super::sampling::sample(state, shots, seed);
    if noise.has_readout() {
        apply_readout(&mut batch.bits, state.n_qubits(), noise, seed);
    }
    batch
}

fn draw_patterns(k: usize, p: f64, shots: usize, seed: u64) -> Vec<Pattern> {
    if k == 0 {
        return vec![Vec::new(); shots];
    }
    let blocks = shots.div_ceil(BLOCK);
    let log_q = (1.0 - p).ln();
    exec::map_range(blocks, |b| {
        let mut r = rng(seed, Stream::Kraus, b as u64);
        let n = BLOCK.min(shots - b * BLOCK);
        (0..n)
            .map(|_| {
                let mut pat = Vec::new();
                if p >= 1.0 {
                    for g in 0..k {
                        pat.push((g as u32, r.random_range(1..16u8)));
                    }
                    return pat;
                }
                // Geometric gaps between error locations.
                let mut g = 0usize;
                loop {
                    let u: f64 = r.random();
                    let gap = ((1.0 - u).ln() / log_q).floor();
                    if !gap.is_finite() || gap >= (k - g) as f64 {
                        break;
                    }
                    g += gap as usize;
                    pat.push((g as u32, r.random_range(1..16u8)));
                    g += 1;
                    if g >= k {
                        break;
                    }
                }
                pat
            })
            .collect::<Vec<_>>()
    })
    .concat()
}

fn trajectories(prog: &Program, p: f64, uniforms: &[f64], seed: u64) -> Result<Vec<u32>> {
    let k = prog.two_qubit_at.len();
    let shots = uniforms.len();
    let patterns = draw_patterns(k, p, shots, seed);
    let mut index: HashMap<&Pattern, usize> = HashMap::new();
    let mut distinct: Vec<&Pattern> = Vec::new();
    let shot_pattern: Vec<usize> = patterns
        .iter()
        .map(|pat| {
            *index.entry(pat).or_insert_with(|| {
                distinct.push(pat);
                distinct.len() - 1
            })
        })
        .collect();

    // Clean states after each two-qubit gate, for restarting error branches.
    let state_bytes = (1usize << prog.n) * std::mem::size_of::<C64>();
    let snapshots: Option<Vec<StateVector>> = if state_bytes * (k + 1) <= SNAPSHOT_BUDGET {
        let mut s = StateVector::zero(prog.n)?;
        let mut out = Vec::with_capacity(k);
        let mut at = 0;
        for &op in &prog.two_qubit_at {
            prog.run(&mut s, at, op + 1);
            at = op + 1;
            out.push(s.clone());
        }
        Some(out)
    } else {
        None
    };

    let simulate = |pat: &Pattern| -> Result<Vec<f64>> {
        let (mut s, mut at) = match (&snapshots, pat.first()) {
            (Some(snap), Some(&(g, _))) => (snap[g as usize].clone(), prog.two_qubit_at[g as usize] + 1),
            _ => (StateVector::zero(prog.n)?, 0),
        };
        let mut first = true;
        for &(g, code) in pat {
            let op = prog.two_qubit_at[g as usize];
            if !(first && snapshots.is_some()) {
                prog.run(&mut s, at, op + 1);
                at = op + 1;
            }
            first = false;
            let Op::Two(a, b, _) = prog.ops[op] else {
                unreachable!()
            };
            if let Some(pa) = pauli_of(code / 4) {
                s.apply_pauli(a, pa);
            }
            if let Some(pb) = pauli_of(code % 4) {
                s.apply_pauli(b, pb);
            }
        }
        prog.run(&mut s, at, prog.ops.len());
        Ok(cdf(&s))
    };

    let cdf_bytes = (1usize << prog.n) * std::mem::size_of::<f64>();
    let chunk = (CDF_BUDGET / cdf_bytes).max(1);
    let mut by_pattern: Vec<Vec<usize>> = vec![Vec::new(); distinct.len()];
    for (shot, &pi) in shot_pattern.iter().enumerate() {
        by_pattern[pi].push(shot);
    }
    let mut bits = vec![0u32; shots];
    for start in (0..distinct.len()).step_by(chunk) {
        let end = (start + chunk).min(distinct.len());
        let cdfs = exec::try_map_range(end - start, |i| simulate(distinct[start + i]))?;
        for (i, cd) in cdfs.iter().enumerate() {
            for &shot in &by_pattern[start + i] {
                bits[shot] = lookup(cd, uniforms[shot]);
            }
        }
    }
    Ok(bits)
}

fn apply_readout(bits: &mut [u32], n: usize, noise: &NoiseModel, seed: u64) {
    let shots = bits.len();
    let blocks = shots.div_ceil(BLOCK);
    let flips: Vec<u32> = exec::map_range(blocks, |b| {
        let mut r = rng(seed, Stream::Readout, b as u64);
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(shots);
        (lo..hi)
            .map(|i| {
                let mut mask = 0u32;
                for q in 0..n {
                    let one = (bits[i] >> q) & 1 == 1;
                    let p = if one { noise.readout_10 } else { noise.readout_01 };
                    let u: f64 = r.random();
                    if u < p {
                        mask |= 1 << q;
                    }
                }
                mask
            })
            .collect::<Vec<_>>()
    })
    .concat();
    for (b, f) in bits.iter_mut().zip(flips) {
        *b ^= f;
    }
}

/// Lowered circuit with the noise model's angle bias applied first.
pub fn lower_with_bias(c: &Circuit, noise: &NoiseModel) -> Circuit {
    c.with_angle_bias(noise.angle_bias).to_native()
}

