use crate::circuits::gate::{gate_unitary, Mat2, Unitary};
use crate::circuits::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::model::{Pauli, QubitOperator};
use crate::C64;

/// Hard cap on simulated qubits.
pub const MAX_QUBITS: usize = 24;

/// Two-qubit gate of the form |00> -> p00, block on {|01>,|10>}, |11> -> p11.
/// Every two-qubit gate of the gate set has this shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcGate {
    pub p00: C64,
    pub block: Mat2,
    pub p11: C64,
}

impl NcGate {
    pub fn from_matrix(m: &[[C64; 4]; 4]) -> Self {
        Self {
            p00: m[0][0],
            block: [[m[1][1], m[1][2]], [m[2][1], m[2][2]]],
            p11: m[3][3],
        }
    }
}

/// Statevector over n qubits; basis index bit q holds qubit q.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Infeasible(format!(
                "{n} qubits exceeds the {MAX_QUBITS}-qubit statevector cap"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n > MAX_QUBITS {
            return Err(Error::Infeasible("amplitude count is not a supported power of two".into()));
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Apply a number-conserving two-qubit gate on (q0, q1), q0 being the
    /// more significant bit of the gate's own basis.
    pub fn apply_nc(&mut self, q0: usize, q1: usize, g: &NcGate) {
        let b0 = 1usize << q0;
        let b1 = 1usize << q1;
        let one = C64::new(1.0, 0.0);
        let both = b0 | b1;
        for i in 0..self.amps.len() {
            if i & both != 0 {
                continue;
            }
            let i01 = i | b1;
            let i10 = i | b0;
            let i11 = i | both;
            if g.p00 != one {
                self.amps[i] *= g.p00;
            }
            let (x, y) = (self.amps[i01], self.amps[i10]);
            self.amps[i01] = g.block[0][0] * x + g.block[0][1] * y;
            self.amps[i10] = g.block[1][0] * x + g.block[1][1] * y;
            if g.p11 != one {
                self.amps[i11] *= g.p11;
            }
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let bit = 1usize << q;
        match p {
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::Y => {
                let im = C64::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | bit];
                        self.amps[i] = -im * a1;
                        self.amps[i | bit] = im * a0;
                    }
                }
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        for &q in g.support() {
            if q >= self.n {
                return Err(Error::QubitRange {
                    index: q,
                    n_qubits: self.n,
                });
            }
        }
        match gate_unitary(&g.kind) {
            Unitary::One(m) => self.apply_1q(g.qubits[0], &m),
            Unitary::Two(m) => self.apply_nc(g.qubits[0], g.qubits[1], &NcGate::from_matrix(&m)),
        }
        Ok(())
    }

    /// Apply every moment of `c` in order.
    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        self.apply_moments(c, 0, c.moments.len())
    }

    /// Apply moments `from..to` of `c`.
    pub fn apply_moments(&mut self, c: &Circuit, from: usize, to: usize) -> Result<()> {
        if c.n_qubits > self.n {
            return Err(Error::QubitRange {
                index: c.n_qubits - 1,
                n_qubits: self.n,
            });
        }
        for m in &c.moments[from..to] {
            for g in m {
                self.apply_gate(g)?;
            }
        }
        Ok(())
    }

    /// <psi|O|psi>, imaginary part discarded.
    pub fn expectation(&self, op: &QubitOperator) -> f64 {
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        op.apply_add(&self.amps, &mut out);
        self.amps
            .iter()
            .zip(&out)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// <psi| a_i^dag a_j + a_j^dag a_i |psi> for JW modes i != j.
    pub fn hopping_expectation(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (i.min(j), i.max(j));
        let between = ((1usize << hi) - 1) & !((1usize << (lo + 1)) - 1);
        let (bi, bj) = (1usize << lo, 1usize << hi);
        let mut s = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            // a_lo^dag a_hi maps idx (hi set, lo clear) to idx ^ (bi|bj)
            if idx & bj != 0 && idx & bi == 0 {
                let t = idx ^ (bi | bj);
                let sign = if (idx & between).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                s += sign * (self.amps[t].conj() * a).re;
            }
        }
        2.0 * s
    }

    /// Expectation of a diagonal function of the basis index.
    pub fn diagonal_expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * f(i))
            .sum()
    }
}

/// Dense unitary of a circuit by columns (small n only).
pub fn dense_unitary(c: &Circuit) -> Result<nalgebra::DMatrix<C64>> {
    let dim = 1usize << c.n_qubits;
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut s = StateVector::basis(c.n_qubits, j)?;
        s.apply_circuit(c)?;
        for (i, a) in s.amplitudes().iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    Ok(m)
}

/// Max elementwise distance between two matrices after removing the best
/// global phase (taken from the largest entry of `b`).
pub fn phase_distance(a: &nalgebra::DMatrix<C64>, b: &nalgebra::DMatrix<C64>) -> f64 {
    let (mut bi, mut bmax) = (0, -1.0);
    for (k, v) in b.iter().enumerate() {
        if v.norm() > bmax {
            bmax = v.norm();
            bi = k;
        }
    }
    let ph = a.as_slice()[bi] / b.as_slice()[bi];
    let ph = ph / ph.norm();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - ph * y).norm())
        .fold(0.0, f64::max)
}
