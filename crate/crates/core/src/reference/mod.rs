//! Classical references: exact diagonalisation, exact ansatz energies,
//! the noiseless VQE optimum, FLO reference values and the best Slater
//! determinant.

pub mod lanczos;
pub mod localopt;
pub mod sector;
pub mod slater;

pub use sector::{SectorBasis, SectorHamiltonian};
pub use slater::optimal_slater;

use crate::circuits::Ansatz;
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{JwLayout, LatticeSpec, SectorSpec, Spin};
use crate::observables::DiagonalStats;
use crate::simulator::rng::{rng, Stream};
use crate::simulator::{simulate, StateVector};
use localopt::{bfgs, nelder_mead, BfgsOptions};
use rand::Rng;
use std::f64::consts::FRAC_PI_2;

/// Ground state of one sector.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub basis: SectorBasis,
    pub vector: Vec<f64>,
}

/// Residual tolerance of the exact solver.
pub const GROUND_TOL: f64 = 1e-10;

pub fn exact_ground(lattice: &LatticeSpec, sector: &SectorSpec) -> Result<GroundState> {
    let basis = SectorBasis::new(lattice, sector)?;
    let h = SectorHamiltonian::new(&basis);
    let (energy, vector) = lanczos::lowest_eigenpair(h.dim(), |x, y| h.apply(x, y), GROUND_TOL)?;
    Ok(GroundState {
        energy,
        basis,
        vector,
    })
}

/// Diagonal observables of an exact sector state.
pub fn exact_observables(g: &GroundState) -> DiagonalStats {
    DiagonalStats::from_weighted(
        g.basis
            .states
            .iter()
            .zip(&g.vector)
            .map(|(&s, &a)| (s, a * a)),
        &g.basis.layout,
        0,
        1.0,
    )
}

/// Diagonal observables of a statevector.
pub fn state_observables(state: &StateVector, layout: &JwLayout) -> DiagonalStats {
    DiagonalStats::from_weighted(
        state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 1e-30)
            .map(|(i, a)| (i as u32, a.norm_sqr())),
        layout,
        0,
        1.0,
    )
}

/// Exact energy of ansatz states.
#[derive(Debug, Clone)]
pub struct AnsatzEvaluator {
    pub ansatz: Ansatz,
    hops: Vec<(usize, usize)>,
    onsite: Vec<(usize, usize)>,
}

impl AnsatzEvaluator {
    pub fn new(ansatz: Ansatz) -> Self {
        let lat = ansatz.lattice;
        let lay = &ansatz.layout;
        let mut hops = Vec::new();
        for spin in Spin::BOTH {
            for e in lat.edges() {
                hops.push((lay.mode(e.a, spin), lay.mode(e.b, spin)));
            }
        }
        let onsite = (0..lat.n_sites())
            .map(|s| (lay.mode(s, Spin::Up), lay.mode(s, Spin::Down)))
            .collect();
        Self {
            ansatz,
            hops,
            onsite,
        }
    }

    pub fn state(&self, params: &[f64]) -> Result<StateVector> {
        simulate(&self.ansatz.circuit(params)?)
    }

    /// (hopping energy, onsite double-occupancy sum) of a state.
    pub fn energy_parts(&self, s: &StateVector) -> (f64, f64) {
        let hop: f64 = self.hops.iter().map(|&(a, b)| -s.hopping_expectation(a, b)).sum();
        let mask: Vec<usize> = self.onsite.iter().map(|&(a, b)| (1 << a) | (1 << b)).collect();
        let d = s.diagonal_expectation(|i| mask.iter().filter(|&&m| i & m == m).count() as f64);
        (hop, d)
    }

    pub fn energy_of(&self, s: &StateVector) -> f64 {
        let (h, d) = self.energy_parts(s);
        h + self.ansatz.lattice.u * d
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        Ok(self.energy_of(&self.state(params)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeOptimum {
    pub params: Vec<f64>,
    pub energy: f64,
}

/// Best local minimum of the noiseless ansatz energy from the zero start and
/// `restarts` random starts, polished by Nelder-Mead.
pub fn simulate_vqe_optimum(ansatz: &Ansatz, restarts: usize, seed: u64) -> Result<VqeOptimum> {
    if ansatz.layers == 0 {
        return Err(Error::Config("VQE optimum needs at least one layer".into()));
    }
    let ev = AnsatzEvaluator::new(ansatz.clone());
    let n = ansatz.n_params();
    ev.energy(&vec![0.0; n])?;
    let f = |p: &[f64]| ev.energy(p).expect("parameter length checked");
    let runs = exec::map_range(restarts + 1, |k| {
        let x0: Vec<f64> = if k == 0 {
            vec![0.0; n]
        } else {
            let mut r = rng(seed, Stream::Restart, k as u64);
            (0..n).map(|_| r.random_range(-FRAC_PI_2..FRAC_PI_2)).collect()
        };
        bfgs(f, &x0, BfgsOptions::default())
    });
    let (mut best, mut fbest) = runs[0].clone();
    for (x, fx) in runs.into_iter().skip(1) {
        if fx < fbest {
            best = x;
            fbest = fx;
        }
    }
    let (x, fx) = nelder_mead(f, &best, 0.02, 1e-13, 400 * (n + 1));
    if fx < fbest {
        best = x;
        fbest = fx;
    }
    Ok(VqeOptimum {
        params: best,
        energy: fbest,
    })
}

/// Exact energy and diagonal observables of an FLO circuit (onsite angles 0).
pub fn flo_reference(ansatz: &Ansatz, params: &[f64]) -> Result<(f64, DiagonalStats)> {
    if params.len() != ansatz.n_params() {
        return Err(Error::ParamLength {
            expected: ansatz.n_params(),
            got: params.len(),
        });
    }
    for i in ansatz.onsite_indices() {
        if params[i] != 0.0 {
            return Err(Error::NotFlo(params[i]));
        }
    }
    let ev = AnsatzEvaluator::new(ansatz.clone());
    let s = ev.state(params)?;
    Ok((ev.energy_of(&s), state_observables(&s, &ansatz.layout)))
}

/// Sum of the lowest single-particle energies filling both spin sectors.
pub fn free_fermion_energy(lattice: &LatticeSpec, sector: &SectorSpec) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(lattice.hopping_matrix());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[..sector.n_up].iter().sum::<f64>() + v[..sector.n_down].iter().sum::<f64>()
}
