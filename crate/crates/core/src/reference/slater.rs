//! Best single Slater determinant (shared orbitals for both spins) by local
//! search over a Hermitian one-body matrix h.

use super::localopt::{bfgs, BfgsOptions};
use crate::exec;
use crate::model::{LatticeSpec, SectorSpec};
use crate::simulator::rng::{rng, Stream};
use crate::C64;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Hermitian matrix from L^2 reals: diagonal, then real and imaginary parts
/// of the strict upper triangle.
pub fn hermitian_from_params(p: &[f64], l: usize) -> DMatrix<C64> {
    let mut h = DMatrix::zeros(l, l);
    let mut k = 0;
    for i in 0..l {
        h[(i, i)] = C64::new(p[k], 0.0);
        k += 1;
    }
    for i in 0..l {
        for j in i + 1..l {
            let z = C64::new(p[k], p[k + 1]);
            k += 2;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn params_from_real(t: &DMatrix<f64>) -> Vec<f64> {
    let l = t.nrows();
    let mut p: Vec<f64> = (0..l).map(|i| t[(i, i)]).collect();
    for i in 0..l {
        for j in i + 1..l {
            p.push(t[(i, j)]);
            p.push(0.0);
        }
    }
    p
}

/// Energy of the determinant filling the lowest n_up (n_down) eigenvectors of h:
/// sum_s tr(T rho_s) + U sum_i rho_up_ii rho_down_ii.
pub fn slater_energy(h: &DMatrix<C64>, lattice: &LatticeSpec, sector: &SectorSpec) -> f64 {
    let l = lattice.n_sites();
    let t = lattice.hopping_matrix();
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let rho = |n: usize| {
        let mut r = DMatrix::<C64>::zeros(l, l);
        for &k in order.iter().take(n) {
            let v = eig.eigenvectors.column(k);
            for i in 0..l {
                for j in 0..l {
                    // rho_ij = <a_i^dag a_j>
                    r[(i, j)] += v[i].conj() * v[j];
                }
            }
        }
        r
    };
    let ru = rho(sector.n_up);
    let rd = rho(sector.n_down);
    let mut e = 0.0;
    for i in 0..l {
        for j in 0..l {
            e += t[(i, j)] * (ru[(i, j)].re + rd[(i, j)].re);
        }
        e += lattice.u * ru[(i, i)].re * rd[(i, i)].re;
    }
    e
}

/// Lowest Slater-Condon energy found from the hopping matrix and `restarts`
/// randomly perturbed copies of it.
pub fn optimal_slater(lattice: &LatticeSpec, sector: &SectorSpec, restarts: usize, seed: u64) -> f64 {
    let l = lattice.n_sites();
    let base = params_from_real(&lattice.hopping_matrix());
    let f = |p: &[f64]| slater_energy(&hermitian_from_params(p, l), lattice, sector);
    let results = exec::map_range(restarts.max(1), |k| {
        let mut p = base.clone();
        if k > 0 {
            let mut r = rng(seed, Stream::Restart, k as u64);
            let scale = 0.5 * (k as f64 / restarts as f64 + 0.2);
            p.iter_mut().for_each(|v| *v += scale * (r.random::<f64>() - 0.5) * 2.0);
        }
        let opts = BfgsOptions {
            max_iter: 400,
            grad_tol: 1e-9,
            step: 1e-6,
        };
        bfgs(f, &p, opts).1
    });
    results.into_iter().fold(f64::INFINITY, f64::min)
}
