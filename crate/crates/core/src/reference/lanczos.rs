//! Lowest eigenpair of a real symmetric operator.

use crate::error::{Error, Result};
use crate::simulator::rng::{rng, Stream};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Ground eigenpair of `apply` (dimension `dim`), with residual
/// ||H v - E v|| below `tol`. Dense diagonalisation below 400 states,
/// restarted Lanczos with full reorthogonalisation above.
pub fn lowest_eigenpair<F>(dim: usize, apply: F, tol: f64) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Err(Error::Numerical("empty operator".into()));
    }
    let mut tmp = vec![0.0; dim];
    if dim <= 400 {
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for j in 0..dim {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            apply(&e, &mut tmp);
            for i in 0..dim {
                m[(i, j)] = tmp[i];
            }
        }
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        let k = eig.eigenvalues.imin();
        return Ok((eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()));
    }
    let mut r = rng(0x1a2c, Stream::Restart, dim as u64);
    let mut start: Vec<f64> = (0..dim).map(|_| r.random::<f64>() - 0.5).collect();
    normalize(&mut start);
    let krylov = dim.min(120);
    for _restart in 0..60 {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            apply(&basis[j], &mut tmp);
            let a = dot(&basis[j], &tmp);
            alpha.push(a);
            let mut w = tmp.clone();
            // Full reorthogonalisation, twice for stability.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let bn = normalize(&mut w);
            if j + 1 == krylov || bn < 1e-13 {
                break;
            }
            beta.push(bn);
            basis.push(w);
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let k = eig.eigenvalues.imin();
        let y: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        let mut v = vec![0.0; dim];
        for (i, b) in basis.iter().enumerate().take(m) {
            v.iter_mut().zip(b).for_each(|(x, z)| *x += y[i] * z);
        }
        normalize(&mut v);
        apply(&v, &mut tmp);
        let e = dot(&v, &tmp);
        let res = tmp
            .iter()
            .zip(&v)
            .map(|(h, x)| (h - e * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if res < tol {
            return Ok((e, v));
        }
        start = v;
    }
    Err(Error::Numerical("Lanczos did not converge".into()))
}
