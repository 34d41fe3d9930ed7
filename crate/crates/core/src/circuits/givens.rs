//! Givens-rotation networks preparing the U=0 ground state of each spin sector.

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use crate::model::{JwLayout, LatticeSpec, SectorSpec, Spin};
use nalgebra::DMatrix;

const ZERO_TOL: f64 = 1e-8;

/// One rotation on adjacent JW positions (j-1, j) with cosine/sine (c, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub pos: usize,
    pub c: f64,
    pub s: f64,
}

/// Hopping matrix in JW (snake position) order.
pub fn hopping_matrix_jw(lattice: &LatticeSpec, layout: &JwLayout) -> DMatrix<f64> {
    let t = lattice.hopping_matrix();
    let n = lattice.n_sites();
    DMatrix::from_fn(n, n, |p, q| t[(layout.site_at(p), layout.site_at(q))])
}

/// Single-particle eigenpairs sorted ascending; each eigenvector's first
/// nonzero component is made positive.
pub fn single_particle_modes(t: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(t.clone());
    let n = t.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut vecs = DMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-10) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        vecs.set_column(k, &v);
        vals.push(eig.eigenvalues[i]);
    }
    (vals, vecs)
}

/// Diagonal-sweep elimination of an m x n real orbital matrix with orthonormal
/// rows (m <= n). Returns layers of column rotations; applying their
/// transposes in reverse order to |1..1 0..0> yields the determinant of `q`.
pub fn givens_layers(q: &DMatrix<f64>) -> Vec<Vec<Rotation>> {
    let mut q = q.clone();
    let (m, n) = (q.nrows(), q.ncols());
    if m == 0 || m == n {
        return Vec::new();
    }
    // Row operations clear the upper-right triangle; they only mix occupied
    // orbitals and leave the determinant unchanged up to sign.
    for k in (n - m + 1..n).rev() {
        for l in 0..(m + k - n) {
            if q[(l, k)].abs() > ZERO_TOL {
                let (a, b) = (q[(l, k)], q[(l + 1, k)]);
                let r = a.hypot(b);
                let (c, s) = (b / r, a / r);
                for col in 0..n {
                    let (x, y) = (q[(l, col)], q[(l + 1, col)]);
                    q[(l, col)] = c * x - s * y;
                    q[(l + 1, col)] = s * x + c * y;
                }
            }
        }
    }
    let mut layers = Vec::new();
    for k in 0..n - 1 {
        let lo = (k + 1).saturating_sub(n - m);
        let hi = k.min(m - 1);
        let mut layer = Vec::new();
        for i in lo..=hi {
            let j = n - m + 2 * i - k;
            if q[(i, j)].abs() > ZERO_TOL {
                let (a, b) = (q[(i, j - 1)], q[(i, j)]);
                let r = a.hypot(b);
                let (c, s) = (a / r, b / r);
                for row in 0..m {
                    let (x, y) = (q[(row, j - 1)], q[(row, j)]);
                    q[(row, j - 1)] = c * x + s * y;
                    q[(row, j)] = -s * x + c * y;
                }
                layer.push(Rotation { pos: j - 1, c, s });
            }
        }
        if !layer.is_empty() {
            layers.push(layer);
        }
    }
    layers
}

/// Layers of G gates for one spin sector, in application order, with the
/// qubit offset of that sector.
fn sector_moments(orbitals: &DMatrix<f64>, n_occ: usize, offset: usize) -> Vec<Vec<Gate>> {
    let q = orbitals.columns(0, n_occ).transpose();
    let layers = givens_layers(&q);
    layers
        .iter()
        .rev()
        .map(|layer| {
            layer
                .iter()
                .map(|r| {
                    Gate::two(
                        GateKind::G(-2.0 * r.s.atan2(r.c)),
                        offset + r.pos,
                        offset + r.pos + 1,
                    )
                })
                .collect()
        })
        .collect()
}

/// X gates filling the first N_sigma JW positions of each spin block, then the
/// Givens networks of both sectors side by side.
pub fn build_initial_prep(lattice: &LatticeSpec, sector: &SectorSpec, layout: &JwLayout) -> Circuit {
    let l = lattice.n_sites();
    let mut c = Circuit::new(2 * l);
    let mut xs = Vec::new();
    for spin in Spin::BOTH {
        for p in 0..sector.count(spin) {
            xs.push(Gate::one(GateKind::X, spin.index() * l + p));
        }
    }
    c.push(xs);
    let (_, orbitals) = single_particle_modes(&hopping_matrix_jw(lattice, layout));
    let up = sector_moments(&orbitals, sector.n_up, 0);
    let down = sector_moments(&orbitals, sector.n_down, l);
    for k in 0..up.len().max(down.len()) {
        let mut m = up.get(k).cloned().unwrap_or_default();
        m.extend(down.get(k).cloned().unwrap_or_default());
        c.push(m);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Layout;

    fn counts(lx: usize, ly: usize, n: usize) -> (usize, usize) {
        let lat = LatticeSpec::new(lx, ly, 0.0).unwrap();
        let lay = JwLayout::new(&lat, Layout::Zigzag);
        let (_, v) = single_particle_modes(&hopping_matrix_jw(&lat, &lay));
        let layers = givens_layers(&v.columns(0, n).transpose());
        (layers.len(), layers.iter().map(Vec::len).sum())
    }

    #[test]
    fn network_sizes() {
        assert_eq!(counts(1, 4, 0), (0, 0));
        assert_eq!(counts(1, 4, 2), (3, 4));
        assert_eq!(counts(1, 8, 4), (7, 16));
        assert_eq!(counts(2, 4, 4), (6, 15));
        assert_eq!(counts(2, 4, 3), (7, 15));
        assert_eq!(counts(1, 8, 8), (0, 0));
    }
}
