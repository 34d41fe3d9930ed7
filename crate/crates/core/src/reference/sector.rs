//! Fixed-occupation basis and the sector-restricted Hamiltonian.

use crate::error::{Error, Result};
use crate::model::{JwLayout, LatticeSpec, Layout, SectorSpec};

/// Largest sector dimension handled by the exact solver.
pub const MAX_SECTOR_DIM: usize = 1 << 17;

fn combos(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n))
        .filter(|v| v.count_ones() as usize == k)
        .collect()
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Basis states (JW bitstrings) with the sector's per-spin weights, ascending.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub lattice: LatticeSpec,
    pub sector: SectorSpec,
    pub layout: JwLayout,
    pub states: Vec<u32>,
}

impl SectorBasis {
    pub fn new(lattice: &LatticeSpec, sector: &SectorSpec) -> Result<Self> {
        let l = lattice.n_sites();
        let dim = binom(l, sector.n_up) * binom(l, sector.n_down);
        if dim > MAX_SECTOR_DIM {
            return Err(Error::Infeasible(format!(
                "sector dimension {dim} exceeds {MAX_SECTOR_DIM}"
            )));
        }
        let ups = combos(l, sector.n_up);
        let downs = combos(l, sector.n_down);
        let mut states = Vec::with_capacity(dim);
        for &d in &downs {
            for &u in &ups {
                states.push(u | (d << l));
            }
        }
        states.sort_unstable();
        Ok(Self {
            lattice: *lattice,
            sector: *sector,
            layout: JwLayout::new(lattice, Layout::Rectangle),
            states,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, state: u32) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// Sparse (CSR) sector Hamiltonian.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    pub diag: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

/// Hopping pairs as JW positions (lower, upper) per spin block offset.
fn hopping_modes(lattice: &LatticeSpec, layout: &JwLayout) -> Vec<(usize, usize)> {
    let l = lattice.n_sites();
    let mut out = Vec::new();
    for off in [0, l] {
        for e in lattice.edges() {
            let a = off + layout.pos(e.a);
            let b = off + layout.pos(e.b);
            out.push((a.min(b), a.max(b)));
        }
    }
    out
}

/// Fermionic sign and target of a_lo^dag a_hi + a_hi^dag a_lo acting on `s`.
pub fn hop(s: u32, lo: usize, hi: usize) -> Option<(u32, f64)> {
    let (bl, bh) = (1u32 << lo, 1u32 << hi);
    if (s & bl != 0) == (s & bh != 0) {
        return None;
    }
    let between = (bh - 1) & !((bl << 1) - 1);
    let sign = if (s & between).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Some((s ^ (bl | bh), sign))
}

impl SectorHamiltonian {
    pub fn new(basis: &SectorBasis) -> Self {
        let lat = &basis.lattice;
        let l = lat.n_sites();
        let mask = ((1u64 << l) - 1) as u32;
        let pairs = hopping_modes(lat, &basis.layout);
        let mut diag = Vec::with_capacity(basis.dim());
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &s in &basis.states {
            let up = s & mask;
            let down = (s >> l) & mask;
            diag.push(lat.u * (up & down).count_ones() as f64);
            for &(lo, hi) in &pairs {
                if let Some((t, sign)) = hop(s, lo, hi) {
                    let j = basis.index_of(t).expect("hopping conserves the sector");
                    cols.push(j as u32);
                    vals.push(-sign);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            diag,
            row_start,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// y = H x
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.dim() {
            let mut acc = self.diag[i] * x[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                m[(i, self.cols[k] as usize)] += self.vals[k];
            }
        }
        m
    }
}
