//! Fermi-Hubbard instances, term lists and the snake Jordan-Wigner encoding.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Rectangular open-boundary Hubbard lattice with hopping fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    pub u: f64,
}

impl LatticeSpec {
    pub fn new(lx: usize, ly: usize, u: f64) -> Result<Self> {
        if lx == 0 || ly == 0 {
            return Err(Error::Config(format!("lattice {lx}x{ly} is empty")));
        }
        if lx > 2 {
            return Err(Error::Unsupported(format!(
                "lattice {lx}x{ly}: only 1xLy and 2xLy swap networks are implemented"
            )));
        }
        if lx * ly < 2 {
            return Err(Error::Config("lattice needs at least 2 sites".into()));
        }
        if 2 * lx * ly > 32 {
            return Err(Error::Infeasible(format!(
                "{} modes exceeds the 32-mode cap",
                2 * lx * ly
            )));
        }
        if !u.is_finite() {
            return Err(Error::Config("U must be finite".into()));
        }
        Ok(Self { lx, ly, u })
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_sites()
    }

    /// Row-major site index of (x, y).
    pub fn site(&self, x: usize, y: usize) -> usize {
        y * self.lx + x
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.lx, site / self.lx)
    }

    /// Sites in snake order: row y runs left to right for even y and right to
    /// left for odd y.
    pub fn snake(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n_sites());
        for y in 0..self.ly {
            if y % 2 == 0 {
                out.extend((0..self.lx).map(|x| self.site(x, y)));
            } else {
                out.extend((0..self.lx).rev().map(|x| self.site(x, y)));
            }
        }
        out
    }

    /// Nearest-neighbour edges, row-major over the lower/left site, each
    /// site's horizontal edge before its vertical edge.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for y in 0..self.ly {
            for x in 0..self.lx {
                if x + 1 < self.lx {
                    out.push(Edge {
                        a: self.site(x, y),
                        b: self.site(x + 1, y),
                        dir: EdgeDir::Horizontal,
                    });
                }
                if y + 1 < self.ly {
                    out.push(Edge {
                        a: self.site(x, y),
                        b: self.site(x, y + 1),
                        dir: EdgeDir::Vertical,
                    });
                }
            }
        }
        out
    }

    /// Number of variational parameters per ansatz layer.
    pub fn params_per_layer(&self) -> usize {
        if self.lx == 1 {
            3
        } else {
            4
        }
    }

    /// Single-particle hopping matrix in site indices (entries -1 on edges).
    pub fn hopping_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n_sites();
        let mut t = nalgebra::DMatrix::zeros(n, n);
        for e in self.edges() {
            t[(e.a, e.b)] = -1.0;
            t[(e.b, e.a)] = -1.0;
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeDir {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub dir: EdgeDir,
}

/// Per-spin occupation numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorSpec {
    pub n_up: usize,
    pub n_down: usize,
}

impl SectorSpec {
    pub fn new(lattice: &LatticeSpec, n_up: usize, n_down: usize) -> Result<Self> {
        let l = lattice.n_sites();
        if n_up > l || n_down > l {
            return Err(Error::Config(format!(
                "sector ({n_up},{n_down}) does not fit {l} sites"
            )));
        }
        Ok(Self { n_up, n_down })
    }

    /// Sector for a total occupation; odd totals carry the extra spin-up particle.
    pub fn from_total(lattice: &LatticeSpec, n_occ: usize) -> Result<Self> {
        let n_down = n_occ / 2;
        Self::new(lattice, n_occ - n_down, n_down)
    }

    pub fn n_occ(&self) -> usize {
        self.n_up + self.n_down
    }

    pub fn count(&self, spin: Spin) -> usize {
        match spin {
            Spin::Up => self.n_up,
            Spin::Down => self.n_down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Hardware qubit layout. Both use the same snake Jordan-Wigner order; the
/// zig-zag layout needs FSWAP layers around the onsite interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Rectangle,
    Zigzag,
}

/// Bijection (site, spin) -> mode (qubit) index.
#[derive(Debug, Clone, PartialEq)]
pub struct JwLayout {
    pub mode: Layout,
    n_sites: usize,
    pos_of_site: Vec<usize>,
    site_at_pos: Vec<usize>,
}

impl JwLayout {
    pub fn new(lattice: &LatticeSpec, mode: Layout) -> Self {
        let site_at_pos = lattice.snake();
        let mut pos_of_site = vec![0; site_at_pos.len()];
        for (p, &s) in site_at_pos.iter().enumerate() {
            pos_of_site[s] = p;
        }
        Self {
            mode,
            n_sites: lattice.n_sites(),
            pos_of_site,
            site_at_pos,
        }
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_sites
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Position of a site along the snake.
    pub fn pos(&self, site: usize) -> usize {
        self.pos_of_site[site]
    }

    pub fn site_at(&self, pos: usize) -> usize {
        self.site_at_pos[pos]
    }

    /// Qubit index of (site, spin): spin-up block first, spin-down after it.
    pub fn mode(&self, site: usize, spin: Spin) -> usize {
        spin.index() * self.n_sites + self.pos_of_site[site]
    }

    /// Bit mask selecting the qubits of one spin block.
    pub fn spin_mask(&self, spin: Spin) -> u32 {
        let block = ((1u64 << self.n_sites) - 1) as u32;
        block << (spin.index() * self.n_sites)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermKind {
    /// a_i^dag a_j + h.c. for sites i, j of one spin.
    Hopping { spin: Spin, sites: (usize, usize) },
    /// n_{i up} n_{i down}.
    Onsite { site: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionicTerm {
    pub kind: TermKind,
    pub coeff: f64,
    pub group_id: usize,
}

/// Group id of an edge: 1xLy uses 1 for snake pairs (2i,2i+1) and 2 for
/// (2i+1,2i+2); 2xLy uses 1 horizontal, 2 vertical with even-parity lower
/// site, 3 vertical with odd-parity lower site. Group 0 is onsite.
pub fn edge_group(lattice: &LatticeSpec, edge: &Edge) -> usize {
    if lattice.lx == 1 {
        let lo = edge.a.min(edge.b);
        if lo % 2 == 0 {
            1
        } else {
            2
        }
    } else {
        match edge.dir {
            EdgeDir::Horizontal => 1,
            EdgeDir::Vertical => {
                let (x, y) = lattice.coords(edge.a);
                if (x + y) % 2 == 0 {
                    2
                } else {
                    3
                }
            }
        }
    }
}

/// Number of distinct term groups (onsite included).
pub fn n_groups(lattice: &LatticeSpec) -> usize {
    lattice.params_per_layer()
}

/// All terms of H = -sum_<ij>,s (a^dag a + h.c.) + U sum_i n_up n_down.
pub fn build_hamiltonian(lattice: &LatticeSpec) -> Vec<FermionicTerm> {
    let mut terms = Vec::new();
    let edges = lattice.edges();
    for spin in Spin::BOTH {
        for e in &edges {
            terms.push(FermionicTerm {
                kind: TermKind::Hopping {
                    spin,
                    sites: (e.a, e.b),
                },
                coeff: -1.0,
                group_id: edge_group(lattice, e),
            });
        }
    }
    for site in 0..lattice.n_sites() {
        terms.push(FermionicTerm {
            kind: TermKind::Onsite { site },
            coeff: lattice.u,
            group_id: 0,
        });
    }
    terms
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coeff: f64,
    /// Sorted by qubit, at most one entry per qubit.
    pub ops: Vec<(usize, Pauli)>,
}

/// coeff * |11><11| on two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector11 {
    pub coeff: f64,
    pub qubits: (usize, usize),
}

/// Real linear combination of Pauli strings and |11><11| projectors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QubitOperator {
    pub paulis: Vec<PauliString>,
    pub projectors: Vec<Projector11>,
}

impl QubitOperator {
    pub fn scaled(mut self, c: f64) -> Self {
        for p in &mut self.paulis {
            p.coeff *= c;
        }
        for p in &mut self.projectors {
            p.coeff *= c;
        }
        self
    }

    pub fn extend(&mut self, other: QubitOperator) {
        self.paulis.extend(other.paulis);
        self.projectors.extend(other.projectors);
    }

    pub fn max_qubit(&self) -> Option<usize> {
        let a = self.paulis.iter().flat_map(|p| p.ops.iter().map(|o| o.0));
        let b = self
            .projectors
            .iter()
            .flat_map(|p| [p.qubits.0, p.qubits.1]);
        a.chain(b).max()
    }

    /// out += O |psi>, basis index bit q = qubit q.
    pub fn apply_add(&self, psi: &[C64], out: &mut [C64]) {
        for p in &self.paulis {
            let mut flip = 0usize;
            let mut y_mask = 0usize;
            let mut z_mask = 0usize;
            for &(q, op) in &p.ops {
                match op {
                    Pauli::X => flip |= 1 << q,
                    Pauli::Y => {
                        flip |= 1 << q;
                        y_mask |= 1 << q;
                    }
                    Pauli::Z => z_mask |= 1 << q,
                }
            }
            let ny = y_mask.count_ones();
            // Y|b> = i (-1)^b |1-b>
            let base = C64::new(0.0, 1.0).powu(ny) * p.coeff;
            for (idx, &a) in psi.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let odd = ((idx & (y_mask | z_mask)).count_ones() & 1) == 1;
                let amp = if odd { -base * a } else { base * a };
                out[idx ^ flip] += amp;
            }
        }
        for p in &self.projectors {
            let m = (1usize << p.qubits.0) | (1usize << p.qubits.1);
            for (idx, &a) in psi.iter().enumerate() {
                if idx & m == m {
                    out[idx] += a * p.coeff;
                }
            }
        }
    }

    /// Dense 2^n matrix (test-sized n only).
    pub fn to_dense(&self, n_qubits: usize) -> nalgebra::DMatrix<C64> {
        let dim = 1usize << n_qubits;
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            col.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            self.apply_add(&e, &mut col);
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

/// Jordan-Wigner image of the bare operator of a term (without its coefficient).
///
/// Hopping between modes i < j becomes 1/2 (X_i X_j + Y_i Y_j) Z_{i+1}..Z_{j-1};
/// onsite becomes the projector |11><11| on the site's two qubits.
pub fn jordan_wigner(term: &FermionicTerm, layout: &JwLayout) -> QubitOperator {
    match term.kind {
        TermKind::Hopping { spin, sites } => {
            let a = layout.mode(sites.0, spin);
            let b = layout.mode(sites.1, spin);
            hopping_operator(a, b)
        }
        TermKind::Onsite { site } => QubitOperator {
            paulis: vec![],
            projectors: vec![Projector11 {
                coeff: 1.0,
                qubits: (layout.mode(site, Spin::Up), layout.mode(site, Spin::Down)),
            }],
        },
    }
}

/// 1/2 (X_i X_j + Y_i Y_j) with the Z string between the two modes.
pub fn hopping_operator(a: usize, b: usize) -> QubitOperator {
    let (i, j) = (a.min(b), a.max(b));
    let string: Vec<(usize, Pauli)> = (i + 1..j).map(|q| (q, Pauli::Z)).collect();
    let make = |p: Pauli| {
        let mut ops = vec![(i, p)];
        ops.extend(string.iter().copied());
        ops.push((j, p));
        PauliString { coeff: 0.5, ops }
    };
    QubitOperator {
        paulis: vec![make(Pauli::X), make(Pauli::Y)],
        projectors: vec![],
    }
}

/// Sum of all mapped Hamiltonian terms.
pub fn exact_qubit_hamiltonian(lattice: &LatticeSpec, layout: &JwLayout) -> QubitOperator {
    let mut op = QubitOperator::default();
    for t in build_hamiltonian(lattice) {
        op.extend(jordan_wigner(&t, layout).scaled(t.coeff));
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snake_2x4_matches_layout() {
        let l = LatticeSpec::new(2, 4, 4.0).unwrap();
        let coords: Vec<_> = l.snake().iter().map(|&s| l.coords(s)).collect();
        assert_eq!(
            coords,
            vec![(0, 0), (1, 0), (1, 1), (0, 1), (0, 2), (1, 2), (1, 3), (0, 3)]
        );
    }

    #[test]
    fn term_counts() {
        let l = LatticeSpec::new(1, 2, 4.0).unwrap();
        let t = build_hamiltonian(&l);
        assert_eq!(t.len(), 4);
        let l = LatticeSpec::new(1, 8, 4.0).unwrap();
        let t = build_hamiltonian(&l);
        let hops = t
            .iter()
            .filter(|t| matches!(t.kind, TermKind::Hopping { .. }))
            .count();
        assert_eq!(hops, 14);
        assert_eq!(t.len() - hops, 8);
        let l = LatticeSpec::new(2, 4, 4.0).unwrap();
        let e = l.edges();
        assert_eq!(e.iter().filter(|e| e.dir == EdgeDir::Horizontal).count(), 4);
        assert_eq!(e.iter().filter(|e| e.dir == EdgeDir::Vertical).count(), 6);
    }

    #[test]
    fn unsupported_shape() {
        assert!(matches!(
            LatticeSpec::new(3, 3, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn jw_string_and_onsite() {
        let op = hopping_operator(1, 4);
        assert_eq!(op.paulis.len(), 2);
        assert_eq!(
            op.paulis[0].ops,
            vec![(1, Pauli::X), (2, Pauli::Z), (3, Pauli::Z), (4, Pauli::X)]
        );
        let op = hopping_operator(3, 4);
        assert_eq!(op.paulis[1].ops, vec![(3, Pauli::Y), (4, Pauli::Y)]);
        let l = LatticeSpec::new(1, 8, 4.0).unwrap();
        let lay = JwLayout::new(&l, Layout::Zigzag);
        let t = FermionicTerm {
            kind: TermKind::Onsite { site: 0 },
            coeff: 4.0,
            group_id: 0,
        };
        assert_eq!(jordan_wigner(&t, &lay).projectors[0].qubits, (0, 8));
    }

    #[test]
    fn odd_sector_has_extra_up() {
        let l = LatticeSpec::new(1, 8, 4.0).unwrap();
        let s = SectorSpec::from_total(&l, 7).unwrap();
        assert_eq!((s.n_up, s.n_down), (4, 3));
    }
}
