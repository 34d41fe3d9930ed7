//! Gate set: composite fermionic gates, their merged variants, and the native
//! sqrt(iSWAP) + single-qubit rotation set.
//!
//! Two-qubit matrices use the basis index 2*b0 + b1 where b0 is the bit of
//! `qubits[0]`.

use crate::C64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// Real Givens rotation, block [[c,-s],[s,c]] on |01>,|10>.
    G(f64),
    /// Hopping evolution, block [[c,-is],[-is,c]] on |01>,|10>.
    H(f64),
    /// Onsite phase diag(1,1,1,e^{i phi}).
    O(f64),
    Fswap,
    /// Hopping-measurement basis change, G(-pi/2).
    B,
    /// FSWAP * H(theta): horizontal hopping merged with the swap.
    HFswap(f64),
    /// B * H(theta): final hopping layer merged with its measurement rotation.
    BH(f64),
    SqrtISwap,
    X,
    Z,
    Rz(f64),
    Rx(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::X | GateKind::Z | GateKind::Rz(_) | GateKind::Rx(_) => 1,
            _ => 2,
        }
    }

    pub fn is_native(&self) -> bool {
        self.arity() == 1 || matches!(self, GateKind::SqrtISwap)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::G(_) => "G",
            GateKind::H(_) => "H",
            GateKind::O(_) => "O",
            GateKind::Fswap => "FSWAP",
            GateKind::B => "B",
            GateKind::HFswap(_) => "HFSWAP",
            GateKind::BH(_) => "BH",
            GateKind::SqrtISwap => "SQRT_ISWAP",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Rz(_) => "RZ",
            GateKind::Rx(_) => "RX",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::G(a)
            | GateKind::H(a)
            | GateKind::O(a)
            | GateKind::HFswap(a)
            | GateKind::BH(a)
            | GateKind::Rz(a)
            | GateKind::Rx(a) => Some(a),
            _ => None,
        }
    }

    /// Rebuild from a name and optional angle (inverse of `name`/`angle`).
    pub fn from_parts(name: &str, angle: Option<f64>) -> Option<GateKind> {
        let a = || angle;
        Some(match name {
            "G" => GateKind::G(a()?),
            "H" => GateKind::H(a()?),
            "O" => GateKind::O(a()?),
            "FSWAP" => GateKind::Fswap,
            "B" => GateKind::B,
            "HFSWAP" => GateKind::HFswap(a()?),
            "BH" => GateKind::BH(a()?),
            "SQRT_ISWAP" => GateKind::SqrtISwap,
            "X" => GateKind::X,
            "Z" => GateKind::Z,
            "RZ" => GateKind::Rz(a()?),
            "RX" => GateKind::Rx(a()?),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Second entry is ignored for single-qubit gates.
    pub qubits: [usize; 2],
}

impl Gate {
    pub fn one(kind: GateKind, q: usize) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self {
            kind,
            qubits: [q, q],
        }
    }

    pub fn two(kind: GateKind, q0: usize, q1: usize) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Self {
            kind,
            qubits: [q0, q1],
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }
}

/// Either a 2x2 or a 4x4 unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unitary {
    One(Mat2),
    Two(Mat4),
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn zero() -> C64 {
    c(0.0, 0.0)
}

/// Map an angle into [-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    if (-PI..=PI).contains(&a) {
        return a;
    }
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI && a > 0.0 {
        PI
    } else {
        t
    }
}

pub fn rz(l: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, -l / 2.0), zero()],
        [zero(), C64::from_polar(1.0, l / 2.0)],
    ]
}

pub fn rx(l: f64) -> Mat2 {
    let (s, co) = (l / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

/// diag(1, block, 1) on the |01>,|10> subspace with given |00>, |11> phases.
fn number_conserving(p00: C64, block: Mat2, p11: C64) -> Mat4 {
    let mut m = [[zero(); 4]; 4];
    m[0][0] = p00;
    m[1][1] = block[0][0];
    m[1][2] = block[0][1];
    m[2][1] = block[1][0];
    m[2][2] = block[1][1];
    m[3][3] = p11;
    m
}

fn one() -> C64 {
    c(1.0, 0.0)
}

pub fn g_block(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub fn h_block(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = [[zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = zero();
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            m[i][j] = s;
        }
    }
    m
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    m
}

/// Exact unitary of a gate.
pub fn gate_unitary(kind: &GateKind) -> Unitary {
    use GateKind::*;
    match *kind {
        X => Unitary::One([[zero(), one()], [one(), zero()]]),
        Z => Unitary::One([[one(), zero()], [zero(), -one()]]),
        Rz(l) => Unitary::One(rz(l)),
        Rx(l) => Unitary::One(rx(l)),
        G(t) => Unitary::Two(number_conserving(one(), g_block(t), one())),
        H(t) => Unitary::Two(number_conserving(one(), h_block(t), one())),
        O(p) => Unitary::Two(number_conserving(
            one(),
            [[one(), zero()], [zero(), one()]],
            C64::from_polar(1.0, p),
        )),
        Fswap => Unitary::Two(number_conserving(
            one(),
            [[zero(), one()], [one(), zero()]],
            -one(),
        )),
        B => gate_unitary(&G(-FRAC_PI_2)),
        SqrtISwap => Unitary::Two(number_conserving(
            one(),
            [
                [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)],
                [c(0.0, FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)],
            ],
            one(),
        )),
        HFswap(t) => {
            let (Unitary::Two(f), Unitary::Two(h)) = (gate_unitary(&Fswap), gate_unitary(&H(t)))
            else {
                unreachable!()
            };
            Unitary::Two(mat4_mul(&f, &h))
        }
        BH(t) => {
            let (Unitary::Two(b), Unitary::Two(h)) = (gate_unitary(&B), gate_unitary(&H(t))) else {
                unreachable!()
            };
            Unitary::Two(mat4_mul(&b, &h))
        }
    }
}

/// Native lowering of one composite gate as five time-ordered slots:
/// single-qubit, sqrt(iSWAP), single-qubit, sqrt(iSWAP), single-qubit.
/// Single-qubit slots may hold several gates per qubit, in time order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NativeSlots {
    pub pre: Vec<Gate>,
    pub mid: Vec<Gate>,
    pub post: Vec<Gate>,
    pub qubits: [usize; 2],
}

impl NativeSlots {
    /// Flat time-ordered gate list.
    pub fn flatten(&self) -> Vec<Gate> {
        let sq = Gate::two(GateKind::SqrtISwap, self.qubits[0], self.qubits[1]);
        let mut out = self.pre.clone();
        out.push(sq);
        out.extend(self.mid.iter().copied());
        out.push(sq);
        out.extend(self.post.iter().copied());
        out
    }
}

/// Single-qubit rotations for the hopping gate H(theta).
fn h_slots(theta: f64, a: usize, b: usize) -> NativeSlots {
    NativeSlots {
        pre: vec![
            Gate::one(GateKind::Rz(-FRAC_PI_4), a),
            Gate::one(GateKind::Rz(FRAC_PI_4), b),
        ],
        mid: vec![
            Gate::one(GateKind::Rz(PI + theta / 2.0), a),
            Gate::one(GateKind::Rz(-theta / 2.0), b),
        ],
        post: vec![
            Gate::one(GateKind::Rz(5.0 * FRAC_PI_4), a),
            Gate::one(GateKind::Rz(-FRAC_PI_4), b),
        ],
        qubits: [a, b],
    }
}

fn g_slots(theta: f64, a: usize, b: usize) -> NativeSlots {
    NativeSlots {
        pre: vec![],
        mid: vec![
            Gate::one(GateKind::Rz(PI - theta / 2.0), a),
            Gate::one(GateKind::Rz(theta / 2.0), b),
        ],
        post: vec![Gate::one(GateKind::Z, a)],
        qubits: [a, b],
    }
}

/// Euler angles (beta, gamma, delta) with m = Rz(2 beta) Rx(gamma) Rz(2 delta)
/// for an SU(2) block m.
fn su2_euler(m: &Mat2) -> (f64, f64, f64) {
    let a = m[0][0];
    let b = m[0][1];
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let sum = -a.arg();
    let diff = -FRAC_PI_2 - b.arg();
    ((sum + diff) / 2.0, gamma, (sum - diff) / 2.0)
}

/// Native lowering of a two-qubit composite gate.
///
/// Every composite uses exactly two sqrt(iSWAP) gates; the product equals
/// `gate_unitary` up to a global phase. Only the onsite angle is reduced to
/// [-pi, pi] (O is 2pi-periodic; G and H are 4pi-periodic and their
/// lowerings hold for any angle).
pub fn decompose_slots(g: &Gate) -> Option<NativeSlots> {
    use GateKind::*;
    let [a, b] = g.qubits;
    Some(match g.kind {
        G(t) => g_slots(t, a, b),
        B => g_slots(-FRAC_PI_2, a, b),
        H(t) => h_slots(t, a, b),
        Fswap => NativeSlots {
            pre: vec![],
            mid: vec![],
            post: vec![
                Gate::one(Rz(-FRAC_PI_2), a),
                Gate::one(Rz(-FRAC_PI_2), b),
            ],
            qubits: [a, b],
        },
        O(p) => {
            let p = normalize_angle(p);
            let eta = (2f64.sqrt() * (p / 4.0).sin()).asin();
            let xi = (eta.tan() / 2f64.sqrt()).atan();
            NativeSlots {
                pre: vec![
                    Gate::one(Rz(p / 2.0), a),
                    Gate::one(Rz(p / 2.0), b),
                    Gate::one(Rx(xi), a),
                    Gate::one(Rx(-FRAC_PI_2), b),
                    Gate::one(Z, b),
                ],
                mid: vec![Gate::one(Rx(-2.0 * eta), a), Gate::one(Z, b)],
                post: vec![Gate::one(Rx(xi), a), Gate::one(Rx(FRAC_PI_2), b)],
                qubits: [a, b],
            }
        }
        HFswap(t) => {
            // FSWAP * H(t) = (RZ(-pi/2) x RZ(-pi/2)) * H(t - pi) up to phase.
            let mut s = h_slots(t - PI, a, b);
            s.post.push(Gate::one(Rz(-FRAC_PI_2), a));
            s.post.push(Gate::one(Rz(-FRAC_PI_2), b));
            s
        }
        BH(t) => {
            let m = mat2_mul(&g_block(-FRAC_PI_2), &h_block(t));
            let (beta, gamma, delta) = su2_euler(&m);
            let mut s = h_slots(gamma, a, b);
            s.pre.insert(0, Gate::one(Rz(-delta), b));
            s.pre.insert(0, Gate::one(Rz(delta), a));
            s.post.push(Gate::one(Rz(beta), a));
            s.post.push(Gate::one(Rz(-beta), b));
            s
        }
        _ => return None,
    })
}

/// Native gate list (time order) for a composite gate; native gates map to themselves.
pub fn decompose(g: &Gate) -> Vec<Gate> {
    match decompose_slots(g) {
        Some(s) => s.flatten(),
        None => vec![*g],
    }
}

/// Add `bias` to the variational angle of hopping/onsite composites.
pub fn with_angle_bias(kind: GateKind, bias: f64) -> GateKind {
    match kind {
        GateKind::H(t) => GateKind::H(t + bias),
        GateKind::O(t) => GateKind::O(t + bias),
        GateKind::HFswap(t) => GateKind::HFswap(t + bias),
        GateKind::BH(t) => GateKind::BH(t + bias),
        k => k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(gates: &[Gate], q: [usize; 2]) -> Mat4 {
        let mut m = kron(&rz(0.0), &rz(0.0));
        for g in gates {
            let u = match gate_unitary(&g.kind) {
                Unitary::Two(u) => u,
                Unitary::One(u) => {
                    let id = rz(0.0);
                    if g.qubits[0] == q[0] {
                        kron(&u, &id)
                    } else {
                        kron(&id, &u)
                    }
                }
            };
            m = mat4_mul(&u, &m);
        }
        m
    }

    fn phase_dist(a: &Mat4, b: &Mat4) -> f64 {
        let mut best = (0, 0);
        for i in 0..4 {
            for j in 0..4 {
                if b[i][j].norm() > b[best.0][best.1].norm() {
                    best = (i, j);
                }
            }
        }
        let ph = a[best.0][best.1] / b[best.0][best.1];
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((a[i][j] - ph * b[i][j]).norm());
            }
        }
        d
    }

    #[test]
    fn all_composites_decompose() {
        for k in 0..50 {
            let t = -PI + 2.0 * PI * (k as f64 + 0.37) / 50.0;
            for kind in [
                GateKind::G(t),
                GateKind::H(t),
                GateKind::O(t),
                GateKind::Fswap,
                GateKind::B,
                GateKind::HFswap(t),
                GateKind::BH(t),
            ] {
                let g = Gate::two(kind, 0, 1);
                let Unitary::Two(target) = gate_unitary(&kind) else {
                    panic!()
                };
                let d = phase_dist(&product(&decompose(&g), [0, 1]), &target);
                assert!(d < 1e-10, "{kind:?}: {d}");
            }
        }
    }

    #[test]
    fn normalize() {
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(-3.5 * PI) - 0.5 * PI).abs() < 1e-12);
        assert_eq!(normalize_angle(0.3), 0.3);
    }
}
