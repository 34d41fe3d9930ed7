use std::f64::consts::{FRAC_PI_2, PI};

use fhvqe::circuits::{apply_spin_echo, decompose, gate_unitary, Ansatz, Circuit, Gate, GateKind, MeasGroup, Unitary};
use fhvqe::model::{exact_qubit_hamiltonian, Layout};
use fhvqe::reference::AnsatzEvaluator;
use fhvqe::simulator::{
    dense_unitary, estimate_energy, phase_distance, run_noisy, sample, simulate, EstimateOptions, NoiseModel,
    StateVector,
};
use fhvqe::{LatticeSpec, SectorSpec, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ansatz(lx: usize, ly: usize, u: f64, n: usize, layout: Layout, layers: usize) -> Ansatz {
    let l = LatticeSpec::new(lx, ly, u).unwrap();
    Ansatz::new(l, SectorSpec::from_total(&l, n).unwrap(), layout, layers)
}

fn two_qubit(kinds: &[GateKind]) -> DMatrix<C64> {
    let mut circ = Circuit::new(2);
    for &k in kinds {
        circ.push(vec![Gate::two(k, 0, 1)]);
    }
    dense_unitary(&circ).unwrap()
}

fn lowered(kind: GateKind) -> DMatrix<C64> {
    let mut circ = Circuit::new(2);
    for g in decompose(&Gate::two(kind, 0, 1)) {
        circ.push(vec![g]);
    }
    dense_unitary(&circ).unwrap()
}

fn identity(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

// exp(-i a (XX+YY)/2) by power series on the 4x4 matrix.
fn xx_yy_exp(a: f64) -> DMatrix<C64> {
    let mut g = DMatrix::<C64>::zeros(4, 4);
    // XX+YY = 2(|01><10| + |10><01|)
    g[(1, 2)] = c(2.0, 0.0);
    g[(2, 1)] = c(2.0, 0.0);
    let m = g * c(0.0, -a / 2.0);
    let mut term = identity(4);
    let mut sum = identity(4);
    for k in 1..60 {
        term = &term * &m / c(k as f64, 0.0);
        sum += &term;
    }
    sum
}

#[test]
fn gate_identities() {
    assert!(phase_distance(&two_qubit(&[GateKind::H(0.0)]), &identity(4)) < 1e-14);
    assert!(maxdiff(&two_qubit(&[GateKind::Fswap, GateKind::Fswap]), &identity(4)) < 1e-14);
    assert!(maxdiff(&two_qubit(&[GateKind::B]), &two_qubit(&[GateKind::G(-FRAC_PI_2)])) < 1e-14);
    assert!(phase_distance(&lowered(GateKind::O(0.0)), &identity(4)) < 1e-12);
    // matrix-consistent angle convention: H(t) = exp(-i t (XX+YY)/4)
    assert!(phase_distance(&lowered(GateKind::H(FRAC_PI_2)), &xx_yy_exp(FRAC_PI_2 / 2.0)) < 1e-10);
}

#[test]
fn fswap_lowering_shape() {
    let g = decompose(&Gate::two(GateKind::Fswap, 0, 1));
    let kinds: Vec<GateKind> = g.iter().map(|g| g.kind).collect();
    assert_eq!(&kinds[..2], &[GateKind::SqrtISwap, GateKind::SqrtISwap]);
    assert!(kinds[2..].iter().all(|k| matches!(k, GateKind::Rz(a) if (a + FRAC_PI_2).abs() < 1e-15)));
    assert_eq!(kinds.len(), 4);
    assert!(phase_distance(&lowered(GateKind::Fswap), &two_qubit(&[GateKind::Fswap])) < 1e-12);
}

#[test]
fn merged_gates_lower_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let t = rng.random_range(-2.0 * PI..2.0 * PI);
        for k in [GateKind::HFswap(t), GateKind::BH(t)] {
            let n = decompose(&Gate::two(k, 0, 1)).iter().filter(|g| g.kind == GateKind::SqrtISwap).count();
            assert_eq!(n, 2);
            assert!(phase_distance(&lowered(k), &two_qubit(&[k])) < 1e-10);
        }
    }
}

#[test]
fn fswap_on_basis_states() {
    let mut s = StateVector::basis(2, 0b10).unwrap(); // q1 set: |q0 q1> = |01>
    s.apply_gate(&Gate::two(GateKind::Fswap, 0, 1)).unwrap();
    assert!((s.amplitudes()[0b01] - c(1.0, 0.0)).norm() < 1e-15);
    let mut s = StateVector::basis(2, 0b11).unwrap();
    s.apply_gate(&Gate::two(GateKind::Fswap, 0, 1)).unwrap();
    assert!((s.amplitudes()[0b11] + c(1.0, 0.0)).norm() < 1e-15);
}

fn embed(u: &[[C64; 4]; 4], q0: usize, q1: usize, n: usize) -> DMatrix<C64> {
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |i, j| {
        let rest = !((1 << q0) | (1 << q1));
        if i & rest != j & rest {
            return c(0.0, 0.0);
        }
        let sub = |x: usize| 2 * ((x >> q0) & 1) + ((x >> q1) & 1);
        u[sub(i)][sub(j)]
    })
}

fn embed1(u: &[[C64; 2]; 2], q: usize, n: usize) -> DMatrix<C64> {
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |i, j| {
        if i & !(1 << q) != j & !(1 << q) {
            return c(0.0, 0.0);
        }
        u[(i >> q) & 1][(j >> q) & 1]
    })
}

#[test]
fn random_circuit_matches_dense_product() {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut circ = Circuit::new(n);
    let mut oracle = identity(1 << n);
    for _ in 0..40 {
        let q0 = rng.random_range(0..n);
        let mut q1 = rng.random_range(0..n - 1);
        if q1 >= q0 {
            q1 += 1;
        }
        let a = rng.random_range(-PI..PI);
        let g = match rng.random_range(0..6) {
            0 => Gate::two(GateKind::G(a), q0, q1),
            1 => Gate::two(GateKind::H(a), q0, q1),
            2 => Gate::two(GateKind::O(a), q0, q1),
            3 => Gate::two(GateKind::Fswap, q0, q1),
            4 => Gate::one(GateKind::Rx(a), q0),
            _ => Gate::one(GateKind::Rz(a), q0),
        };
        let m = match gate_unitary(&g.kind) {
            Unitary::Two(u) => embed(&u, q0, q1, n),
            Unitary::One(u) => embed1(&u, q0, n),
        };
        oracle = m * oracle;
        circ.push(vec![g]);
    }
    let got = dense_unitary(&circ).unwrap();
    assert!(maxdiff(&got, &oracle) < 1e-10);
}

#[test]
fn givens_network_sizes() {
    let l = LatticeSpec::new(1, 4, 0.0).unwrap();
    let count = |nu, nd| {
        let a = Ansatz::new(l, SectorSpec::new(&l, nu, nd).unwrap(), Layout::Rectangle, 0);
        a.prep().gates().filter(|g| matches!(g.kind, GateKind::G(_))).count()
    };
    assert_eq!(count(0, 0), 0);
    assert_eq!(count(2, 0), 4);
    assert_eq!(count(2, 2), 8);
}

#[test]
fn prep_energy_matches_open_chain_spectrum() {
    let a = ansatz(1, 8, 0.0, 8, Layout::Zigzag, 0);
    let e = AnsatzEvaluator::new(a).energy(&[]).unwrap();
    let want: f64 = 2.0 * (1..=4).map(|k| -2.0 * (k as f64 * PI / 9.0).cos()).sum::<f64>();
    assert!((e - want).abs() < 1e-10, "{e} vs {want}");
}

#[test]
fn zero_params_reduce_to_prep() {
    for layout in [Layout::Rectangle, Layout::Zigzag] {
        let a = ansatz(1, 4, 4.0, 4, layout, 2);
        let u = dense_unitary(&a.circuit(&vec![0.0; a.n_params()]).unwrap()).unwrap();
        let p = dense_unitary(&a.prep()).unwrap();
        assert!(phase_distance(&u, &p) < 1e-10);
    }
}

#[test]
fn measurement_circuit_counts() {
    let p = [0.3, 0.2, 0.1];
    assert_eq!(ansatz(1, 8, 4.0, 8, Layout::Zigzag, 1).measurement_circuits(&p).unwrap().len(), 3);
    let groups: Vec<MeasGroup> = ansatz(2, 4, 4.0, 8, Layout::Zigzag, 1)
        .measurement_circuits(&[0.3, 0.2, 0.1, 0.1])
        .unwrap()
        .iter()
        .map(|m| m.group)
        .collect();
    assert_eq!(groups.len(), 4);
    assert_eq!(groups[0], MeasGroup::Onsite);
}

#[test]
fn groups_sum_to_hamiltonian_expectation() {
    let a = ansatz(1, 4, 4.0, 3, Layout::Zigzag, 1);
    let p = [0.7, -0.4, 0.9];
    let state = simulate(&a.circuit(&p).unwrap()).unwrap();
    let h = exact_qubit_hamiltonian(&a.lattice, &a.layout);
    let exact = state.expectation(&h);
    let ev = AnsatzEvaluator::new(a.clone()).energy(&p).unwrap();
    assert!((exact - ev).abs() < 1e-9);
    // sum over group circuits of the exact readout expectation
    let mut total = 0.0;
    for m in a.measurement_circuits(&p).unwrap() {
        let s = simulate(&m.circuit).unwrap();
        total += s
            .probabilities()
            .iter()
            .enumerate()
            .map(|(b, pr)| pr * m.readout.energy(b as u32))
            .sum::<f64>();
    }
    assert!((total - exact).abs() < 1e-9, "{total} vs {exact}");
}

#[test]
fn spin_echo_keeps_energy() {
    let a = ansatz(1, 4, 4.0, 4, Layout::Rectangle, 1);
    let c0 = a.circuit(&[0.5, 0.3, -0.2]).unwrap().to_native();
    let c1 = apply_spin_echo(&c0).unwrap();
    let ev = AnsatzEvaluator::new(a);
    let e0 = ev.energy_of(&simulate(&c0).unwrap());
    let e1 = ev.energy_of(&simulate(&c1).unwrap());
    assert!((e0 - e1).abs() < 1e-9);
    assert_eq!(apply_spin_echo(&Circuit::new(3)).unwrap(), Circuit::new(3));
}

#[test]
fn dimer_prep_energy() {
    let a = ansatz(1, 2, 4.0, 2, Layout::Rectangle, 0);
    let e = AnsatzEvaluator::new(a).energy(&[]).unwrap();
    // U=0 dimer ground state has <n_up n_down> = 1/4 per site
    assert!((e - (-2.0 + 4.0 * 0.5)).abs() < 1e-12);
}

#[test]
fn sampling_basics() {
    let s = StateVector::basis(5, 0b10110).unwrap();
    assert!(sample(&s, 100, 1).bits.iter().all(|&b| b == 0b10110));
    let mut plus = StateVector::zero(1).unwrap();
    plus.apply_gate(&Gate::one(GateKind::Rx(FRAC_PI_2), 0)).unwrap();
    let n = 100_000;
    let ones = sample(&plus, n, 2).bits.iter().filter(|&&b| b == 1).count() as f64;
    assert!((ones / n as f64 - 0.5).abs() < 5.0 * (0.25 / n as f64).sqrt());
}

#[test]
fn prep_samples_conserve_spin_numbers() {
    let a = ansatz(1, 4, 4.0, 3, Layout::Rectangle, 0);
    let b = sample(&simulate(&a.prep()).unwrap(), 5000, 3);
    for bits in b.bits {
        assert_eq!((bits & 0x0f).count_ones(), 2);
        assert_eq!((bits & 0xf0).count_ones(), 1);
    }
}

#[test]
fn zero_noise_matches_exact_sampling() {
    let a = ansatz(1, 4, 4.0, 4, Layout::Zigzag, 1);
    let c = a.circuit(&[0.4, 0.3, 0.2]).unwrap().to_native();
    let noisy = run_noisy(&c, &NoiseModel::none(), 2000, 9).unwrap();
    let exact = sample(&simulate(&c).unwrap(), 2000, 9);
    assert_eq!(noisy.bits, exact.bits);
}

#[test]
fn full_readout_flip() {
    let mut c = Circuit::new(4);
    c.push((0..4).map(|q| Gate::one(GateKind::X, q)).collect());
    let noise = NoiseModel { readout_10: 1.0, ..NoiseModel::none() };
    assert!(run_noisy(&c, &noise, 100, 1).unwrap().bits.iter().all(|&b| b == 0));
}

#[test]
fn depolarizing_lowers_retention_and_raises_energy() {
    let a = ansatz(1, 4, 4.0, 4, Layout::Rectangle, 1);
    let p = [0.4, 0.6, 0.3];
    let circuits = a.measurement_circuits(&p).unwrap();
    let noise = NoiseModel { depolarizing_2q: 0.01, ..NoiseModel::none() };
    let opts = EstimateOptions { spin_echo: false, no_postselect: true };
    let m = estimate_energy(&circuits, &a.sector, &a.layout, &noise, 50_000, 4, &opts).unwrap();
    let ps = estimate_energy(&circuits, &a.sector, &a.layout, &noise, 50_000, 4, &EstimateOptions::default()).unwrap();
    let exact = AnsatzEvaluator::new(a).energy(&p).unwrap();
    assert!(ps.groups.iter().all(|g| g.retention < 1.0));
    assert!(m.energy.value > exact + 3.0 * m.energy.stderr);
}

#[test]
fn noiseless_estimates_are_unbiased() {
    let a = ansatz(1, 8, 4.0, 8, Layout::Zigzag, 1);
    let p = [0.681, 0.677, 0.463];
    let circuits = a.measurement_circuits(&p).unwrap();
    let m = estimate_energy(&circuits, &a.sector, &a.layout, &NoiseModel::none(), 100_000, 5, &EstimateOptions::default())
        .unwrap();
    assert!((m.energy.value + 3.478).abs() < 3.0 * m.energy.stderr + 1e-3, "{:?}", m.energy);

    let a = ansatz(1, 4, 4.0, 3, Layout::Rectangle, 1);
    let ev = AnsatzEvaluator::new(a.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..20 {
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-PI..PI)).collect();
        let circuits = a.measurement_circuits(&p).unwrap();
        let m = estimate_energy(&circuits, &a.sector, &a.layout, &NoiseModel::none(), 4000, k, &EstimateOptions::default())
            .unwrap();
        let e = ev.energy(&p).unwrap();
        assert!((m.energy.value - e).abs() < 5.0 * m.energy.stderr, "{} vs {e}", m.energy.value);
    }
}

#[test]
fn zero_interaction_prep_is_eigenstate() {
    let a = ansatz(1, 6, 0.0, 6, Layout::Zigzag, 1);
    let circuits = a.measurement_circuits(&[0.0, 0.0, 0.0]).unwrap();
    let m = estimate_energy(&circuits, &a.sector, &a.layout, &NoiseModel::none(), 20_000, 1, &EstimateOptions::default())
        .unwrap();
    let exact = AnsatzEvaluator::new(a).energy(&[0.0, 0.0, 0.0]).unwrap();
    assert!((m.energy.value - exact).abs() < 5.0 * m.energy.stderr.max(1e-12));
}

#[test]
fn text_format_round_trips_native_circuits() {
    let a = ansatz(2, 2, 4.0, 3, Layout::Zigzag, 1);
    let c = a.circuit(&[0.3, -0.2, 0.1, 0.5]).unwrap().to_native();
    assert_eq!(Circuit::from_text(&c.to_text()).unwrap(), c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn circuits_preserve_norm_and_spin_numbers(params in proptest::collection::vec(-PI..PI, 6), n in 1usize..8) {
        let a = ansatz(1, 4, 4.0, n, Layout::Zigzag, 2);
        let s = simulate(&a.circuit(&params).unwrap()).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        let (nu, nd) = (a.sector.n_up as u32, a.sector.n_down as u32);
        for (i, amp) in s.amplitudes().iter().enumerate() {
            if amp.norm() > 1e-10 {
                prop_assert_eq!(((i & 0x0f).count_ones(), (i & 0xf0).count_ones()), (nu, nd));
            }
        }
    }

    #[test]
    fn noisy_runs_are_reproducible(seed in 0u64..1000) {
        let a = ansatz(1, 4, 4.0, 4, Layout::Zigzag, 1);
        let c = a.circuit(&[0.4, 0.3, 0.2]).unwrap().to_native();
        let noise = NoiseModel::preset("hardware").unwrap();
        prop_assert_eq!(run_noisy(&c, &noise, 300, seed).unwrap(), run_noisy(&c, &noise, 300, seed).unwrap());
    }
}

fn maxdiff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
