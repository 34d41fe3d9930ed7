use fhvqe::circuits::Ansatz;
use fhvqe::mitigation::{ph_transform_stats, reflection_average};
use fhvqe::model::{build_hamiltonian, exact_qubit_hamiltonian, JwLayout, Layout, TermKind};
use fhvqe::observables::{charge_correlation, spin_correlation};
use fhvqe::reference::slater::slater_energy;
use fhvqe::reference::{
    exact_ground, exact_observables, AnsatzEvaluator, free_fermion_energy, optimal_slater, simulate_vqe_optimum, SectorBasis,
    SectorHamiltonian,
};
use fhvqe::{LatticeSpec, SectorSpec, C64};
use nalgebra::{DMatrix, SymmetricEigen};

fn lat(lx: usize, ly: usize, u: f64) -> LatticeSpec {
    LatticeSpec::new(lx, ly, u).unwrap()
}

fn dimer(u: f64) -> f64 {
    (u - (u * u + 16.0).sqrt()) / 2.0
}

#[test]
fn term_counts_for_small_lattices() {
    let count = |l: &LatticeSpec| {
        let t = build_hamiltonian(l);
        let hop = t.iter().filter(|t| matches!(t.kind, TermKind::Hopping { .. })).count();
        (hop, t.len() - hop)
    };
    assert_eq!(count(&lat(1, 2, 4.0)), (2, 2));
    assert_eq!(count(&lat(1, 8, 4.0)), (14, 8));
    assert_eq!(count(&lat(2, 4, 4.0)), (20, 8));
}

#[test]
fn dimer_ground_energy_dense_and_sparse() {
    let l = lat(1, 2, 4.0);
    let layout = JwLayout::new(&l, Layout::Rectangle);
    let h = exact_qubit_hamiltonian(&l, &layout).to_dense(4);
    assert!(h.iter().all(|z| z.im.abs() < 1e-12));
    // the global minimum of the 16x16 matrix is the one-particle state (-1);
    // the dimer value lives in the (1,1) block
    let herm = DMatrix::from_fn(16, 16, |i, j| h[(i, j)].re);
    assert!((SymmetricEigen::new(herm).eigenvalues.min() + 1.0).abs() < 1e-10);
    let idx: Vec<usize> = (0..16).filter(|i| i & 3 != 0 && i & 3 != 3 && i & 12 != 0 && i & 12 != 12).collect();
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])].re);
    let e0 = SymmetricEigen::new(block).eigenvalues.min();
    assert!((e0 - dimer(4.0)).abs() < 1e-10);
    assert!((e0 - (2.0 - 8f64.sqrt())).abs() < 1e-10);
    let g = exact_ground(&l, &SectorSpec::new(&l, 1, 1).unwrap()).unwrap();
    assert!((g.energy - dimer(4.0)).abs() < 1e-9);
}

#[test]
fn qubit_hamiltonian_commutes_with_spin_numbers() {
    let l = lat(1, 3, 2.5);
    let layout = JwLayout::new(&l, Layout::Zigzag);
    let h = exact_qubit_hamiltonian(&l, &layout).to_dense(6);
    let nup = |i: usize| (i & 0b000111).count_ones();
    let ndn = |i: usize| (i & 0b111000).count_ones();
    for i in 0..64 {
        for j in 0..64 {
            if h[(i, j)].norm() > 1e-12 {
                assert_eq!((nup(i), ndn(i)), (nup(j), ndn(j)));
            }
        }
    }
}

#[test]
fn vacuum_and_free_fermions() {
    for (lx, ly) in [(1, 4), (2, 3)] {
        let l = lat(lx, ly, 3.0);
        assert_eq!(exact_ground(&l, &SectorSpec::new(&l, 0, 0).unwrap()).unwrap().energy, 0.0);
        let l0 = lat(lx, ly, 0.0);
        let eig = SymmetricEigen::new(l0.hopping_matrix()).eigenvalues;
        let mut e: Vec<f64> = eig.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = SectorSpec::new(&l0, 2, 1).unwrap();
        let want = e[0] + e[1] + e[0];
        assert!((exact_ground(&l0, &s).unwrap().energy - want).abs() < 1e-9);
        assert!((free_fermion_energy(&l0, &s) - want).abs() < 1e-12);
    }
}

#[test]
fn dense_and_lanczos_agree() {
    let l = lat(2, 3, 5.0);
    let s = SectorSpec::new(&l, 2, 2).unwrap();
    let b = SectorBasis::new(&l, &s).unwrap();
    let dense = SectorHamiltonian::new(&b).to_dense();
    assert!((&dense - dense.transpose()).amax() < 1e-12);
    let e = SymmetricEigen::new(dense).eigenvalues.min();
    assert!((exact_ground(&l, &s).unwrap().energy - e).abs() < 1e-9);
}

#[test]
fn half_filling_observables() {
    let l = lat(1, 6, 4.0);
    let s = exact_observables(&exact_ground(&l, &SectorSpec::from_total(&l, 6).unwrap()).unwrap());
    for m in s.n_up.iter().chain(&s.n_down) {
        assert!((m.mean - 0.5).abs() < 1e-9);
    }
    assert!((charge_correlation(&s, 0).unwrap() - 1.0).abs() < 1e-12);
    // reflection symmetry of the spin correlation
    for i in 0..6 {
        for j in 0..6 {
            assert!((spin_correlation(&s, i, j) - spin_correlation(&s, 5 - i, 5 - j)).abs() < 1e-9);
        }
    }
    let d = s.densities();
    let r = reflection_average(&d, &l);
    assert!(d.iter().zip(&r).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn particle_hole_maps_observables_between_sectors() {
    let l = lat(1, 4, 3.0);
    for (nu, nd) in [(1, 1), (1, 0), (3, 2)] {
        let a = exact_observables(&exact_ground(&l, &SectorSpec::new(&l, nu, nd).unwrap()).unwrap());
        let b = exact_observables(&exact_ground(&l, &SectorSpec::new(&l, 4 - nu, 4 - nd).unwrap()).unwrap());
        let t = ph_transform_stats(&a, false);
        for (x, y) in t.densities().iter().zip(b.densities()) {
            assert!((x - y).abs() < 1e-9, "{nu},{nd}: {x} vs {y}");
        }
        for (x, y) in t.spins().iter().zip(b.spins()) {
            assert!((x - y).abs() < 1e-9);
        }
    }
    // vacuum <-> completely filled
    let full = exact_ground(&l, &SectorSpec::new(&l, 4, 4).unwrap()).unwrap().energy;
    assert!((full - 3.0 * 4.0).abs() < 1e-12);
}

#[test]
fn slater_bounds() {
    let l0 = lat(1, 4, 0.0);
    let s0 = SectorSpec::new(&l0, 2, 2).unwrap();
    let e0 = optimal_slater(&l0, &s0, 2, 1);
    assert!((e0 - exact_ground(&l0, &s0).unwrap().energy).abs() < 1e-8);

    for (lx, ly, n) in [(1, 4, 4), (1, 4, 3), (2, 2, 2)] {
        let l = lat(lx, ly, 4.0);
        let s = SectorSpec::from_total(&l, n).unwrap();
        let exact = exact_ground(&l, &s).unwrap().energy;
        let best = optimal_slater(&l, &s, 2, 5);
        let t = l.hopping_matrix().map(|x| C64::new(x, 0.0));
        let u0 = slater_energy(&t, &l, &s);
        assert!(exact <= best + 1e-9 && best <= u0 + 1e-9, "{exact} {best} {u0}");
    }
}

#[test]
fn slater_gap_at_half_filling_1x8() {
    let l = lat(1, 8, 4.0);
    let s = SectorSpec::from_total(&l, 8).unwrap();
    let gap = optimal_slater(&l, &s, 2, 3) - exact_ground(&l, &s).unwrap().energy;
    assert!(gap > 0.1, "gap {gap}");
}

#[test]
fn noninteracting_ansatz_is_exact_at_zero_params() {
    let l = lat(1, 6, 0.0);
    let s = SectorSpec::from_total(&l, 6).unwrap();
    let exact = exact_ground(&l, &s).unwrap().energy;
    for layers in [0, 1, 2] {
        let a = Ansatz::new(l, s, Layout::Zigzag, layers);
        let e = AnsatzEvaluator::new(a.clone()).energy(&vec![0.0; a.n_params()]).unwrap();
        assert!((e - exact).abs() < 1e-9, "layers {layers}: {e} vs {exact}");
    }
    let a = Ansatz::new(l, s, Layout::Zigzag, 1);
    assert!((simulate_vqe_optimum(&a, 1, 0).unwrap().energy - exact).abs() < 1e-8);
}
