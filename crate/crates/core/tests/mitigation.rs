use fhvqe::circuits::Ansatz;
use fhvqe::mitigation::tflo::{flo_candidates, spread_select, tflo_correct_observable, TfloPath};
use fhvqe::mitigation::{
    choose_flo_points, monte_carlo_errorbars, ph_average, postselect, reflection_average, select_run, tflo_energy, theil_sen,
    time_reversal_average, TfloTrainingSet, TrainingPoint,
};
use fhvqe::model::{JwLayout, Layout};
use fhvqe::observables::{ObservableEstimate, Stage};
use fhvqe::reference::AnsatzEvaluator;
use fhvqe::simulator::{estimate_energy, simulate, sample, EstimateOptions, NoiseModel};
use fhvqe::{Error, LatticeSpec, SectorSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn lat(lx: usize, ly: usize) -> LatticeSpec {
    LatticeSpec::new(lx, ly, 4.0).unwrap()
}

#[test]
fn postselection_extremes() {
    let l = lat(1, 4);
    let a = Ansatz::new(l, SectorSpec::from_total(&l, 4).unwrap(), Layout::Rectangle, 1);
    let layout = JwLayout::new(&l, Layout::Rectangle);
    let clean = sample(&simulate(&a.circuit(&[0.3, 0.2, 0.1]).unwrap()).unwrap(), 2000, 1);
    let (kept, p) = postselect(&clean, &a.sector, &layout).unwrap();
    assert_eq!(p, 1.0);
    assert_eq!(kept, clean);

    let mut flipped = clean.clone();
    for b in &mut flipped.bits {
        *b ^= 1;
    }
    assert!(matches!(postselect(&flipped, &a.sector, &layout), Err(Error::EmptyPostselection { .. })));
}

#[test]
fn readout_noise_retention_is_partial() {
    let l = lat(1, 8);
    let a = Ansatz::new(l, SectorSpec::from_total(&l, 8).unwrap(), Layout::Zigzag, 1);
    let circuits = a.measurement_circuits(&[0.681, 0.677, 0.463]).unwrap();
    let noise = NoiseModel::preset("readout").unwrap();
    let m = estimate_energy(&circuits, &a.sector, &a.layout, &noise, 50_000, 2, &EstimateOptions::default()).unwrap();
    for g in &m.groups {
        assert!(g.retention > 0.0 && g.retention < 1.0, "{}", g.retention);
    }
}

#[test]
fn time_reversal_cancels_angle_bias() {
    let l = lat(1, 4);
    let a = Ansatz::new(l, SectorSpec::from_total(&l, 4).unwrap(), Layout::Rectangle, 1);
    let ev = AnsatzEvaluator::new(a.clone());
    let noise = NoiseModel { angle_bias: 0.05, ..NoiseModel::none() };
    let mut better = 0;
    for seed in 0..10u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        let m: Vec<f64> = p.iter().map(|x| -x).collect();
        let est = |q: &[f64], s| {
            let c = a.measurement_circuits(q).unwrap();
            let e = estimate_energy(&c, &a.sector, &a.layout, &noise, 100_000, s, &EstimateOptions::default()).unwrap();
            ObservableEstimate::energy(e.energy.value, e.energy.stderr)
        };
        let (ep, em) = (est(&p, 2 * seed), est(&m, 2 * seed + 1));
        let avg = time_reversal_average(&ep, &em);
        let exact = ev.energy(&p).unwrap();
        let err = (avg.value - exact).abs();
        if err < (ep.value - exact).abs() && err < (em.value - exact).abs() {
            better += 1;
        }
    }
    assert!(better >= 8, "{better}/10");
}

#[test]
fn time_reversal_of_identical_inputs() {
    let e = ObservableEstimate::energy(-1.5, 0.02);
    let t = time_reversal_average(&e, &e);
    assert_eq!(t.value, -1.5);
    assert!((t.stderr - 0.02 / 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(t.last_stage(), Stage::Symmetrized);
}

#[test]
fn particle_hole_average_halves_variance() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let n = 20_000;
    let (mut raw, mut avg) = (Vec::new(), Vec::new());
    for _ in 0..n {
        let a: f64 = 1.0 + 0.1 * r.sample::<f64, _>(rand_distr::StandardNormal);
        let b: f64 = 1.0 + 0.1 * r.sample::<f64, _>(rand_distr::StandardNormal);
        raw.push(a);
        avg.push(ph_average(&ObservableEstimate::energy(a, 0.1), &ObservableEstimate::energy(b, 0.1)).value);
    }
    let var = |x: &[f64]| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
    };
    let ratio = var(&avg) / var(&raw);
    assert!((ratio - 0.5).abs() < 0.03, "{ratio}");
    let e = ObservableEstimate::energy(2.0, 0.1);
    assert!((ph_average(&e, &e).stderr - 0.1 / 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn reflection_average_examples() {
    let l = lat(1, 8);
    let mut d = vec![0.0; 8];
    d[0] = 1.0;
    let r = reflection_average(&d, &l);
    assert_eq!(r[0], 0.5);
    assert_eq!(r[7], 0.5);
    assert_eq!(reflection_average(&r, &l), r);
    let l2 = lat(2, 4);
    let v: Vec<f64> = (0..8).map(|i| i as f64).collect();
    let once = reflection_average(&v, &l2);
    assert!(once.iter().all(|x| (x - 3.5).abs() < 1e-12));
}

#[test]
fn run_selection() {
    assert_eq!(select_run(&[1.0]), 0);
    assert_eq!(select_run(&[2.0, 2.0, 2.0]), 0);
    assert_eq!(select_run(&[-1.0, -3.0, -3.0, -2.0]), 1);
}

#[test]
fn theil_sen_examples() {
    assert_eq!(theil_sen(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap(), (2.0, 1.0));
    let (s, _) = theil_sen(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.0, 1.0, 2.0, 3.0, 40.0]).unwrap();
    assert_eq!(s, 1.0);
    let (s, i) = theil_sen(&[1.0, 3.0], &[2.0, 3.0]).unwrap();
    assert!((s - 0.5).abs() < 1e-15 && (i - 1.5).abs() < 1e-15);
    assert!(theil_sen(&[1.0, 1.0], &[0.0, 2.0]).is_err());
}

#[test]
fn flo_candidate_grids() {
    assert_eq!(flo_candidates(3, 1, 0).len(), 256);
    assert_eq!(flo_candidates(4, 1, 0).len(), 4096);
    let deep = flo_candidates(3, 2, 0);
    assert_eq!(deep.len(), 256);
    assert!(deep.iter().all(|p| p[0] == 0.0 && p[3] == 0.0 && p[1] != 0.0));
}

#[test]
fn chosen_flo_points_are_spread() {
    let l = lat(1, 8);
    let a = Ansatz::new(l, SectorSpec::from_total(&l, 8).unwrap(), Layout::Zigzag, 1);
    let ev = AnsatzEvaluator::new(a);
    let sel = choose_flo_points(3, 1, 16, 0, |p| ev.energy(p)).unwrap();
    assert_eq!(sel.params.len(), 16);
    assert!(!sel.spread_collapse);
    let range = sel.exact[15] - sel.exact[0];
    let gap = sel.exact.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    assert!(gap >= range / 16.0 / 4.0, "gap {gap} range {range}");
    assert!(sel.params.iter().all(|p| p[0] == 0.0));
}

#[test]
fn spread_collapse_is_flagged() {
    let (idx, collapsed) = spread_select(&[1.0; 20], 16);
    assert!(collapsed);
    assert_eq!(idx.len(), 16);
}

fn training(map: impl Fn(f64) -> f64) -> TfloTrainingSet {
    let exact = [-4.0, -3.1, -2.5, -1.0, 0.2, 1.3];
    TfloTrainingSet {
        points: exact
            .iter()
            .map(|&e| TrainingPoint { params: vec![], exact: e, noisy: map(e), noisy_stderr: 0.01 })
            .collect(),
        closest: TrainingPoint { params: vec![], exact: -3.3, noisy: map(-3.3), noisy_stderr: 0.01 },
    }
}

#[test]
fn tflo_recovers_affine_noise() {
    let map = |e: f64| 0.7 * e - 0.4;
    let t = training(map);
    let (a, b, out) = tflo_energy(&t, &ObservableEstimate::energy(map(-3.45), 0.01), 200, 1);
    assert!((a.value + 3.45).abs() < 1e-9);
    assert!((b.value + 3.45).abs() < 1e-9);
    assert_eq!(out.path, TfloPath::Full);
    assert_eq!(b.stages, vec![Stage::Raw, Stage::Tflo, Stage::Coherent]);

    let ident = training(|e| e);
    let (_, c, _) = tflo_energy(&ident, &ObservableEstimate::energy(-2.0, 0.01), 200, 1);
    assert!((c.value + 2.0).abs() < 1e-12);
}

#[test]
fn tflo_offset_cancels_in_residual() {
    // the map is fitted on the training points, the closest point carries an extra offset
    let mut t = training(|e| 0.5 * e);
    t.closest.noisy += 0.3;
    let (_, c, _) = tflo_energy(&t, &ObservableEstimate::energy(0.5 * -3.45 + 0.3, 0.01), 100, 1);
    assert!((c.value + 3.45).abs() < 1e-9, "{}", c.value);
}

#[test]
fn tflo_without_training_passes_through() {
    let t = TfloTrainingSet { points: vec![], closest: training(|e| e).closest };
    let target = ObservableEstimate::energy(-1.0, 0.1);
    let (a, _, out) = tflo_energy(&t, &target, 100, 0);
    assert_eq!(out.path, TfloPath::NoTraining);
    assert_eq!(a.value, -1.0);
    assert!(!a.flags.is_empty());
}

#[test]
fn tflo_observable_paths() {
    let flat = [0.5, 0.5, 0.5, 0.5];
    let o = tflo_correct_observable(&flat, &[0.45, 0.46, 0.44, 0.45], (0.5, 0.45), 0.46);
    assert_eq!(o.path, TfloPath::CoherentOnly);
    assert!((o.coherent - 0.51).abs() < 1e-12);

    let ex = [0.1, 0.4, 0.7, 1.0, 1.3];
    let ny: Vec<f64> = ex.iter().map(|e| 0.8 * e + 0.05).collect();
    let o = tflo_correct_observable(&ex, &ny, (0.4, 0.8 * 0.4 + 0.05), 0.8 * 0.9 + 0.05);
    assert_eq!(o.path, TfloPath::Full);
    assert!((o.coherent - 0.9).abs() < 1e-12);

    let mut r = ChaCha8Rng::seed_from_u64(11);
    let junk: Vec<f64> = (0..5).map(|_| r.random_range(0.0..1.0)).collect();
    let o = tflo_correct_observable(&ex, &junk, (0.4, 0.3), 0.77);
    assert_eq!(o.path, TfloPath::PassThrough);
    assert!(o.r2 < 0.7);
    assert_eq!(o.coherent, 0.77);
}

#[test]
fn monte_carlo_errorbar_examples() {
    assert_eq!(monte_carlo_errorbars(&[(1.0, 0.0), (2.0, 0.0)], 1000, 0, |x| x[0] + x[1]), 0.0);
    let s = monte_carlo_errorbars(&[(1.0, 0.3)], 1000, 0, |x| x[0]);
    assert!((s - 0.3).abs() < 0.03, "{s}");
    let s = monte_carlo_errorbars(&[(1.0, 0.3), (2.0, 0.4)], 1000, 0, |x| x[0] + x[1]);
    assert!((s - 0.5).abs() < 0.05, "{s}");
}

#[test]
fn tflo_errorbars_agree_with_high_resolution_run() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let mut t = training(|e| 0.6 * e - 0.2);
    for p in &mut t.points {
        p.noisy += 0.02 * r.random_range(-1.0..1.0);
        p.noisy_stderr = 0.02;
    }
    let target = ObservableEstimate::energy(0.6 * -3.4 - 0.2, 0.02);
    let (lo, _, _) = tflo_energy(&t, &target, 1000, 3);
    let (hi, _, _) = tflo_energy(&t, &target, 100_000, 4);
    let ratio = lo.stderr / hi.stderr;
    assert!(ratio > 1.0 / 3.0 && ratio < 3.0, "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symmetrisations_are_idempotent(vals in proptest::collection::vec(-1.0f64..1.0, 8), v in -5.0f64..5.0, s in 0.0f64..1.0) {
        let l = lat(2, 4);
        let once = reflection_average(&vals, &l);
        let twice = reflection_average(&once, &l);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let e = ObservableEstimate::energy(v, s);
        let p = ph_average(&e, &e);
        prop_assert_eq!(ph_average(&p, &p).value, p.value);
    }

    #[test]
    fn tflo_exact_for_any_affine_map(slope in 0.2f64..1.5, offset in -2.0f64..2.0, target in -4.0f64..1.0) {
        let map = move |e: f64| slope * e + offset;
        let (_, c, _) = tflo_energy(&training(map), &ObservableEstimate::energy(map(target), 0.01), 10, 0);
        prop_assert!((c.value - target).abs() < 1e-9);
    }

    #[test]
    fn flo_angles_stay_on_grid(idx in 0usize..256) {
        let p = &flo_candidates(3, 1, 0)[idx];
        for &x in &p[1..] {
            let k = (x + PI) / (2.0 * PI / 16.0);
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
    }
}
