//! Sequential vs rayon execution of the data-parallel hot paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fhvqe::circuits::Ansatz;
use fhvqe::mitigation::monte_carlo_errorbars;
use fhvqe::model::Layout;
use fhvqe::simulator::{estimate_energy, EstimateOptions, NoiseModel};
use fhvqe::{exec, LatticeSpec, SectorSpec};

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn noisy_energy(c: &mut Criterion) {
    let lat = LatticeSpec::new(1, 6, 4.0).unwrap();
    let a = Ansatz::new(lat, SectorSpec::from_total(&lat, 6).unwrap(), Layout::Zigzag, 1);
    let circuits = a.measurement_circuits(&[0.6, 0.5, 0.4]).unwrap();
    let noise = NoiseModel::preset("hardware").unwrap();
    let mut g = c.benchmark_group("noisy_energy_1x6");
    g.sample_size(10);
    for (name, on) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(on);
            let opts = EstimateOptions::default();
            b.iter(|| estimate_energy(&circuits, &a.sector, &a.layout, &noise, 20_000, 7, &opts).unwrap());
        });
    }
    g.finish();
    exec::set_parallel(true);
}

fn errorbars(c: &mut Criterion) {
    let inputs: Vec<(f64, f64)> = (0..18).map(|i| (i as f64 * 0.1, 0.01)).collect();
    let mut g = c.benchmark_group("monte_carlo_errorbars");
    for (name, on) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(on);
            b.iter(|| monte_carlo_errorbars(&inputs, 1000, 3, |x| x.iter().sum::<f64>() / x.len() as f64));
        });
    }
    g.finish();
    exec::set_parallel(true);
}

criterion_group!(benches, noisy_energy, errorbars);
criterion_main!(benches);
