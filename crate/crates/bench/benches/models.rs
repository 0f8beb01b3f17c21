use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kerrkit::bcs::mattis_bardeen;
use kerrkit::fitting::fit_linear_trace;
use kerrkit::resonator::{solve_photon_cubic, xi_crit_magnitude};
use kerrkit::synth::{frequency_grid, synth_trace, NoiseModel};
use kerrkit::{DriveCondition, SweepDirection};
use kerrkit_bench::{device, noisy_trace};

fn cubic(c: &mut Criterion) {
    let xi = -1.5 * xi_crit_magnitude();
    c.bench_function("cubic/one_root", |b| b.iter(|| solve_photon_cubic(black_box(1.0), black_box(xi))));
    c.bench_function("cubic/three_roots", |b| b.iter(|| solve_photon_cubic(black_box(-0.8), black_box(xi))));
}

fn s21_trace(c: &mut Criterion) {
    let p = device();
    let freqs = frequency_grid(&p, 5.0, 1001);
    let power = DriveCondition::with_xi(&p, -0.3, p.f0_hz).unwrap().p_in_w;
    c.bench_function("s21/nonlinear_1001", |b| {
        b.iter(|| synth_trace(&p, black_box(&freqs), &[power], SweepDirection::Up, NoiseModel::None, 0).unwrap())
    });
}

fn conductivity(c: &mut Criterion) {
    let mut group = c.benchmark_group("mattis_bardeen");
    for t in [1.0, 4.0, 8.0] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| mattis_bardeen(black_box(t), 95e9, 13.8).unwrap())
        });
    }
    group.finish();
}

fn linear_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_linear");
    group.sample_size(20);
    for n in [401, 1601] {
        let trace = noisy_trace(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &trace, |b, t| {
            b.iter(|| fit_linear_trace(black_box(t)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cubic, s21_trace, conductivity, linear_fit);
criterion_main!(benches);
