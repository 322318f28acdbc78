use coorbit_bench::{modulation_fixture, shannon_fixture};
use coorbit_core::atoms::{analyze, build_atoms, roundtrip, synthesize};
use coorbit_core::convolve::{conv1d, twisted_conv};
use coorbit_core::discretize::j_phi_apply;
use coorbit_core::{SeminormFamily, Weight};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn bench_conv1d(c: &mut Criterion) {
    let mut group = c.benchmark_group("conv1d");
    for half_width in [16.0, 64.0, 256.0] {
        let fx = shannon_fixture(half_width, 32);
        group.throughput(Throughput::Elements(fx.signal.grid().len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(half_width), &fx, |b, fx| {
            b.iter(|| conv1d(black_box(&fx.signal), black_box(&fx.kernel)).unwrap())
        });
    }
    group.finish();
}

fn bench_twisted_conv(c: &mut Criterion) {
    let mut group = c.benchmark_group("twisted_conv");
    group.sample_size(10);
    for omega_half_width in [4.0, 8.0] {
        let k = modulation_fixture(1.0, omega_half_width);
        group.bench_with_input(BenchmarkId::from_parameter(omega_half_width), &k, |b, k| {
            b.iter(|| twisted_conv(black_box(k), black_box(k)).unwrap())
        });
    }
    group.finish();
}

fn bench_j_phi(c: &mut Criterion) {
    let mut group = c.benchmark_group("j_phi_apply");
    for half_width in [16.0, 64.0] {
        let fx = shannon_fixture(half_width, 64);
        group.bench_with_input(BenchmarkId::from_parameter(half_width), &fx, |b, fx| {
            b.iter(|| j_phi_apply(black_box(&fx.signal), &fx.pou, &fx.kernel).unwrap())
        });
    }
    group.finish();
}

fn bench_atoms(c: &mut Criterion) {
    let fx = shannon_fixture(64.0, 64);
    let atoms = build_atoms(&fx.setting, &fx.pou).unwrap();
    let family = SeminormFamily::new(vec![2.0], Weight::Const).unwrap();
    let coeffs = analyze(&fx.signal, &atoms.pou).unwrap();

    let mut group = c.benchmark_group("atoms");
    group.bench_function("build", |b| b.iter(|| build_atoms(&fx.setting, black_box(&fx.pou)).unwrap()));
    group.bench_function("analyze", |b| b.iter(|| analyze(black_box(&fx.signal), &atoms.pou).unwrap()));
    group.bench_function("synthesize", |b| b.iter(|| synthesize(black_box(&coeffs), &atoms).unwrap()));
    group.bench_function("roundtrip", |b| b.iter(|| roundtrip(black_box(&fx.signal), &atoms, &family).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_conv1d, bench_twisted_conv, bench_j_phi, bench_atoms);
criterion_main!(benches);
