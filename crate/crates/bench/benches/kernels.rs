use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpnl_core::fock::enumerate_basis;
use gpnl_core::gaussian::{apply_interferometer, cutoff_for_squeezings, haar_unitary, prepare_psi_in};
use gpnl_core::gbs::hafnian;
use gpnl_core::reduction::amplitude_series;
use gpnl_core::{GbsInstance, Gpnl1Instance, SymmetricComplexMatrix};

fn bench_hafnian(c: &mut Criterion) {
    let mut group = c.benchmark_group("hafnian");
    for n in [4usize, 8, 12] {
        let u = haar_unitary(n, 7);
        let a = SymmetricComplexMatrix::new(&u * u.transpose()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| hafnian(black_box(a)).unwrap()));
    }
    group.finish();
}

fn bench_interferometer(c: &mut Criterion) {
    let mut group = c.benchmark_group("interferometer");
    group.sample_size(20);
    for tail in [1e-4, 1e-8] {
        let cutoff = cutoff_for_squeezings(&[0.4; 3], tail);
        let basis = enumerate_basis(4, cutoff).unwrap();
        let psi = prepare_psi_in(3, 0.4, &basis, tail).unwrap();
        let u = haar_unitary(4, 3);
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &psi, |b, psi| {
            b.iter(|| apply_interferometer(black_box(psi), &u).unwrap())
        });
    }
    group.finish();
}

fn bench_amplitude_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("amplitude_series");
    group.sample_size(10);
    let r = 0.4;
    let cutoff = cutoff_for_squeezings(&[r; 3], 1e-10);
    let inst = Gpnl1Instance::lemma1(GbsInstance::new(haar_unitary(4, 5), r, 3).unwrap(), 2, cutoff, true).unwrap();
    for j_max in [32usize, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(j_max), &j_max, |b, &j| {
            b.iter(|| amplitude_series(black_box(&inst), j).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, bench_hafnian, bench_interferometer, bench_amplitude_series);
criterion_main!(kernels);
