use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use motzkin_core::algebra::{check_flat_algebra, check_ptl};
use motzkin_core::bethe::solve_two_particle;
use motzkin_core::exact::q;
use motzkin_core::operators::hamiltonian;
use motzkin_core::paths::entangled_ground_states;
use motzkin_core::spectra::{dense_spectrum, sector_spectrum};
use motzkin_core::{HamiltonianSpec, SectorLabel};

fn operators(c: &mut Criterion) {
    let mut g = c.benchmark_group("hamiltonian");
    for length in [4, 6, 8] {
        let spec = HamiltonianSpec::new(length, q(1, 2)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(length), &spec, |b, s| b.iter(|| hamiltonian(black_box(s)).unwrap()));
    }
    g.finish();
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectra");
    g.sample_size(10);
    for length in [5, 6, 7] {
        g.bench_with_input(BenchmarkId::new("dense", length), &length, |b, &l| b.iter(|| dense_spectrum(l, q(0, 1)).unwrap()));
    }
    g.bench_function("sector L=9 (2,2)", |b| b.iter(|| sector_spectrum(9, SectorLabel::new(2, 2), q(0, 1)).unwrap()));
    g.finish();
}

fn algebra(c: &mut Criterion) {
    let mut g = c.benchmark_group("algebra");
    g.sample_size(10);
    g.bench_function("ptl L=5", |b| b.iter(|| check_ptl(black_box(5)).unwrap()));
    g.bench_function("flat L=4", |b| b.iter(|| check_flat_algebra(black_box(4)).unwrap()));
    g.finish();
}

fn bethe_and_paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("bethe");
    g.sample_size(10);
    for length in [8, 12] {
        g.bench_with_input(BenchmarkId::new("two-particle", length), &length, |b, &l| b.iter(|| solve_two_particle(l).unwrap()));
    }
    g.bench_function("entangled ground states L=8", |b| b.iter(|| entangled_ground_states(black_box(8)).unwrap()));
    g.finish();
}

criterion_group!(benches, operators, spectra, algebra, bethe_and_paths);
criterion_main!(benches);
