//! Benchmarks for the relaxed solves, successive convex relaxation and the
//! enumeration oracle on seeded residential instances.

use std::hint::black_box;

use atomsched::oracle::{brute_force, DEFAULT_LIMIT};
use atomsched::{
    generate_instance, solve_relaxed, successive_convex_relaxation, ApplianceCatalog, DropSet, ObjectiveKind,
    ProblemInstance, ScrConfig, SolverSettings,
};
use criterion::{BenchmarkId, Criterion};

const KINDS: [ObjectiveKind; 2] = [ObjectiveKind::Cost, ObjectiveKind::Par];

fn instance(n: usize, seed: u64) -> ProblemInstance {
    generate_instance(n, seed, &ApplianceCatalog::residential()).expect("catalog instance")
}

pub fn relaxed(c: &mut Criterion) {
    let mut group = c.benchmark_group("relaxed");
    for n in [5, 10, 20, 50] {
        let inst = instance(n, 1);
        for kind in KINDS {
            group.bench_with_input(BenchmarkId::new(kind.to_string(), n), &inst, |b, inst| {
                b.iter(|| solve_relaxed(black_box(inst), kind, &DropSet::new(), &SolverSettings::default()).unwrap())
            });
        }
    }
    group.finish();
}

pub fn scr(c: &mut Criterion) {
    let mut group = c.benchmark_group("scr");
    group.sample_size(10);
    for n in [5, 10, 20] {
        let inst = instance(n, 2);
        for n_d in [1, 10] {
            let config = ScrConfig::default().with_n_d(n_d);
            group.bench_with_input(BenchmarkId::new(format!("cost/n_d={n_d}"), n), &inst, |b, inst| {
                b.iter(|| successive_convex_relaxation(black_box(inst), ObjectiveKind::Cost, &config).unwrap())
            });
        }
    }
    group.finish();
}

pub fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for n in [3, 4] {
        let inst = instance(n, 3);
        for kind in KINDS {
            group.bench_with_input(BenchmarkId::new(kind.to_string(), n), &inst, |b, inst| {
                b.iter(|| brute_force(black_box(inst), kind, DEFAULT_LIMIT).unwrap())
            });
        }
    }
    group.finish();
}
