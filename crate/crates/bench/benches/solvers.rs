//! Solver micro-benchmarks: exhaustive vs secretary wall time across pool
//! sizes, plus the supporting graph and enumeration machinery.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use crowdteam_core::efficiency::{PerceptionModel, ProjectSpec};
use crowdteam_core::model::{shortest_hop_matrix, GenParams, Instance};
use crowdteam_core::solvers::{
    configuration_count, enumerate_configurations, exhaustive_solver, exploration_threshold,
    secretary_solver, CountMode, ExplorationRule, Fallback,
};

fn pool(n_workers: usize, seed: u64) -> Instance {
    Instance::generate(&GenParams {
        n_workers,
        n_skills: 5,
        edge_probability: 0.3,
        seed,
    })
    .unwrap()
}

fn bench_solvers(c: &mut Criterion) {
    let project = ProjectSpec::new(vec![0, 2, 4], [0.25; 4]).unwrap();
    let model = PerceptionModel::default();
    let mut group = c.benchmark_group("solve");
    for n_workers in [8usize, 11, 14] {
        let instance = pool(n_workers, 7);
        let total = configuration_count(n_workers, 3, CountMode::Distinct).unwrap() as u64;
        let k = exploration_threshold(total, ExplorationRule::OneOverE).unwrap();
        group.bench_with_input(
            BenchmarkId::new("exhaustive", n_workers),
            &instance,
            |b, inst| b.iter(|| exhaustive_solver(black_box(inst), &project, &model, 3).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("secretary", n_workers),
            &instance,
            |b, inst| {
                b.iter(|| {
                    secretary_solver(black_box(inst), &project, &model, 3, 11, k, Fallback::Last)
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn bench_enumeration(c: &mut Criterion) {
    let instance = pool(14, 9);
    let project = ProjectSpec::new(vec![0, 1, 2], [0.25; 4]).unwrap();
    c.bench_function("enumerate_14_choose_3", |b| {
        b.iter(|| {
            enumerate_configurations(black_box(&instance), &project)
                .unwrap()
                .count()
        })
    });
}

fn bench_hop_matrix(c: &mut Criterion) {
    let instance = pool(100, 5);
    let adjacency: Vec<Vec<bool>> = (0..100)
        .map(|i| (0..100).map(|j| instance.adjacent(i, j)).collect())
        .collect();
    c.bench_function("hop_matrix_100", |b| {
        b.iter(|| shortest_hop_matrix(black_box(&adjacency)).unwrap())
    });
}

criterion_group!(benches, bench_solvers, bench_enumeration, bench_hop_matrix);
criterion_main!(benches);
