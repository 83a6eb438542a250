//! Sequential (one-thread pool) versus full rayon pool on the hot paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracvisc::dist_order::OrderWeight;
use fracvisc::fracops::IntegralWeights;
use fracvisc::grid::{GridFunction, TimeGrid};
use fracvisc::laplace::fundamental_solution;
use fracvisc::solver::{picard_solve, ForcingTerm, ProblemSpec, SolveOptions};
use rayon::{ThreadPool, ThreadPoolBuilder};

const N: usize = 800;

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        (
            "sequential",
            ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
        ),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench_integral_weights(c: &mut Criterion) {
    let grid = TimeGrid::new(2.0, N).unwrap();
    let w = IntegralWeights::from_terms(&grid, &[(1.0, 0.5), (0.5, 1.3), (2.0, 1.75)]).unwrap();
    let y = GridFunction::new(grid, grid.nodes().map(f64::sin).collect()).unwrap();
    let mut group = c.benchmark_group("integral_weights_apply");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            pool.install(|| b.iter(|| w.apply(&y).unwrap()))
        });
    }
    group.finish();
}

fn bench_fundamental_solution(c: &mut Criterion) {
    let grid = TimeGrid::new(2.0, N).unwrap();
    let phi2 = OrderWeight::atoms(&[(1.0, 0.75), (1.0, 0.25), (0.5, 0.0)]).unwrap();
    let mut group = c.benchmark_group("fundamental_solution");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            pool.install(|| b.iter(|| fundamental_solution(&phi2, &grid).unwrap()))
        });
    }
    group.finish();
}

fn bench_picard(c: &mut Criterion) {
    let grid = TimeGrid::new(0.5, N).unwrap();
    let phi1 = OrderWeight::atoms(&[(1.0, 0.5)]).unwrap();
    let phi2 = OrderWeight::atoms(&[(1.0, 0.5), (1.0, 0.0)]).unwrap();
    let p = ProblemSpec::new(
        phi1,
        phi2,
        ForcingTerm::Pendulum { amp: 0.5 },
        0.5,
        0.2,
        0.5,
        2.0,
    )
    .unwrap();
    let opts = SolveOptions {
        tol: 1e-8,
        certify: false,
        ..SolveOptions::default()
    };
    let mut group = c.benchmark_group("picard_solve");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            pool.install(|| b.iter(|| picard_solve(&p, &grid, &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_integral_weights,
    bench_fundamental_solution,
    bench_picard
);
criterion_main!(benches);
