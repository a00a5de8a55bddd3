//! Parallel vs sequential throughput of the Monte Carlo estimator and the
//! contour quadrature.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sbrsma_core::analysis::{sop_closed_form, xi_foxh, XiPath};
use sbrsma_core::beamforming::GcStrategy;
use sbrsma_core::exec::Execution;
use sbrsma_core::foxh::ContourSettings;
use sbrsma_core::montecarlo::{estimate_sop, SimOptions};
use sbrsma_core::ScenarioConfig;
use std::hint::black_box;

fn monte_carlo(c: &mut Criterion) {
    let cfg = ScenarioConfig::default().with_psi_db(15.0);
    let trials = 100_000u64;
    let mut group = c.benchmark_group("estimate_sop");
    group.sample_size(10).throughput(Throughput::Elements(trials));
    for execution in [Execution::Sequential, Execution::Parallel] {
        let opts = SimOptions { execution, ..Default::default() };
        for strategy in [GcStrategy::Rcs, GcStrategy::Ccs] {
            group.bench_with_input(BenchmarkId::new(format!("{execution:?}"), strategy), &strategy, |b, &s| {
                b.iter(|| estimate_sop(black_box(&cfg), s, trials, 1, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn contour(c: &mut Criterion) {
    let mut group = c.benchmark_group("foxh_bivariate");
    group.sample_size(10);
    for execution in [Execution::Sequential, Execution::Parallel] {
        let cs = ContourSettings { execution, ..Default::default() };
        group.bench_function(BenchmarkId::new(format!("{execution:?}"), "xi(3,3,0)"), |b| {
            b.iter(|| xi_foxh(3, 3, 0, black_box(0.003), 0.03, 0.75, &cs).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("sop_closed_form");
    group.sample_size(10);
    let cfg = ScenarioConfig::default().with_psi_db(20.0);
    group.bench_function("quadrature", |b| {
        b.iter(|| sop_closed_form(black_box(&cfg), XiPath::Quadrature, &ContourSettings::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, monte_carlo, contour);
criterion_main!(benches);
