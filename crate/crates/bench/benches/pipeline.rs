use criterion::{Criterion, criterion_group, criterion_main};
use std::hint::black_box;

use tubecut_bench::{body325, fit_grid};
use tubecut_core::algebra::{FitTarget, fit_weighted};
use tubecut_core::body::Side;
use tubecut_core::certify::{measure_grid, triples};
use tubecut_core::monodromy::{LeafSet, LoopSpec, transport_leaf};

fn bench_fit(c: &mut Criterion) {
    let spec = body325();
    let points = fit_grid(&spec);
    let measured = measure_grid(&spec, &points, Side::Geq, 1e-8).expect("grid measures");
    let samples = triples(&measured);
    let mut group = c.benchmark_group("fit_weighted");
    group.bench_function(format!("s_{}pts_deg4x3", samples.len()), |b| {
        b.iter(|| fit_weighted(FitTarget::S, &spec, black_box(&samples), 4, 3).unwrap())
    });
    group.bench_function(format!("s_{}pts_deg8x8", samples.len()), |b| {
        b.iter(|| fit_weighted(FitTarget::S, &spec, black_box(&samples), 8, 8).unwrap())
    });
    group.finish();
}

fn bench_grid_measure(c: &mut Criterion) {
    let spec = body325();
    let points = fit_grid(&spec);
    c.bench_function(format!("measure_grid_{}pts_tol1e-6", points.len()).as_str(), |b| {
        b.iter(|| measure_grid(&spec, black_box(&points), Side::Geq, 1e-6).unwrap())
    });
}

fn bench_monodromy(c: &mut Criterion) {
    let leaf: LeafSet = "L-,R-".parse().unwrap();
    c.bench_function("transport_leaf", |b| {
        b.iter(|| transport_leaf(black_box(leaf), LoopSpec { lk3: 5, lk4: -3 }))
    });
}

criterion_group!(benches, bench_fit, bench_grid_measure, bench_monodromy);
criterion_main!(benches);
