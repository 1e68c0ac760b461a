use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use qroc_bench::{dense_state, lossy_pair, qutrit_pair};
use qroc_core::bounds::{bound_curve, uniform_grid, BoundSpec};
use qroc_core::exact::{default_p_grid, roc_curve_exact};
use qroc_core::gaussian::{gaussian_qs_evaluator, gaussian_to_fock};
use qroc_core::states::{chernoff_s_star, overlap_decomposition};
use qroc_core::{GaussianState, QsEvaluator};

fn exact_curves(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_curve");
    let (q1, q2) = qutrit_pair();
    let grid = default_p_grid(512);
    group.bench_function("qutrit", |b| b.iter(|| roc_curve_exact(black_box(&q1), &q2, &grid, None).unwrap()));
    for dim in [8, 32] {
        let (r1, r2) = (dense_state(dim, 0.1), dense_state(dim, 2.3));
        group.bench_with_input(BenchmarkId::new("dense", dim), &dim, |b, _| {
            b.iter(|| roc_curve_exact(black_box(&r1), &r2, &grid, None).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let (r1, r2) = (dense_state(16, 0.4), dense_state(16, 1.9));
    let d = overlap_decomposition(&r1, &r2).unwrap();
    let grid = uniform_grid(257);
    c.bench_function("oaqcb_curve/dense16", |b| {
        b.iter(|| bound_curve(&BoundSpec::Oaqcb { qs: black_box(&d) }, &grid).unwrap())
    });
    c.bench_function("chernoff/dense16", |b| b.iter(|| chernoff_s_star(black_box(&d))));
}

fn gaussian(c: &mut Criterion) {
    let (g1, g2) = lossy_pair();
    let qs = gaussian_qs_evaluator(&g1, &g2).unwrap();
    c.bench_function("gaussian/evaluator", |b| b.iter(|| gaussian_qs_evaluator(black_box(&g1), &g2).unwrap()));
    c.bench_function("gaussian/q_s", |b| b.iter(|| qs.value(black_box(0.37))));
    let mut group = c.benchmark_group("fock");
    group.sample_size(10);
    let single = GaussianState::new(vec![0.3, -0.2], DMatrix::from_row_slice(2, 2, &[1.1, 0.2, 0.2, 0.7])).unwrap();
    group.bench_function("single_mode_cutoff40", |b| b.iter(|| gaussian_to_fock(black_box(&single), 40).unwrap()));
    group.finish();
}

criterion_group!(benches, exact_curves, bounds, gaussian);
criterion_main!(benches);
