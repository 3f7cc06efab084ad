use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gonal_bench::hard_vectors;
use gonal_core::{repr_extend, repr_set, run_escalation, truant, CoeffVector};

fn extend(c: &mut Criterion) {
    let mut group = c.benchmark_group("repr_extend");
    for bound in [10_000u64, 1_000_000] {
        let base = repr_set(5, &CoeffVector::single(1).unwrap(), bound).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &bound| {
            b.iter(|| repr_extend(black_box(&base), 5, 2, bound).unwrap())
        });
    }
    group.finish();
}

fn full_sets(c: &mut Criterion) {
    let mut group = c.benchmark_group("repr_set_1e6");
    group.sample_size(10);
    for (m, v) in hard_vectors() {
        group.bench_function(format!("m{m}/{v}"), |b| {
            b.iter(|| repr_set(m, black_box(&v), 1_000_000).unwrap())
        });
    }
    group.finish();
}

fn truants(c: &mut Criterion) {
    let mut group = c.benchmark_group("truant_1e6");
    group.sample_size(10);
    for (m, v) in hard_vectors() {
        group.bench_function(format!("m{m}/{v}"), |b| {
            b.iter(|| truant(m, 1, black_box(&v), 1_000_000).unwrap())
        });
    }
    group.finish();
}

fn escalation(c: &mut Criterion) {
    let mut group = c.benchmark_group("escalation");
    group.sample_size(10);
    for (m, n) in [(3, 1), (4, 1), (5, 2)] {
        group.bench_function(format!("m{m}-n{n}-b1e4"), |b| {
            b.iter(|| run_escalation(m, n, 10_000, 24).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, extend, full_sets, truants, escalation);
criterion_main!(benches);
