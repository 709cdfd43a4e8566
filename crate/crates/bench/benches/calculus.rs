use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parcalc::{levelize, metrics, schedule, SchedulerKind};
use parcalc_bench::full_reduction;
use std::hint::black_box;

fn bench_levelize(c: &mut Criterion) {
    let mut group = c.benchmark_group("levelize");
    for n in [64u64, 256, 1024] {
        let a = full_reduction(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), a.dag(), |b, dag| {
            b.iter(|| levelize(black_box(dag)))
        });
    }
    group.finish();
}

fn bench_schedulers(c: &mut Criterion) {
    let a = full_reduction(1024);
    let mut group = c.benchmark_group("schedule_1024");
    for kind in [SchedulerKind::Level, SchedulerKind::Greedy] {
        for p in [8usize, 64] {
            group.bench_function(format!("{}/P={p}", kind.name()), |b| {
                b.iter(|| schedule(black_box(&a), kind, Some(p)).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_report(c: &mut Criterion) {
    let a = full_reduction(1024);
    let m = schedule(&a, SchedulerKind::Level, Some(64)).unwrap();
    c.bench_function("report_1024_P64", |b| b.iter(|| metrics::report(black_box(&m)).unwrap()));
}

fn bench_generate(c: &mut Criterion) {
    c.bench_function("generate_reduction_1024", |b| {
        b.iter(|| parcalc::generate_reduction(black_box(1024)).unwrap())
    });
}

criterion_group!(benches, bench_levelize, bench_schedulers, bench_report, bench_generate);
criterion_main!(benches);
