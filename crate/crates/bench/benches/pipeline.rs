use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pencil_bench::{dense, structured};
use pencil_core::oracle::toeplitz_structure;
use pencil_core::staircase::staircase_reduce;
use pencil_core::{analyze, make_shifted, AnalysisOptions, C64};

fn full_pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("analyze/structured");
    g.sample_size(10);
    for copies in [1, 2, 4, 8] {
        let p = structured(copies, 0);
        g.bench_with_input(BenchmarkId::from_parameter(p.cols()), &p, |b, p| {
            b.iter(|| analyze(p, &AnalysisOptions::default()).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("analyze/dense");
    g.sample_size(10);
    for n in [25, 50, 100] {
        let p = dense(n, n + n / 5, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| analyze(p, &AnalysisOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn staircase_only(c: &mut Criterion) {
    let mut g = c.benchmark_group("staircase/dense");
    g.sample_size(10);
    for n in [25, 50, 100] {
        let sp = make_shifted(&dense(n, n + n / 5, 2), C64::new(0.0, 0.0)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &sp, |b, sp| b.iter(|| staircase_reduce(sp, None).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let sp = make_shifted(&structured(1, 3), C64::new(0.0, 0.0)).unwrap();
    c.bench_function("toeplitz/matlabex", |b| b.iter(|| toeplitz_structure(&sp, None, None).unwrap()));
}

criterion_group!(benches, full_pipeline, staircase_only, oracle);
criterion_main!(benches);
