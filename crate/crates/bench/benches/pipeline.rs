use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pricext_bench::synthetic_monthly_bars;
use pricext_core::ts_filter::{fit, sqrt_transform, ArmaGarchSpec};
use pricext_core::{decompose, fit_var, granger_test, Convention};
use std::hint::black_box;

fn bench_decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    for n in [792, 10_000] {
        let bars = synthetic_monthly_bars(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &bars, |b, bars| {
            b.iter(|| decompose(black_box(bars), Convention::HighExtreme).unwrap())
        });
    }
    g.finish();
}

fn bench_garch(c: &mut Criterion) {
    let d = decompose(&synthetic_monthly_bars(792, 2), Convention::HighExtreme).unwrap();
    let y = sqrt_transform(&d.pmg).unwrap();
    let mut g = c.benchmark_group("arma_garch_fit");
    g.sample_size(10);
    for spec in [ArmaGarchSpec::arma(1, 1), ArmaGarchSpec::arma_garch(1, 1)] {
        g.bench_with_input(BenchmarkId::from_parameter(spec), &y, |b, y| b.iter(|| fit(black_box(y), spec).unwrap()));
    }
    g.finish();
}

fn bench_granger(c: &mut Criterion) {
    let d = decompose(&synthetic_monthly_bars(792, 3), Convention::HighExtreme).unwrap();
    let mut g = c.benchmark_group("granger");
    for lag in [2, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(lag), &lag, |b, &lag| {
            b.iter(|| granger_test(black_box(&d.pml), black_box(&d.pmg), lag).unwrap())
        });
    }
    g.finish();
    c.bench_function("var_select_q6", |b| b.iter(|| fit_var(black_box(&d.pmg), black_box(&d.pml), 6).unwrap()));
}

criterion_group!(benches, bench_decompose, bench_garch, bench_granger);
criterion_main!(benches);
