use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use praginfo::kelly::{make_race, simulate_ensemble, Policy, WinnerModel};
use praginfo::market::{efficiency_sweep, GarchParams};
use praginfo::{Distribution, Execution};

fn modes() -> Vec<(&'static str, Execution)> {
    #[allow(unused_mut)]
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn kelly_ensemble(c: &mut Criterion) {
    let p = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
    let race = make_race(&[2.5, 3.5, 6.0]).unwrap();
    let model = WinnerModel::Iid(p);
    let mut group = c.benchmark_group("kelly_ensemble_64x10k");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_ensemble(exec, &model, &race, 10_000, 64, black_box(1), &Policy::Proportional))
        });
    }
    group.finish();
}

fn garch_sweep(c: &mut Criterion) {
    let sets: Vec<GarchParams> = (0..16)
        .map(|k| {
            let alpha = 0.05 * k as f64;
            GarchParams::new(alpha, 0.9 - alpha, 0.1, 0.01, 0.0).unwrap()
        })
        .collect();
    let mut group = c.benchmark_group("garch_sweep_16x20k");
    group.sample_size(20);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| efficiency_sweep(exec, &sets, 20_000, black_box(2)))
        });
    }
    group.finish();
}

criterion_group!(benches, kelly_ensemble, garch_sweep);
criterion_main!(benches);
