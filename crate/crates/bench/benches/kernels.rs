use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracsum_bench::{period_three, toy_final_set};
use fracsum_core::convexity::{midpoint_certify, MidpointMode};
use fracsum_core::dimension::off_n;
use fracsum_core::sumset::{brute_sumset, count_sumset_cells, sumset_cover_dp, sumset_runs};
use fracsum_core::Budget;

fn sums(c: &mut Criterion) {
    let budget = Budget::default();
    let spec = period_three(64);
    let mut g = c.benchmark_group("sumset");
    for n in [12u32, 16] {
        g.bench_with_input(BenchmarkId::new("dp", n), &n, |b, &n| {
            b.iter(|| sumset_cover_dp(&spec, 2, n, &budget).unwrap())
        });
        let cover = spec.materialize(n, 1, &budget).unwrap();
        g.bench_with_input(BenchmarkId::new("brute", n), &n, |b, _| {
            b.iter(|| brute_sumset(&cover, 2, &budget).unwrap())
        });
    }
    let toy = toy_final_set(40);
    for j in [2u64, 3] {
        g.bench_with_input(BenchmarkId::new("runs_toy_depth40", j), &j, |b, &j| {
            b.iter(|| sumset_runs(&toy, j, 40, &budget).unwrap())
        });
    }
    g.finish();
}

fn counts(c: &mut Criterion) {
    let spec = period_three(4000);
    let mut g = c.benchmark_group("count");
    for n in [1000u64, 4000] {
        g.bench_with_input(BenchmarkId::new("j2", n), &n, |b, &n| {
            b.iter(|| count_sumset_cells(&spec, 2, n).unwrap())
        });
    }
    g.finish();
}

fn dims(c: &mut Criterion) {
    let budget = Budget::default();
    let cover = period_three(64).materialize(18, 1, &budget).unwrap();
    c.bench_function("off_n_depth18", |b| b.iter(|| off_n(&cover).unwrap()));
}

fn midpoints(c: &mut Criterion) {
    let budget = Budget::default();
    let toy = toy_final_set(40);
    let mode = MidpointMode::Sampled { samples: 200, seed: 7 };
    c.bench_function("midpoint_sampled_200", |b| {
        b.iter(|| midpoint_certify(&toy, 3, 40, mode.clone(), &budget).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = sums, counts, dims, midpoints
}
criterion_main!(benches);
