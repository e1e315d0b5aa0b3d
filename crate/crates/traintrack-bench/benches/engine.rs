use criterion::{black_box, criterion_group, criterion_main, Criterion};

use traintrack::dual_bigon::run_pipeline;
use traintrack::measures::{positive_tangential, positive_transverse};
use traintrack::moves::split;
use traintrack::strips::{enumerate_strip, EnumerateOptions, Target};
use traintrack::Direction;
use traintrack_bench::fixture;

fn bench_split(c: &mut Criterion) {
    let (t, _) = fixture("s20-a");
    let e = t.large_branches()[0];
    c.bench_function("split s20-a", |b| b.iter(|| split(black_box(&t), e, Direction::Right).unwrap()));
}

fn bench_lp(c: &mut Criterion) {
    let (t, _) = fixture("s20-a");
    c.bench_function("positive transverse s20-a", |b| b.iter(|| positive_transverse(black_box(&t)).unwrap()));
    c.bench_function("strict tangential s20-a", |b| b.iter(|| positive_tangential(black_box(&t), true).unwrap()));
}

fn bench_strip(c: &mut Criterion) {
    let (t, g) = fixture("s12-a");
    let target = Target::Guide(g);
    let opts = EnumerateOptions { radius: Some(4), jobs: Some(1) };
    c.bench_function("strip s12-a radius 4", |b| b.iter(|| enumerate_strip(black_box(&t), &target, opts).unwrap()));
}

fn bench_pipeline(c: &mut Criterion) {
    let (t, g) = fixture("s05-a");
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("collapse s05-a", |b| b.iter(|| run_pipeline(black_box(&t), &g, 0, 4).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_split, bench_lp, bench_strip, bench_pipeline);
criterion_main!(benches);
