use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use roughpath_bench::random_group;
use roughpath_core::*;

fn bench_group_ops(c: &mut Criterion) {
    let mut g = c.benchmark_group("group_ops");
    for (dim, level) in [(2usize, 2usize), (4, 2), (2, 4)] {
        let a = random_group(7, dim, level);
        let b = random_group(8, dim, level);
        let tag = format!("d{dim}_n{level}");
        g.bench_with_input(BenchmarkId::new("mul", &tag), &(&a, &b), |bch, (a, b)| {
            bch.iter(|| black_box(a.mul(b).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("inverse", &tag), &a, |bch, a| {
            bch.iter(|| black_box(a.inverse()))
        });
        g.bench_with_input(BenchmarkId::new("log", &tag), &a, |bch, a| {
            bch.iter(|| black_box(a.log()))
        });
        g.bench_with_input(BenchmarkId::new("hnorm", &tag), &a, |bch, a| {
            bch.iter(|| black_box(a.hnorm()))
        });
        g.bench_with_input(BenchmarkId::new("gdist", &tag), &(&a, &b), |bch, (a, b)| {
            bch.iter(|| black_box(gdist(a, b).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_group_ops);
criterion_main!(benches);
