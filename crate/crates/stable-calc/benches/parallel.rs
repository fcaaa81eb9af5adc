//! Parallel kernels against their sequential twins, plus throughput
//! numbers for the two exhaustive searches built on them.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stable_calc::calculus::{apply_diffop, apply_diffop_seq, convolve, convolve_seq};
use stable_calc::matrices::HermitianMatrix;
use stable_calc::multiaffine::MultiAffinePoly;
use stable_calc::par;
use stable_calc::paving::paving_search;
use stable_calc::subset;

/// Deterministic full-support coefficient table; values in [0.1, 1.1).
fn dense_table(n: usize, salt: u64) -> MultiAffinePoly<f64> {
    let size = subset::lattice_size(n);
    let coeffs = (0..size)
        .map(|s| {
            let h = (s as u64).wrapping_add(salt).wrapping_mul(0x9e3779b97f4a7c15);
            0.1 + (h >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    MultiAffinePoly::new(n, coeffs).expect("sized table")
}

fn symmetric_contraction(n: usize) -> HermitianMatrix {
    let mut re = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            re[i][j] = if i == j { 0.2 } else { 0.1 / (1.0 + (i as f64 - j as f64).abs()) };
        }
    }
    HermitianMatrix::from_real(&re).expect("symmetric entries")
}

fn bench_convolve(c: &mut Criterion) {
    let mut g = c.benchmark_group("convolve");
    g.sample_size(20);
    for n in [10usize, 14] {
        let p = dense_table(n, 1);
        let q = dense_table(n, 2);
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| convolve(&p, &q).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| convolve_seq(&p, &q).unwrap())
        });
    }
    g.finish();
}

fn bench_apply_diffop(c: &mut Criterion) {
    let mut g = c.benchmark_group("apply_diffop");
    g.sample_size(20);
    for n in [10usize, 14] {
        let q = dense_table(n, 3);
        let p = dense_table(n, 4);
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| apply_diffop(&q, &p).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| apply_diffop_seq(&q, &p).unwrap())
        });
    }
    g.finish();
}

fn bench_map_range(c: &mut Criterion) {
    let mut g = c.benchmark_group("map_range");
    g.sample_size(20);
    let len = 1usize << 16;
    let work = |i: usize| {
        let mut acc = i as f64;
        for _ in 0..64 {
            acc = (acc * 1.000001).sqrt() + 1.0;
        }
        acc
    };
    g.bench_function("parallel", |b| b.iter(|| par::map_range(len, work)));
    g.bench_function("sequential", |b| b.iter(|| par::map_range_seq(len, work)));
    g.finish();
}

fn bench_paving_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("paving_search");
    g.sample_size(10);
    for n in [8usize, 10] {
        let a = symmetric_contraction(n);
        g.bench_with_input(BenchmarkId::new("r2", n), &n, |b, _| {
            b.iter(|| paving_search(&a, 2, false).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_convolve,
    bench_apply_diffop,
    bench_map_range,
    bench_paving_search
);
criterion_main!(benches);
