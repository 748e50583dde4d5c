use std::hint::black_box;

use canon_core::assignment::{solve_bottleneck, solve_min_sum, CostMatrix};
use canon_core::bounds::{bounds_table, Epsilon};
use canon_core::canon::canon_hilbert;
use canon_core::hilbert::{encode, CellCoord, HilbertParams};
use canon_core::{MetricKind, PointCloud};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cost(n: usize, rng: &mut ChaCha8Rng) -> CostMatrix {
    CostMatrix::new(n, (0..n * n).map(|_| rng.random::<f64>()).collect())
}

fn cloud(d: usize, n: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
    PointCloud::from_points(&points).unwrap()
}

fn assignment(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut group = c.benchmark_group("assignment");
    for n in [16, 64, 256] {
        let m = cost(n, &mut rng);
        group.bench_with_input(BenchmarkId::new("min_sum", n), &m, |b, m| b.iter(|| solve_min_sum(black_box(m))));
        group.bench_with_input(BenchmarkId::new("bottleneck", n), &m, |b, m| b.iter(|| solve_bottleneck(black_box(m))));
    }
    group.finish();
}

fn hilbert(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = HilbertParams::new(3, 20).unwrap();
    let cells: Vec<CellCoord> = (0..1024).map(|_| CellCoord((0..3).map(|_| rng.random_range(0..1 << 20)).collect())).collect();
    c.bench_function("hilbert/encode_1024_d3_m20", |b| {
        b.iter(|| cells.iter().map(|cell| encode(params, black_box(cell)).unwrap()).count())
    });
    let x = cloud(3, 256, &mut rng);
    c.bench_function("hilbert/canonize_256_d3_m10", |b| b.iter(|| canon_hilbert(black_box(&x), 10).unwrap()));
}

fn quotient(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = cloud(3, 128, &mut rng);
    let y = cloud(3, 128, &mut rng);
    c.bench_function("metric/perm_sum_128", |b| b.iter(|| MetricKind::PERM_SUM.distance(black_box(&x), &y).unwrap()));
    c.bench_function("metric/perm_bottleneck_128", |b| {
        b.iter(|| MetricKind::PERM_BOTTLENECK.distance(black_box(&x), &y).unwrap())
    });
}

fn bounds(c: &mut Criterion) {
    let eps = Epsilon::new(1, 6).unwrap();
    let ns = [250, 500, 750, 1000, 2000];
    c.bench_function("bounds/table_m10", |b| b.iter(|| bounds_table(black_box(&ns), 3, &eps, Some(10)).unwrap()));
}

criterion_group!(benches, assignment, hilbert, quotient, bounds);
criterion_main!(benches);
