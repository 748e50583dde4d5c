//! Property suites runnable from the command line.

use std::collections::HashSet;

use canon_core::bounds::{self, Epsilon};
use canon_core::canon::{self, Method};
use canon_core::coverage::{self, Dataset};
use canon_core::hilbert::{self, HilbertIndex, HilbertParams};
use canon_core::metrics::{self, BaseMetric, Norm};
use canon_core::synth::{self, SynthConfig};
use canon_core::{MetricKind, PointCloud};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SUITES: &[&str] = &[
    "hilbert",
    "isometry",
    "poor-c1",
    "canon",
    "metrics",
    "assignment",
    "coverage",
    "bounds",
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub property: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    fn record(&mut self, property: &'static str, failures: usize, trials: usize) {
        self.checks.push(Check {
            suite: self.name,
            property,
            passed: failures == 0,
            detail: format!("{failures} failures in {trials} trials"),
        });
    }

    fn expect(&mut self, property: &'static str, passed: bool, detail: String) {
        self.checks.push(Check {
            suite: self.name,
            property,
            passed,
            detail,
        });
    }
}

/// Runs `name` (or every suite for `all`); `None` for an unknown name.
pub fn run(name: &str, seed: u64) -> Option<Vec<Check>> {
    if name == "all" {
        return Some(SUITES.iter().flat_map(|s| run(s, seed).unwrap()).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "hilbert" => hilbert_suite(&mut rng),
        "isometry" => isometry_suite(&mut rng),
        "poor-c1" => poor_c1_suite(),
        "canon" => canon_suite(&mut rng),
        "metrics" => metrics_suite(&mut rng),
        "assignment" => assignment_suite(&mut rng),
        "coverage" => coverage_suite(seed),
        "bounds" => bounds_suite(),
        _ => return None,
    };
    Some(checks)
}

fn cloud(rng: &mut impl Rng, d: usize, n: usize) -> PointCloud {
    PointCloud::from_column_major(d, n, (0..d * n).map(|_| rng.random::<f64>()).collect()).unwrap()
}

fn perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn hilbert_suite(rng: &mut impl Rng) -> Vec<Check> {
    let mut s = Suite::new("hilbert");
    let (mut bij, mut adj, mut nest, mut cells) = (0, 0, 0, 0);
    for d in 1..=3 {
        for m in 1..=4 {
            let p = HilbertParams::new(d, m).unwrap();
            let mut seen = HashSet::new();
            let mut prev = None;
            for k in 0..p.cell_count() {
                cells += 1;
                let c = hilbert::decode(p, HilbertIndex(k)).unwrap();
                if hilbert::encode(p, &c).unwrap() != HilbertIndex(k) || !seen.insert(c.clone()) {
                    bij += 1;
                }
                if prev.as_ref().is_some_and(|q: &hilbert::CellCoord| q.l1(&c) != 1) {
                    adj += 1;
                }
                if m > 1 {
                    let coarse = HilbertParams::new(d, m - 1).unwrap();
                    let parent = hilbert::decode(coarse, HilbertIndex(k >> d)).unwrap();
                    if c.coords().iter().zip(parent.coords()).any(|(a, b)| a / 2 != *b) {
                        nest += 1;
                    }
                }
                prev = Some(c);
            }
        }
    }
    s.record("bijection", bij, cells);
    s.record("adjacency", adj, cells);
    s.record("nesting", nest, cells);

    let holder = |p: HilbertParams, a: u64, b: u64| {
        let xa = hilbert::interval_centroid(p, HilbertIndex(a)).unwrap();
        let xb = hilbert::interval_centroid(p, HilbertIndex(b)).unwrap();
        let ya = hilbert::centroid(p, &hilbert::decode(p, HilbertIndex(a)).unwrap()).unwrap();
        let yb = hilbert::centroid(p, &hilbert::decode(p, HilbertIndex(b)).unwrap()).unwrap();
        let lhs = ya.iter().zip(&yb).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        lhs <= 4.0 * (xa - xb).abs().powf(1.0 / p.dim() as f64)
    };
    let (mut bad, mut pairs) = (0, 0);
    for m in 1..=4 {
        let p = HilbertParams::new(2, m).unwrap();
        for a in 0..p.cell_count() {
            for b in 0..p.cell_count() {
                pairs += 1;
                bad += usize::from(!holder(p, a, b));
            }
        }
    }
    for m in 1..=3 {
        let p = HilbertParams::new(3, m).unwrap();
        for _ in 0..10_000 {
            pairs += 1;
            let (a, b) = (rng.random_range(0..p.cell_count()), rng.random_range(0..p.cell_count()));
            bad += usize::from(!holder(p, a, b));
        }
    }
    s.record("holder", bad, pairs);
    s.checks
}

fn isometry_suite(rng: &mut impl Rng) -> Vec<Check> {
    let mut s = Suite::new("isometry");
    let trials = 300;
    let mut bad = 0;
    for _ in 0..trials {
        let n = rng.random_range(1..=64);
        let x = cloud(rng, 1, n);
        let y = cloud(rng, 1, n);
        for p in [Norm::L1, Norm::L2] {
            let w = metrics::wasserstein_1d(&x.row(0), &y.row(0), p).unwrap().value();
            let q = metrics::perm_quotient_lp(&x, &y, p).unwrap().value();
            bad += usize::from((w - q).abs() > 1e-9);
        }
    }
    s.record("sort-wasserstein", bad, trials);

    let mut bad = 0;
    for _ in 0..trials {
        let d = rng.random_range(1..=4);
        let n = rng.random_range(1..=16);
        let (x, y) = (cloud(rng, d, n), cloud(rng, d, n));
        let q = metrics::translation_quotient(&x, &y).unwrap().value();
        let c = metrics::dist_frobenius(&canon::canon_centralize(&x).cloud, &canon::canon_centralize(&y).cloud)
            .unwrap()
            .value();
        bad += usize::from((q - c).abs() > 1e-9);
    }
    s.record("centralize-translation", bad, trials);

    let mut bad = 0;
    for _ in 0..trials {
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let q = (a - b).abs().min((a + b).abs());
        bad += usize::from((q - (canon::canon_abs(a) - canon::canon_abs(b)).abs()).abs() > 1e-9);
    }
    s.record("abs-sign", bad, trials);
    s.checks
}

/// Two small balls around ±1/2 on the line, `ε = 0.1`.
pub fn poor_c1_counts() -> (usize, usize, usize) {
    let pts = [-0.58, -0.54, -0.5, -0.46, -0.42, 0.42, 0.46, 0.5, 0.54, 0.58];
    let line = |a: &f64, b: &f64| (a - b).abs();
    let raw = coverage::exact_cover_number(&pts, line, 0.1).unwrap();
    let image: Vec<f64> = pts.iter().map(|&t| canon::canon_c1(t)).collect();
    let canon = coverage::exact_cover_number(&image, line, 0.1).unwrap();
    let quotient = coverage::exact_cover_number(&pts, |a: &f64, b: &f64| (a.abs() - b.abs()).abs(), 0.1).unwrap();
    (raw, canon, quotient)
}

fn poor_c1_suite() -> Vec<Check> {
    let mut s = Suite::new("poor-c1");
    let got = poor_c1_counts();
    s.expect(
        "cover-numbers",
        got == (2, 2, 1),
        format!("raw {}, canonized {}, quotient {}", got.0, got.1, got.2),
    );
    s.checks
}

fn canon_suite(rng: &mut impl Rng) -> Vec<Check> {
    let mut s = Suite::new("canon");
    let trials = 300;
    for method in [Method::Lexsort, Method::Hilbert(6)] {
        let (mut idem, mut inv, mut orbit) = (0, 0, 0);
        for _ in 0..trials {
            let d = rng.random_range(1..=4);
            let n = rng.random_range(1..=20);
            let x = cloud(rng, d, n);
            let c = method.apply(&x).unwrap();
            idem += usize::from(method.apply(&c.cloud).unwrap().cloud != c.cloud);
            let gx = x.permute_columns(&perm(rng, n)).unwrap();
            inv += usize::from(method.apply(&gx).unwrap().cloud != c.cloud);
            orbit += usize::from(c.apply_to(&x).unwrap() != c.cloud);
        }
        let (p1, p2, p3) = match method {
            Method::Lexsort => ("lexsort-idempotent", "lexsort-invariant", "lexsort-in-orbit"),
            _ => ("hilbert-idempotent", "hilbert-invariant", "hilbert-in-orbit"),
        };
        s.record(p1, idem, trials);
        s.record(p2, inv, trials);
        s.record(p3, orbit, trials);
    }
    let mut bad = 0;
    for _ in 0..trials {
        let d = rng.random_range(1..=4);
        let x = cloud(rng, d, 10);
        let signs: Vec<f64> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let c = canon::canon_skewness_sign(&x);
        bad += usize::from(canon::canon_skewness_sign(&x.apply_signs(&signs).unwrap()).cloud != c.cloud);
    }
    s.record("skewness-invariant", bad, trials);
    s.checks
}

fn metrics_suite(rng: &mut impl Rng) -> Vec<Check> {
    let mut s = Suite::new("metrics");
    let ms: Vec<MetricKind> = ["inf", "mean-euclidean", "perm-sum", "perm-bottleneck", "sign:frobenius", "translation"]
        .iter()
        .map(|m| m.parse().unwrap())
        .collect();
    let trials = 200;
    let (mut sym, mut tri) = (0, 0);
    for _ in 0..trials {
        let (x, y, z) = (cloud(rng, 2, 5), cloud(rng, 2, 5), cloud(rng, 2, 5));
        for m in &ms {
            let dxy = m.distance(&x, &y).unwrap().value();
            sym += usize::from((dxy - m.distance(&y, &x).unwrap().value()).abs() > 1e-9);
            let via = m.distance(&x, &z).unwrap().value() + m.distance(&z, &y).unwrap().value();
            tri += usize::from(dxy > via + 1e-9);
        }
    }
    s.record("symmetry", sym, trials);
    s.record("triangle", tri, trials);
    let mut bad = 0;
    for _ in 0..trials {
        let (x, y) = (cloud(rng, 3, 12), cloud(rng, 3, 12));
        let q = metrics::perm_quotient_sum(&x, &y).unwrap().value();
        for method in [Method::Lexsort, Method::Hilbert(6)] {
            let (cx, cy) = (method.apply(&x).unwrap().cloud, method.apply(&y).unwrap().cloud);
            bad += usize::from(q > metrics::dist_mean_euclidean(&cx, &cy).unwrap().value() + 1e-9);
        }
    }
    s.record("quotient-lower-bound", bad, trials);
    s.checks
}

fn assignment_suite(rng: &mut impl Rng) -> Vec<Check> {
    let mut s = Suite::new("assignment");
    let trials = 200;
    let (mut sum, mut bottleneck) = (0, 0);
    for _ in 0..trials {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=7);
        let (x, y) = (cloud(rng, d, n), cloud(rng, d, n));
        let brute = metrics::brute_perm_quotient(&x, &y, BaseMetric::MeanEuclidean).unwrap().value();
        sum += usize::from((metrics::perm_quotient_sum(&x, &y).unwrap().value() - brute).abs() > 1e-9);
        let brute = metrics::brute_perm_quotient(&x, &y, BaseMetric::Inf).unwrap().value();
        bottleneck += usize::from((metrics::perm_quotient_bottleneck(&x, &y).unwrap().value() - brute).abs() > 1e-9);
    }
    s.record("perm-sum-exact", sum, trials);
    s.record("perm-bottleneck-exact", bottleneck, trials);
    s.checks
}

fn coverage_suite(seed: u64) -> Vec<Check> {
    let mut s = Suite::new("coverage");
    let items = synth::generate(&SynthConfig {
        per_cluster: 30,
        points: 16,
        seed,
        ..SynthConfig::default()
    })
    .unwrap();
    let (train, test) = synth::train_test_split(items, 60, 30, seed).unwrap();
    let train = Dataset::new("train", train).unwrap();
    let test = Dataset::new("test", test).unwrap();
    let euclid: MetricKind = "mean-euclidean".parse().unwrap();
    let q = coverage::coverage(&train, &test, MetricKind::PERM_SUM, true).unwrap();
    for (method, property) in [(Method::Hilbert(6), "quotient-below-hilbert"), (Method::Lexsort, "quotient-below-lexsort")] {
        let c = coverage::canonized_coverage(&train, &test, method, euclid, true).unwrap();
        let bad = q.q.iter().zip(&c.q).filter(|(a, b)| **a > **b + 1e-9).count();
        s.record(property, bad, q.q.len());
    }
    s.checks
}

fn bounds_suite() -> Vec<Check> {
    let mut s = Suite::new("bounds");
    let expected = [
        ["2.1e+0036", "5.3e+0193", "1.1e+0239", "6.9e+0357"],
        ["7.4e+0043", "7.9e+0278", "4.0e+0477", "4.8e+0715"],
        ["2.2e+0048", "5.0e+0336", "1.4e+0716", "3.3e+1073"],
        ["3.5e+0051", "5.0e+0380", "5.2e+0954", "2.3e+1431"],
        ["2.0e+0059", "4.4e+0494", "9.2e+1908", "5.3e+2862"],
    ];
    let eps: Epsilon = "1/6".parse().unwrap();
    let table = bounds::bounds_table(&[250, 500, 750, 1000, 2000], 3, &eps, Some(10)).unwrap();
    let mismatches = table
        .iter()
        .zip(expected)
        .flat_map(|(row, want)| row.values().map(|v| v.sci()).into_iter().zip(want).filter(|(a, b)| a != b))
        .count();
    s.record("published-table", mismatches, 20);

    let (mut bad, mut cases) = (0, 0);
    for n in 1..=5u32 {
        for m in 1..=5u64 {
            cases += 1;
            let mut seen = HashSet::new();
            for mut code in 0..m.pow(n) {
                let mut t: Vec<u64> = (0..n)
                    .map(|_| {
                        let v = code % m;
                        code /= m;
                        v
                    })
                    .collect();
                t.sort_unstable();
                seen.insert(t);
            }
            bad += usize::from(bounds::multiset_count(n as u64, m).unwrap() != BigUint::from(seen.len()));
        }
    }
    s.record("multiset-count", bad, cases);
    s.checks
}
