use std::collections::HashSet;

use canon_core::bounds::{self, BoundQuery, Epsilon};
use num_bigint::BigUint;
use proptest::prelude::*;

/// Orbits of `[m]^n` under coordinate permutations, counted by sorting every tuple.
fn brute_multisets(n: u32, m: u64) -> u64 {
    let total = m.pow(n);
    let mut seen = HashSet::new();
    for mut code in 0..total {
        let mut tuple: Vec<u64> = (0..n)
            .map(|_| {
                let v = code % m;
                code /= m;
                v
            })
            .collect();
        tuple.sort_unstable();
        seen.insert(tuple);
    }
    seen.len() as u64
}

fn pascal(rows: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![1u128]];
    for r in 1..rows {
        let prev = &t[r - 1];
        let mut row = vec![1u128; r + 1];
        for k in 1..r {
            row[k] = prev[k - 1] + prev[k];
        }
        t.push(row);
    }
    t
}

#[test]
fn multiset_count_matches_enumeration() {
    for n in 1..=6u32 {
        for m in 1..=6u64 {
            let fast = bounds::multiset_count(n as u64, m).unwrap();
            assert_eq!(fast, BigUint::from(brute_multisets(n, m)), "n={n} m={m}");
        }
    }
    assert!(bounds::multiset_count(0, 3).is_err());
}

#[test]
fn binomial_matches_pascal_triangle() {
    let t = pascal(100);
    for (top, row) in t.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            assert_eq!(bounds::binomial(&BigUint::from(top), k as u64), BigUint::from(v));
        }
        assert_eq!(bounds::binomial(&BigUint::from(top), top as u64 + 1), BigUint::ZERO);
    }
}

fn sixth() -> Epsilon {
    "1/6".parse().unwrap()
}

#[test]
fn published_table_is_reproduced() {
    let ns = [250, 500, 750, 1000, 2000];
    let expected = [
        ["2.1e+0036", "5.3e+0193", "1.1e+0239", "6.9e+0357"],
        ["7.4e+0043", "7.9e+0278", "4.0e+0477", "4.8e+0715"],
        ["2.2e+0048", "5.0e+0336", "1.4e+0716", "3.3e+1073"],
        ["3.5e+0051", "5.0e+0380", "5.2e+0954", "2.3e+1431"],
        ["2.0e+0059", "4.4e+0494", "9.2e+1908", "5.3e+2862"],
    ];
    let table = bounds::bounds_table(&ns, 3, &sixth(), Some(10)).unwrap();
    for (row, want) in table.iter().zip(expected) {
        let got: Vec<String> = row.values().iter().map(|v| v.sci()).collect();
        assert_eq!(got, want, "n = {}", row.n);
    }
}

#[test]
fn table_cells_have_closed_forms() {
    // ε = 1/6: three cells per axis; the curve bound with m = 10 has 436 cells.
    for n in [250u64, 500, 750, 1000, 2000] {
        let q = BoundQuery::new(n, 3, sixth()).with_order(Some(10));
        let quotient = bounds::bound_quotient_upper(&q).unwrap();
        assert_eq!(quotient.exact.unwrap(), bounds::binomial(&BigUint::from(n + 26), n));
        let hilbert = bounds::bound_hilbert_upper(&q).unwrap();
        assert_eq!(hilbert.exact.unwrap(), bounds::binomial(&BigUint::from(n + 435), n));
        let lex = bounds::bound_lexsort_lower(&q).unwrap();
        assert_eq!(lex.exact.unwrap(), BigUint::from(3u32).pow(2 * n as u32 + 1));
        let cube = bounds::bound_hypercube_exact(&q).unwrap();
        assert_eq!(cube.exact.unwrap(), BigUint::from(3u32).pow(3 * n as u32));
    }
}

#[test]
fn log_and_exact_values_agree() {
    let eps_values = ["1/6", "1/4", "1/10", "1/2"];
    for e in eps_values {
        let eps: Epsilon = e.parse().unwrap();
        for d in 1..=4u32 {
            for n in [1u64, 7, 60, 333, 2000] {
                let q = BoundQuery::new(n, d, eps.clone()).with_order(Some(12));
                let values = [
                    bounds::bound_quotient_upper(&q).unwrap(),
                    bounds::bound_hilbert_upper(&q).unwrap(),
                    bounds::bound_lexsort_lower(&q).unwrap(),
                    bounds::bound_hypercube_exact(&q).unwrap(),
                ];
                for v in values {
                    let exact = v.exact_log10().unwrap();
                    assert!((exact - v.log10).abs() <= 1e-9 * v.log10.max(1.0), "{e} d={d} n={n} {:?}", v.formula);
                    let digits = v.exact.as_ref().unwrap().to_str_radix(10).len() as u64;
                    assert_eq!(v.digits(), digits);
                }
            }
        }
    }
}

#[test]
fn table_is_ordered() {
    for d in 2..=4u32 {
        for k in 1..=5u64 {
            let eps = Epsilon::from_half_inverse(k).unwrap();
            let rows = bounds::bounds_table(&[10, 100, 1000], d, &eps, Some(20)).unwrap();
            for r in rows {
                assert!(r.quotient.log10 <= r.hilbert.log10 + 1e-12);
                assert!(r.lexsort.log10 <= r.hypercube.log10 + 1e-12);
                assert!(r.quotient.log10 <= r.hypercube.log10 + 1e-12);
            }
        }
    }
}

#[test]
fn hilbert_bound_decreases_with_order_toward_its_limit() {
    let limit = bounds::bound_hilbert_upper(&BoundQuery::new(250, 3, sixth())).unwrap();
    let mut prev = f64::INFINITY;
    for m in 2..=40 {
        let q = BoundQuery::new(250, 3, sixth()).with_order(Some(m));
        let v = bounds::bound_hilbert_upper(&q).unwrap();
        assert!(v.log10 <= prev + 1e-12, "m={m}");
        assert!(v.log10 >= limit.log10 - 1e-12);
        prev = v.log10;
    }
    // 1/(2δ) is exactly 432 in the limit, so the finite-order ceiling settles one above it.
    let far = bounds::bound_hilbert_upper(&BoundQuery::new(250, 3, sixth()).with_order(Some(40))).unwrap();
    assert_eq!(far.exact.unwrap(), bounds::binomial(&BigUint::from(250u32 + 432), 250));
    // With ε = 3/10, d = 2 the limit 1/(2δ) = 200/9 is not an integer, so high orders reach it.
    let eps: Epsilon = "3/10".parse().unwrap();
    let limit = bounds::bound_hilbert_upper(&BoundQuery::new(50, 2, eps.clone())).unwrap();
    let far = bounds::bound_hilbert_upper(&BoundQuery::new(50, 2, eps).with_order(Some(40))).unwrap();
    assert_eq!(far.exact, limit.exact);
}

#[test]
fn hilbert_bound_requires_coarse_enough_curve() {
    let q = BoundQuery::new(10, 3, sixth()).with_order(Some(1));
    assert!(matches!(bounds::bound_hilbert_upper(&q), Err(canon_core::Error::Hypothesis(_))));
    let q = BoundQuery::new(10, 3, sixth()).with_order(Some(2));
    assert!(bounds::bound_hilbert_upper(&q).is_ok());
}

#[test]
fn lattice_bounds_need_half_inverse_epsilon() {
    let q = BoundQuery::new(10, 3, "1/5".parse().unwrap());
    assert!(bounds::bound_lexsort_lower(&q).is_err());
    assert!(bounds::bound_hypercube_exact(&q).is_err());
    assert!(bounds::bound_quotient_upper(&q).is_ok());
}

#[test]
fn huge_values_fall_back_to_logarithms() {
    let q = BoundQuery::new(1_000_000, 3, sixth());
    let cube = bounds::bound_hypercube_exact(&q).unwrap();
    assert!(cube.exact.is_none());
    assert!((cube.log10 - 3e6 * 3f64.log10()).abs() < 1e-6);
    assert_eq!(cube.digits(), (3e6 * 3f64.log10()).floor() as u64 + 1);
    let quotient = bounds::bound_quotient_upper(&q).unwrap();
    assert!(quotient.log10 > 0.0 && quotient.log10 < cube.log10);
}

#[test]
fn group_cardinality_multiplies_exactly() {
    let q = BoundQuery::new(5, 2, Epsilon::from_half_inverse(2).unwrap());
    let quotient = bounds::bound_quotient_upper(&q).unwrap();
    let g = bounds::factorial(5);
    assert_eq!(g, BigUint::from(120u32));
    let v = bounds::bound_group_cardinality(&quotient, &g).unwrap();
    assert_eq!(v.exact.unwrap(), quotient.exact.clone().unwrap() * 120u32);
    assert!(bounds::bound_group_cardinality(&quotient, &BigUint::ZERO).is_err());
}

proptest! {
    #[test]
    fn sci_matches_exact_digits(n in 1u64..400, k in 1u64..8, d in 1u32..4) {
        let q = BoundQuery::new(n, d, Epsilon::from_half_inverse(k).unwrap());
        let v = bounds::bound_hypercube_exact(&q).unwrap();
        let digits = v.exact.as_ref().unwrap().to_str_radix(10);
        let (m, e) = v.mantissa_exponent(2);
        // Exponent is the digit count minus one unless rounding carried into a new digit.
        prop_assert!(e == digits.len() as i64 - 1 || (e == digits.len() as i64 && m == 1.0));
        prop_assert!((1.0..10.0).contains(&m));
    }
}
