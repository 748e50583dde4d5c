//! Base metrics on point clouds and their quotients under column permutations,
//! row sign flips and translations.
//!
//! A quotient metric is the distance between orbits,
//! `ρ_G([X], [Y]) = min_g ρ(g·X, Y)`. Permutation quotients are solved exactly
//! with the assignment solvers in [`crate::assignment`]; the exhaustive
//! [`brute_perm_quotient`] and [`sign_quotient_exhaustive`] exist as oracles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::{self, CostMatrix};
use crate::canon::{canon_centralize, sign_pattern, MAX_SIGN_DIM};
use crate::cloud::PointCloud;
use crate::error::{domain, Error, Result};

/// Largest `n` accepted by [`brute_perm_quotient`].
pub const MAX_BRUTE_POINTS: usize = 8;

/// Entry-wise `p`-norm order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

impl Norm {
    fn of(self, diffs: impl Iterator<Item = f64>) -> f64 {
        match self {
            Norm::L1 => diffs.map(f64::abs).sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::Inf => diffs.map(f64::abs).fold(0.0, f64::max),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Inf => "inf",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" => Ok(Norm::Inf),
            _ => domain(format!("unknown norm order '{s}' (expected 1, 2 or inf)")),
        }
    }
}

/// Metrics on `d × n` clouds that compare column `j` of one with column `j` of the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseMetric {
    /// Largest absolute entry of `X − Y`.
    Inf,
    /// Frobenius norm of `X − Y`.
    Frobenius,
    /// Mean over columns of the Euclidean column distance.
    MeanEuclidean,
    /// Entry-wise `p`-norm of the flattened difference.
    Lp(Norm),
}

impl BaseMetric {
    pub fn distance(self, x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
        match self {
            BaseMetric::Inf => dist_inf(x, y),
            BaseMetric::Frobenius => dist_frobenius(x, y),
            BaseMetric::MeanEuclidean => dist_mean_euclidean(x, y),
            BaseMetric::Lp(p) => dist_lp(x, y, p),
        }
    }

    /// True when the metric is a max or (power) sum of per-row terms, so a
    /// row sign flip can be optimised one row at a time.
    fn row_separable(self) -> bool {
        !matches!(self, BaseMetric::MeanEuclidean)
    }

    fn id(self) -> String {
        match self {
            BaseMetric::Inf => "inf".into(),
            BaseMetric::Frobenius => "frobenius".into(),
            BaseMetric::MeanEuclidean => "mean-euclidean".into(),
            BaseMetric::Lp(p) => format!("l{}", p.label()),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "inf" => Ok(BaseMetric::Inf),
            "frobenius" => Ok(BaseMetric::Frobenius),
            "mean-euclidean" | "euclidean" => Ok(BaseMetric::MeanEuclidean),
            "l1" => Ok(BaseMetric::Lp(Norm::L1)),
            "l2" => Ok(BaseMetric::Lp(Norm::L2)),
            "linf" => Ok(BaseMetric::Lp(Norm::Inf)),
            _ => domain(format!("unknown base metric '{s}'")),
        }
    }
}

/// Group whose orbits a quotient metric compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quotient {
    /// Column permutations, additive base (mean-Euclidean, `ℓ1`, `ℓ2`).
    PermSum,
    /// Column permutations, max base (`ρ_∞`).
    PermBottleneck,
    /// Row sign flips `{−1, 1}^d`.
    Sign,
    /// Translations of every column by a common vector, Frobenius base.
    Translation,
}

/// A metric selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    Base(BaseMetric),
    /// `‖sort(x) − sort(y)‖_p` on single-row clouds.
    Wasserstein1d(Norm),
    Quotient(Quotient, BaseMetric),
}

impl MetricKind {
    /// Builds a quotient metric, rejecting bases the group does not preserve
    /// or that the solver cannot handle.
    pub fn quotient(group: Quotient, base: BaseMetric) -> Result<Self> {
        let ok = match group {
            Quotient::PermSum => matches!(
                base,
                BaseMetric::MeanEuclidean | BaseMetric::Lp(Norm::L1) | BaseMetric::Lp(Norm::L2)
            ),
            Quotient::PermBottleneck => {
                matches!(base, BaseMetric::Inf | BaseMetric::Lp(Norm::Inf))
            }
            Quotient::Sign => true,
            Quotient::Translation => base == BaseMetric::Frobenius,
        };
        if !ok {
            return domain(format!("quotient {group:?} is not defined over {}", base.id()));
        }
        Ok(MetricKind::Quotient(group, base))
    }

    pub const PERM_SUM: MetricKind = MetricKind::Quotient(Quotient::PermSum, BaseMetric::MeanEuclidean);
    pub const PERM_BOTTLENECK: MetricKind = MetricKind::Quotient(Quotient::PermBottleneck, BaseMetric::Inf);

    pub fn distance(self, x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
        match self {
            MetricKind::Base(b) => b.distance(x, y),
            MetricKind::Wasserstein1d(p) => {
                if x.dim() != 1 || y.dim() != 1 {
                    return domain("wasserstein-1d compares single-row clouds");
                }
                wasserstein_1d(&x.row(0), &y.row(0), p)
            }
            MetricKind::Quotient(Quotient::PermSum, BaseMetric::MeanEuclidean) => {
                perm_quotient_sum(x, y)
            }
            MetricKind::Quotient(Quotient::PermSum, BaseMetric::Lp(p)) => perm_quotient_lp(x, y, p),
            MetricKind::Quotient(Quotient::PermBottleneck, _) => perm_quotient_bottleneck(x, y),
            MetricKind::Quotient(Quotient::Sign, b) => sign_quotient(x, y, b),
            MetricKind::Quotient(Quotient::Translation, _) => translation_quotient(x, y),
            MetricKind::Quotient(..) => Err(Error::Internal(format!("unsupported metric {self}"))),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Base(b) => f.write_str(&b.id()),
            MetricKind::Wasserstein1d(p) => write!(f, "wasserstein-1d:{}", p.label()),
            MetricKind::Quotient(Quotient::PermSum, BaseMetric::MeanEuclidean) => f.write_str("perm-sum"),
            MetricKind::Quotient(Quotient::PermSum, b) => write!(f, "perm-sum:{}", b.id()),
            MetricKind::Quotient(Quotient::PermBottleneck, _) => f.write_str("perm-bottleneck"),
            MetricKind::Quotient(Quotient::Sign, b) => write!(f, "sign:{}", b.id()),
            MetricKind::Quotient(Quotient::Translation, _) => f.write_str("translation"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    /// Parses identifiers such as `inf`, `mean-euclidean`, `wasserstein-1d:2`,
    /// `perm-sum`, `perm-sum:l1`, `perm-bottleneck`, `sign:frobenius`, `translation`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("wasserstein-1d", p) => Ok(MetricKind::Wasserstein1d(Norm::parse(p.unwrap_or("1"))?)),
            ("perm-sum", b) => Self::quotient(
                Quotient::PermSum,
                b.map_or(Ok(BaseMetric::MeanEuclidean), BaseMetric::parse)?,
            ),
            ("perm-bottleneck", None) => Ok(Self::PERM_BOTTLENECK),
            ("sign", b) => Self::quotient(Quotient::Sign, BaseMetric::parse(b.unwrap_or("inf"))?),
            ("translation", None) => Self::quotient(Quotient::Translation, BaseMetric::Frobenius),
            (b, None) => BaseMetric::parse(b).map(MetricKind::Base),
            _ => domain(format!("unknown metric '{s}'")),
        }
    }
}

/// A non-negative distance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceValue(f64);

impl DistanceValue {
    /// Values in `[−1e−12, 0)` are rounding noise and become 0; anything
    /// more negative (or NaN) is a bug upstream.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < -1e-12 {
            return Err(Error::Internal(format!("negative or NaN distance {value}")));
        }
        Ok(Self(value.max(0.0)))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn diffs<'a>(x: &'a PointCloud, y: &'a PointCloud) -> Result<impl Iterator<Item = f64> + 'a> {
    x.require_same_shape(y)?;
    Ok(x.values().zip(y.values()).map(|(a, b)| a - b))
}

/// `max_ij |X_ij − Y_ij|`.
pub fn dist_inf(x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
    DistanceValue::new(Norm::Inf.of(diffs(x, y)?))
}

/// Frobenius norm of `X − Y`.
pub fn dist_frobenius(x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
    DistanceValue::new(Norm::L2.of(diffs(x, y)?))
}

/// Entry-wise `p`-norm of `X − Y`.
pub fn dist_lp(x: &PointCloud, y: &PointCloud, p: Norm) -> Result<DistanceValue> {
    DistanceValue::new(p.of(diffs(x, y)?))
}

/// `(1/n) Σ_j ‖X_j − Y_j‖₂`.
pub fn dist_mean_euclidean(x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    let total: f64 = x.points().zip(y.points()).map(|(a, b)| euclid(a, b)).sum();
    DistanceValue::new(total / x.len() as f64)
}

#[inline]
fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

#[inline]
fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// `‖sort(x) − sort(y)‖_p`, the permutation quotient of the `p`-norm on `R^n`.
pub fn wasserstein_1d(x: &[f64], y: &[f64], p: Norm) -> Result<DistanceValue> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            expected: (1, x.len()),
            got: (1, y.len()),
        });
    }
    let xs = crate::canon::canon_sort(x);
    let ys = crate::canon::canon_sort(y);
    DistanceValue::new(p.of(xs.iter().zip(&ys).map(|(a, b)| a - b)))
}

/// Optimal column assignment under the mean-Euclidean cost.
///
/// Returns `assignment[i] = j` (column `i` of `x` matched to column `j` of `y`)
/// and the minimal mean distance.
pub fn perm_sum_assignment(x: &PointCloud, y: &PointCloud) -> Result<(Vec<usize>, DistanceValue)> {
    x.require_same_shape(y)?;
    let cost = CostMatrix::from_fn(x.len(), |i, j| euclid(x.point(i), y.point(j)));
    let (assignment, total) = assignment::solve_min_sum(&cost);
    Ok((assignment, DistanceValue::new(total / x.len() as f64)?))
}

/// `min_π (1/n) Σ_i ‖X_i − Y_π(i)‖₂`, the Wasserstein-type quotient of the
/// mean-Euclidean metric, solved exactly as a linear assignment problem.
pub fn perm_quotient_sum(x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
    perm_sum_assignment(x, y).map(|(_, d)| d)
}

/// `min_π ‖X − Y∘π‖_p` for an entry-wise `p`-norm.
pub fn perm_quotient_lp(x: &PointCloud, y: &PointCloud, p: Norm) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    let n = x.len();
    match p {
        Norm::L1 => {
            let cost = CostMatrix::from_fn(n, |i, j| Norm::L1.of(col_diff(x, y, i, j)));
            DistanceValue::new(assignment::solve_min_sum(&cost).1)
        }
        Norm::L2 => {
            let cost = CostMatrix::from_fn(n, |i, j| col_diff(x, y, i, j).map(|d| d * d).sum());
            DistanceValue::new(assignment::solve_min_sum(&cost).1.max(0.0).sqrt())
        }
        Norm::Inf => perm_quotient_bottleneck(x, y),
    }
}

fn col_diff<'a>(x: &'a PointCloud, y: &'a PointCloud, i: usize, j: usize) -> impl Iterator<Item = f64> + 'a {
    x.point(i).iter().zip(y.point(j)).map(|(a, b)| a - b)
}

/// `min_π max_i ‖X_i − Y_π(i)‖_∞`, the quotient of `ρ_∞` under column permutations.
pub fn perm_quotient_bottleneck(x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    let cost = CostMatrix::from_fn(x.len(), |i, j| chebyshev(x.point(i), y.point(j)));
    DistanceValue::new(assignment::solve_bottleneck(&cost).1)
}

fn check_sign_dim(x: &PointCloud) -> Result<()> {
    if x.dim() > MAX_SIGN_DIM {
        return Err(Error::Size(format!(
            "sign quotient over {} rows exceeds the {MAX_SIGN_DIM}-row limit",
            x.dim()
        )));
    }
    Ok(())
}

/// `min_S ρ(S·X, Y)` over the `2^d` row sign patterns.
///
/// Row-separable bases are minimised one row at a time; the mean-Euclidean
/// base couples rows and is enumerated.
pub fn sign_quotient(x: &PointCloud, y: &PointCloud, base: BaseMetric) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    check_sign_dim(x)?;
    if !base.row_separable() {
        return sign_quotient_exhaustive(x, y, base);
    }
    let row_term = |i: usize, s: f64| -> f64 {
        let d = (0..x.len()).map(|j| s * x.get(i, j) - y.get(i, j));
        match base {
            BaseMetric::Inf | BaseMetric::Lp(Norm::Inf) => Norm::Inf.of(d),
            BaseMetric::Frobenius | BaseMetric::Lp(Norm::L2) => d.map(|v| v * v).sum(),
            BaseMetric::Lp(Norm::L1) => Norm::L1.of(d),
            BaseMetric::MeanEuclidean => unreachable!("not row separable"),
        }
    };
    let best = (0..x.dim()).map(|i| row_term(i, 1.0).min(row_term(i, -1.0)));
    let value = match base {
        BaseMetric::Inf | BaseMetric::Lp(Norm::Inf) => best.fold(0.0, f64::max),
        BaseMetric::Frobenius | BaseMetric::Lp(Norm::L2) => best.sum::<f64>().sqrt(),
        _ => best.sum(),
    };
    DistanceValue::new(value)
}

/// Sign quotient by enumerating all `2^d` patterns.
pub fn sign_quotient_exhaustive(
    x: &PointCloud,
    y: &PointCloud,
    base: BaseMetric,
) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    check_sign_dim(x)?;
    let mut best = f64::INFINITY;
    for k in 0..1u64 << x.dim() {
        let flipped = x.apply_signs(&sign_pattern(x.dim(), k))?;
        best = best.min(base.distance(&flipped, y)?.value());
    }
    DistanceValue::new(best)
}

/// `min_t ‖X − (Y + t·1ᵀ)‖_F`, attained at `t = mean(X) − mean(Y)`.
pub fn translation_quotient(x: &PointCloud, y: &PointCloud) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    dist_frobenius(&canon_centralize(x).cloud, &canon_centralize(y).cloud)
}

/// Exhaustive `min_π ρ(X, Y∘π)` over all `n!` column permutations.
pub fn brute_perm_quotient(x: &PointCloud, y: &PointCloud, base: BaseMetric) -> Result<DistanceValue> {
    x.require_same_shape(y)?;
    let n = x.len();
    if n > MAX_BRUTE_POINTS {
        return Err(Error::Size(format!(
            "brute-force quotient over {n}! permutations (limit n <= {MAX_BRUTE_POINTS})"
        )));
    }
    // Heap's algorithm.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut best = base.distance(x, &y.permute_columns(&perm)?)?.value();
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            let k = if i % 2 == 0 { 0 } else { counters[i] };
            perm.swap(k, i);
            best = best.min(base.distance(x, &y.permute_columns(&perm)?)?.value());
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    DistanceValue::new(best)
}
