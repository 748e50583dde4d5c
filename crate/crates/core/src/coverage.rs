//! Coverage of a test set by a training set, greedy ε-nets and exact
//! (internal) covering numbers of small point sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::Method;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::metrics::MetricKind;

/// Largest input accepted by [`exact_cover_number`].
pub const MAX_EXACT_POINTS: usize = 20;

/// A named collection of (optionally labelled) clouds with a common `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub items: Vec<PointCloud>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, items: Vec<PointCloud>) -> Result<Self> {
        if let Some(first) = items.first() {
            if items.iter().any(|c| c.dim() != first.dim()) {
                return Err(Error::Domain("dataset items differ in dimension".into()));
            }
        }
        Ok(Self {
            name: name.into(),
            items,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Applies a canonization to every item; labels are kept.
    pub fn canonized(&self, method: Method) -> Result<Self> {
        let items = self
            .items
            .iter()
            .map(|c| method.apply(c).map(|r| r.cloud.with_label(c.label)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: format!("{}+{}", self.name, method.name()),
            items,
        })
    }
}

/// Per-test-item nearest training distances and their mean and max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub metric: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canon: Option<String>,
    pub same_label_only: bool,
    pub q: Vec<f64>,
    pub mean_coverage: f64,
    pub max_coverage: f64,
}

/// For every test item, the distance to its nearest eligible training item.
///
/// With `same_label_only`, a training item is eligible only if it carries the
/// test item's label. Test items are scanned in parallel; the result does not
/// depend on scheduling.
pub fn coverage(
    train: &Dataset,
    test: &Dataset,
    metric: MetricKind,
    same_label_only: bool,
) -> Result<CoverageReport> {
    let q = nearest_distances(train, test, same_label_only, |a, b| {
        metric.distance(a, b).map(|d| d.value())
    })?;
    Ok(report(metric.to_string(), None, same_label_only, q))
}

/// Coverage measured with a base metric after canonizing both sets with `method`.
pub fn canonized_coverage(
    train: &Dataset,
    test: &Dataset,
    method: Method,
    metric: MetricKind,
    same_label_only: bool,
) -> Result<CoverageReport> {
    let train = train.canonized(method)?;
    let test = test.canonized(method)?;
    let mut r = coverage(&train, &test, metric, same_label_only)?;
    r.canon = Some(method.name());
    Ok(r)
}

fn report(metric: String, canon: Option<String>, same_label_only: bool, q: Vec<f64>) -> CoverageReport {
    let mean_coverage = q.iter().sum::<f64>() / q.len().max(1) as f64;
    let max_coverage = q.iter().copied().fold(0.0, f64::max);
    CoverageReport {
        metric,
        canon,
        same_label_only,
        q,
        mean_coverage,
        max_coverage,
    }
}

/// Nearest-neighbour scan with an arbitrary distance.
pub fn nearest_distances<F>(
    train: &Dataset,
    test: &Dataset,
    same_label_only: bool,
    dist: F,
) -> Result<Vec<f64>>
where
    F: Fn(&PointCloud, &PointCloud) -> Result<f64> + Sync,
{
    if train.is_empty() {
        return Err(Error::Domain("training set is empty".into()));
    }
    test.items
        .par_iter()
        .map(|t| {
            let mut best = f64::INFINITY;
            let mut eligible = false;
            for r in &train.items {
                if same_label_only && r.label != t.label {
                    continue;
                }
                eligible = true;
                best = best.min(dist(t, r)?);
            }
            if !eligible {
                return Err(match t.label {
                    Some(l) => Error::LabelCoverage(l),
                    None => Error::Domain("test item has no label".into()),
                });
            }
            Ok(best)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetKind {
    Cover,
    Packing,
    ExactCover,
}

/// Centers picked from the input itself (internal nets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetResult {
    pub center_indices: Vec<usize>,
    pub size: usize,
    pub epsilon: f64,
    pub kind: NetKind,
}

impl NetResult {
    /// True when every point lies within `epsilon` of some center.
    pub fn covers<T>(&self, points: &[T], dist: impl Fn(&T, &T) -> f64) -> bool {
        points.iter().all(|p| {
            self.center_indices
                .iter()
                .any(|&c| dist(p, &points[c]) <= self.epsilon)
        })
    }

    /// True when centers are pairwise more than `epsilon` apart.
    pub fn is_separated<T>(&self, points: &[T], dist: impl Fn(&T, &T) -> f64) -> bool {
        let c = &self.center_indices;
        (0..c.len()).all(|a| (a + 1..c.len()).all(|b| dist(&points[c[a]], &points[c[b]]) > self.epsilon))
    }
}

fn greedy<T>(points: &[T], dist: impl Fn(&T, &T) -> f64, epsilon: f64) -> Vec<usize> {
    let mut centers: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if centers.iter().all(|&c| dist(p, &points[c]) > epsilon) {
            centers.push(i);
        }
    }
    centers
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Single pass in input order: a point becomes a center iff it is farther
/// than `epsilon` from every center so far. The centers cover the input.
pub fn greedy_net<T>(points: &[T], dist: impl Fn(&T, &T) -> f64, epsilon: f64) -> Result<NetResult> {
    check_epsilon(epsilon)?;
    let center_indices = greedy(points, dist, epsilon);
    Ok(NetResult {
        size: center_indices.len(),
        center_indices,
        epsilon,
        kind: NetKind::Cover,
    })
}

/// The same greedy pass read as a maximal `epsilon`-separated set.
pub fn greedy_packing<T>(points: &[T], dist: impl Fn(&T, &T) -> f64, epsilon: f64) -> Result<NetResult> {
    let mut r = greedy_net(points, dist, epsilon)?;
    r.kind = NetKind::Packing;
    Ok(r)
}

/// Minimum number of input points whose closed `epsilon`-balls cover the input.
pub fn exact_cover_number<T>(points: &[T], dist: impl Fn(&T, &T) -> f64, epsilon: f64) -> Result<usize> {
    exact_cover(points, dist, epsilon).map(|r| r.size)
}

/// Exhaustive branch-and-bound set cover with centers drawn from the input.
pub fn exact_cover<T>(points: &[T], dist: impl Fn(&T, &T) -> f64, epsilon: f64) -> Result<NetResult> {
    check_epsilon(epsilon)?;
    let n = points.len();
    if n > MAX_EXACT_POINTS {
        return Err(Error::Size(format!(
            "exact covering number of {n} points (limit {MAX_EXACT_POINTS})"
        )));
    }
    let balls: Vec<u32> = (0..n)
        .map(|c| {
            (0..n)
                .filter(|&p| dist(&points[p], &points[c]) <= epsilon)
                .fold(0u32, |m, p| m | (1 << p))
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    let mut best = greedy(points, &dist, epsilon);
    let mut chosen = Vec::new();
    search(&balls, full, 0, &mut chosen, &mut best);
    Ok(NetResult {
        size: best.len(),
        center_indices: best,
        epsilon,
        kind: NetKind::ExactCover,
    })
}

fn search(balls: &[u32], full: u32, covered: u32, chosen: &mut Vec<usize>, best: &mut Vec<usize>) {
    if covered == full {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    if chosen.len() + 1 >= best.len() {
        return;
    }
    // Branch on the centers able to cover the first uncovered point.
    let target = (!covered & full).trailing_zeros();
    for (c, &ball) in balls.iter().enumerate() {
        if ball & (1 << target) != 0 {
            chosen.push(c);
            search(balls, full, covered | ball, chosen, best);
            chosen.pop();
        }
    }
}
