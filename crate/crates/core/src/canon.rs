//! Canonization maps: each returns a representative of the input's orbit that
//! is constant on the orbit, together with the group element that produced it.
//!
//! Permutation canonizations act on the columns of a [`PointCloud`], sign
//! canonizations on its rows, and centralization by translating every column.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{domain, Error, Result};
use crate::hilbert::{self, HilbertParams};

/// Largest `d` for which sign orbits are enumerated.
pub const MAX_SIGN_DIM: usize = 20;

/// Largest `d` accepted by [`pca_align`].
pub const MAX_PCA_DIM: usize = 8;

/// A canonical representative and the group element applied to reach it.
///
/// The element is applied as: permute columns, then multiply rows by `signs`,
/// then subtract `shift` from every column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonResult {
    pub cloud: PointCloud,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<f64>>,
}

impl CanonResult {
    /// Re-applies the recorded group element to `input`.
    pub fn apply_to(&self, input: &PointCloud) -> Result<PointCloud> {
        let mut out = input.clone();
        if let Some(perm) = &self.perm {
            out = out.permute_columns(perm)?;
        }
        if let Some(signs) = &self.signs {
            out = out.apply_signs(signs)?;
        }
        if let Some(shift) = &self.shift {
            let neg: Vec<f64> = shift.iter().map(|t| -t).collect();
            out = out.translate(&neg)?;
        }
        Ok(out)
    }

    fn permuted(input: &PointCloud, perm: Vec<usize>) -> Result<Self> {
        Ok(Self {
            cloud: input.permute_columns(&perm)?,
            perm: Some(perm),
            signs: None,
            shift: None,
        })
    }
}

/// `|t|`, the canonization of `{-1, 1}` acting on the reals.
#[inline]
pub fn canon_abs(t: f64) -> f64 {
    t.abs()
}

/// Sign canonization with a jump at `|t| = 1/2`: `|t|` above it, `-|t|` at or below.
#[inline]
pub fn canon_c1(t: f64) -> f64 {
    if t.abs() > 0.5 {
        t.abs()
    } else {
        -t.abs()
    }
}

/// An exact rational, optionally standing in for an irrational number.
///
/// Floating-point values carry no meaningful notion of rationality, so the
/// everywhere-discontinuous sign canonization works on this symbolic type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactValue {
    pub numer: i64,
    pub denom: u64,
    pub irrational: bool,
}

impl ExactValue {
    pub fn rational(numer: i64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return domain("zero denominator");
        }
        Ok(Self {
            numer,
            denom,
            irrational: false,
        })
    }

    pub fn irrational(numer: i64, denom: u64) -> Result<Self> {
        Ok(Self {
            irrational: true,
            ..Self::rational(numer, denom)?
        })
    }

    pub fn to_f64(self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    pub fn neg(self) -> Self {
        Self {
            numer: -self.numer,
            ..self
        }
    }
}

/// `|t|` for rationals, `-|t|` for values flagged irrational.
pub fn canon_cinf(t: ExactValue) -> ExactValue {
    let mag = t.numer.unsigned_abs() as i64;
    ExactValue {
        numer: if t.irrational { -mag } else { mag },
        ..t
    }
}

/// Ascending sort, the isometric canonization of `S_n` acting on `R^n`.
pub fn canon_sort(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    out.sort_by(f64::total_cmp);
    out
}

/// Translates the cloud so its columns sum to zero; `shift` is the input mean.
pub fn canon_centralize(x: &PointCloud) -> CanonResult {
    let shift = x.mean();
    let neg: Vec<f64> = shift.iter().map(|t| -t).collect();
    CanonResult {
        cloud: x.translate(&neg).expect("mean has one entry per row"),
        perm: None,
        signs: None,
        shift: Some(shift),
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Orders columns lexicographically: row 0 first, later rows break ties,
/// identical columns keep their input order.
pub fn canon_lexsort(x: &PointCloud) -> CanonResult {
    let mut perm: Vec<usize> = (0..x.len()).collect();
    perm.sort_by(|&a, &b| lex_cmp(x.point(a), x.point(b)));
    CanonResult::permuted(x, perm).expect("sort yields a permutation")
}

/// Hilbert-curve canonization of order `m`.
///
/// Columns are sorted by the curve index of the grid cell they fall in;
/// columns sharing a cell are ordered lexicographically, then by input index.
/// The permutation is applied to the original, unrounded columns.
pub fn canon_hilbert(x: &PointCloud, order: u32) -> Result<CanonResult> {
    let params = HilbertParams::new(x.dim(), order)?;
    if !x.in_unit_cube() {
        return domain("Hilbert canonization requires all entries in [0, 1]");
    }
    let keys = x
        .points()
        .map(|p| hilbert::index_of_point(params, p))
        .collect::<Result<Vec<_>>>()?;
    let mut perm: Vec<usize> = (0..x.len()).collect();
    perm.sort_by(|&a, &b| {
        keys[a]
            .cmp(&keys[b])
            .then_with(|| lex_cmp(x.point(a), x.point(b)))
    });
    CanonResult::permuted(x, perm)
}

/// Replaces every column by the centroid of its order-`m` grid cell.
pub fn round_to_grid(x: &PointCloud, order: u32) -> Result<PointCloud> {
    let params = HilbertParams::new(x.dim(), order)?;
    let mut data = Vec::with_capacity(x.dim() * x.len());
    for p in x.points() {
        let cell = hilbert::cell_of(params, p)?;
        data.extend(hilbert::centroid(params, &cell)?);
    }
    Ok(PointCloud::from_column_major(x.dim(), x.len(), data)?.with_label(x.label))
}

/// Negates each row whose third moment is negative. Rows with zero third
/// moment keep sign `+1`.
pub fn canon_skewness_sign(x: &PointCloud) -> CanonResult {
    let signs: Vec<f64> = (0..x.dim())
        .map(|i| {
            let m3: f64 = (0..x.len()).map(|j| x.get(i, j).powi(3)).sum();
            if m3 < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    CanonResult {
        cloud: x.apply_signs(&signs).expect("one sign per row"),
        perm: None,
        signs: Some(signs),
        shift: None,
    }
}

/// Sign pattern number `k` of the binary counter: row `i` is negated iff bit `i` is set.
pub fn sign_pattern(dim: usize, k: u64) -> Vec<f64> {
    (0..dim)
        .map(|i| if (k >> i) & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// All `2^d` row-sign flips of `x`; element 0 is `x` itself.
pub fn sign_orbit(x: &PointCloud) -> Result<Vec<PointCloud>> {
    if x.dim() > MAX_SIGN_DIM {
        return Err(Error::Size(format!(
            "sign orbit of a {}-row cloud exceeds 2^{MAX_SIGN_DIM} elements",
            x.dim()
        )));
    }
    (0..1u64 << x.dim())
        .map(|k| x.apply_signs(&sign_pattern(x.dim(), k)))
        .collect()
}

/// A PCA-aligned cloud and the orthogonal frame used to align it.
#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub cloud: PointCloud,
    /// Rows are the principal axes, in order of decreasing variance.
    pub frame: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
    pub shift: Vec<f64>,
}

/// Centers the cloud and rotates it into the eigenbasis of its covariance,
/// with variances in decreasing order. Unique only up to a sign per axis.
pub fn pca_align(x: &PointCloud) -> Result<Aligned> {
    let d = x.dim();
    if d > MAX_PCA_DIM {
        return Err(Error::Size(format!("PCA alignment supports d <= {MAX_PCA_DIM}, got {d}")));
    }
    let centered = canon_centralize(x);
    let c = &centered.cloud;
    let n = c.len() as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for p in c.points() {
        for i in 0..d {
            for j in 0..=i {
                cov[i][j] += p[i] * p[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }

    let (values, vectors) = jacobi_eigen(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let variances: Vec<f64> = order.iter().map(|&k| values[k]).collect();

    let scale = variances.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for w in variances.windows(2) {
        if (w[0] - w[1]).abs() <= 1e-6 * scale {
            return Err(Error::DegenerateSpectrum(w[0], w[1]));
        }
    }

    let frame: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..d).map(|i| vectors[i][k]).collect())
        .collect();
    let mut data = Vec::with_capacity(d * c.len());
    for p in c.points() {
        data.extend(frame.iter().map(|axis| axis.iter().zip(p).map(|(a, v)| a * v).sum::<f64>()));
    }
    Ok(Aligned {
        cloud: PointCloud::from_column_major(d, c.len(), data)?.with_label(x.label),
        frame,
        variances,
        shift: centered.shift.unwrap_or_default(),
    })
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
///
/// Returns the eigenvalues and a matrix whose columns are the eigenvectors.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let total: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// PCA alignment followed by the third-moment sign fix.
pub fn canon_pca_skew(x: &PointCloud) -> Result<(Aligned, CanonResult)> {
    let aligned = pca_align(x)?;
    let signed = canon_skewness_sign(&aligned.cloud);
    Ok((aligned, signed))
}

/// Permutation and sign canonizations selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Sort,
    Lexsort,
    Hilbert(u32),
    Centralize,
    PcaSkew,
}

impl Method {
    /// Canonizes a point cloud. `Sort` requires a single row.
    pub fn apply(self, x: &PointCloud) -> Result<CanonResult> {
        match self {
            Method::Sort => {
                if x.dim() != 1 {
                    return domain("sort canonizes one-row clouds; use lexsort or hilbert");
                }
                // Single-row lexsort is exactly an ascending sort of the row.
                Ok(canon_lexsort(x))
            }
            Method::Lexsort => Ok(canon_lexsort(x)),
            Method::Hilbert(m) => canon_hilbert(x, m),
            Method::Centralize => Ok(canon_centralize(x)),
            Method::PcaSkew => canon_pca_skew(x).map(|(_, r)| r),
        }
    }

    pub fn name(self) -> String {
        match self {
            Method::Sort => "sort".into(),
            Method::Lexsort => "lexsort".into(),
            Method::Hilbert(m) => format!("hilbert({m})"),
            Method::Centralize => "centralize".into(),
            Method::PcaSkew => "pca-skew".into(),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sort" => Ok(Method::Sort),
            "lexsort" => Ok(Method::Lexsort),
            "centralize" => Ok(Method::Centralize),
            "pca-skew" => Ok(Method::PcaSkew),
            _ => {
                let m = s
                    .strip_prefix("hilbert")
                    .map(|r| r.trim_start_matches(['(', ':', '=']).trim_end_matches(')'))
                    .and_then(|r| r.parse::<u32>().ok());
                match m {
                    Some(m) => Ok(Method::Hilbert(m)),
                    None => domain(format!("unknown canonization '{s}'")),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(rows: &[&[f64]]) -> PointCloud {
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn abs_and_c1() {
        assert_eq!(canon_abs(-0.7), 0.7);
        assert_eq!(canon_abs(0.0), 0.0);
        assert_eq!(canon_c1(0.3), -0.3);
        assert_eq!(canon_c1(-0.7), 0.7);
        assert_eq!(canon_c1(0.5), -0.5);
        assert_eq!(canon_c1(-0.5), -0.5);
    }

    #[test]
    fn cinf_examples() {
        let q = ExactValue::rational(3, 4).unwrap();
        assert_eq!(canon_cinf(q), q);
        assert_eq!(canon_cinf(q.neg()), q);
        let r = ExactValue::irrational(-141, 100).unwrap();
        assert_eq!(canon_cinf(r).numer, -141);
        assert_eq!(canon_cinf(r.neg()).numer, -141);
        let z = ExactValue::rational(0, 1).unwrap();
        assert_eq!(canon_cinf(z), z);
        assert!(ExactValue::rational(1, 0).is_err());
    }

    #[test]
    fn sort_examples() {
        assert_eq!(canon_sort(&[3.0, 1.0, 2.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(canon_sort(&[5.0, 5.0, 1.0]), vec![1.0, 5.0, 5.0]);
    }

    #[test]
    fn centralize_examples() {
        let r = canon_centralize(&cloud(&[&[1.0, 3.0]]));
        assert_eq!(r.cloud.row(0), vec![-1.0, 1.0]);
        assert_eq!(r.shift, Some(vec![2.0]));
        let c = cloud(&[&[-1.0, 1.0], &[2.0, -2.0]]);
        let r = canon_centralize(&c);
        assert_eq!(r.cloud, c);
        assert_eq!(r.shift, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn lexsort_example() {
        let x = cloud(&[&[0.5, 0.2, 0.2], &[0.1, 0.9, 0.3]]);
        let r = canon_lexsort(&x);
        assert_eq!(r.cloud, cloud(&[&[0.2, 0.2, 0.5], &[0.3, 0.9, 0.1]]));
        assert_eq!(r.perm, Some(vec![2, 1, 0]));
        assert_eq!(r.apply_to(&x).unwrap(), r.cloud);
    }

    #[test]
    fn lexsort_identical_columns_keep_order() {
        let x = cloud(&[&[0.4, 0.1, 0.4], &[0.2, 0.0, 0.2]]);
        assert_eq!(canon_lexsort(&x).perm, Some(vec![1, 0, 2]));
    }

    #[test]
    fn hilbert_rejects_outside_unit_cube() {
        assert!(canon_hilbert(&cloud(&[&[0.2, 1.5]]), 3).is_err());
        assert!(canon_hilbert(&cloud(&[&[0.2, 0.5]]), 0).is_err());
    }

    #[test]
    fn hilbert_orders_by_curve_then_lex() {
        // d=2, m=1 visits (0,0), (0,1), (1,1), (1,0).
        let x = PointCloud::from_points(&[[0.9, 0.1], [0.1, 0.1], [0.9, 0.9], [0.1, 0.9], [0.05, 0.2]])
            .unwrap();
        let r = canon_hilbert(&x, 1).unwrap();
        assert_eq!(r.perm, Some(vec![4, 1, 3, 2, 0]));
    }

    #[test]
    fn skewness_examples() {
        let r = canon_skewness_sign(&cloud(&[&[-1.0, -1.0, 2.0]]));
        assert_eq!(r.signs, Some(vec![1.0]));
        let r = canon_skewness_sign(&cloud(&[&[1.0, 1.0, -2.0]]));
        assert_eq!(r.cloud.row(0), vec![-1.0, -1.0, 2.0]);
        assert_eq!(r.signs, Some(vec![-1.0]));
        let r = canon_skewness_sign(&cloud(&[&[-1.0, 0.0, 1.0]]));
        assert_eq!(r.signs, Some(vec![1.0]));
    }

    #[test]
    fn sign_orbit_examples() {
        let x = cloud(&[&[1.0, 2.0]]);
        let orbit = sign_orbit(&x).unwrap();
        assert_eq!(orbit, vec![x.clone(), cloud(&[&[-1.0, -2.0]])]);
        assert_eq!(sign_orbit(&cloud(&[&[1.0], &[2.0]])).unwrap().len(), 4);
        let big = PointCloud::from_column_major(21, 1, vec![0.0; 21]).unwrap();
        assert!(matches!(sign_orbit(&big), Err(Error::Size(_))));
    }

    #[test]
    fn pca_axis_aligned_is_fixed_up_to_sign() {
        let x = cloud(&[&[-3.0, 3.0, 0.0, 0.0], &[0.0, 0.0, -1.0, 1.0]]);
        let a = pca_align(&x).unwrap();
        for i in 0..2 {
            let s = a.frame[i][i].signum();
            assert!((a.frame[i][i].abs() - 1.0).abs() < 1e-12);
            for j in 0..4 {
                assert!((a.cloud.get(i, j) - s * x.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(a.variances[0] > a.variances[1]);
    }

    #[test]
    fn pca_equal_variances_is_degenerate() {
        let x = cloud(&[&[-1.0, 1.0, 0.0, 0.0], &[0.0, 0.0, -1.0, 1.0]]);
        assert!(matches!(pca_align(&x), Err(Error::DegenerateSpectrum(..))));
    }

    #[test]
    fn pca_rejects_high_dimension() {
        let x = PointCloud::from_column_major(9, 2, (0..18).map(f64::from).collect()).unwrap();
        assert!(matches!(pca_align(&x), Err(Error::Size(_))));
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = vec![vec![4.0, 1.0, 2.0], vec![1.0, 3.0, 0.5], vec![2.0, 0.5, 1.0]];
        let (vals, vecs) = jacobi_eigen(a.clone());
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i][j] * vecs[j][k]).sum();
                assert!((av - vals[k] * vecs[i][k]).abs() < 1e-10);
            }
        }
        assert!((vals.iter().sum::<f64>() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("hilbert(6)".parse::<Method>().unwrap(), Method::Hilbert(6));
        assert_eq!("hilbert:3".parse::<Method>().unwrap(), Method::Hilbert(3));
        assert_eq!("pca-skew".parse::<Method>().unwrap(), Method::PcaSkew);
        assert!("bogus".parse::<Method>().is_err());
        assert!(Method::Sort.apply(&cloud(&[&[1.0], &[2.0]])).is_err());
    }
}
