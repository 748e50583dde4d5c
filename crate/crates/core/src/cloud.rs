//! Dense `d × n` point clouds. Columns are points.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A `d × n` real matrix whose columns are points, with an optional class label.
///
/// Storage is column-major so that a point is a contiguous slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    len: usize,
    data: Vec<f64>,
    pub label: Option<u32>,
}

impl PointCloud {
    /// Builds a cloud from column-major data (`data[j * d + i]` is row `i` of point `j`).
    pub fn from_column_major(dim: usize, len: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || len == 0 {
            return domain(format!("point cloud must be non-empty, got {dim}x{len}"));
        }
        if data.len() != dim * len {
            return domain(format!(
                "expected {} entries for a {dim}x{len} cloud, got {}",
                dim * len,
                data.len()
            ));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return domain(format!("non-finite coordinate {v}"));
        }
        Ok(Self {
            dim,
            len,
            data,
            label: None,
        })
    }

    /// Builds a cloud from a list of points (the columns).
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        if points.iter().any(|p| p.as_ref().len() != dim) {
            return domain("points have differing dimensions");
        }
        let data = points.iter().flat_map(|p| p.as_ref().iter().copied()).collect();
        Self::from_column_major(dim, points.len(), data)
    }

    /// Builds a cloud from its rows (each row has one entry per point).
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let len = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != len) {
            return domain("rows have differing lengths");
        }
        let mut data = vec![0.0; dim * len];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.as_ref().iter().enumerate() {
                data[j * dim + i] = v;
            }
        }
        Self::from_column_major(dim, len, data)
    }

    pub fn with_label(mut self, label: Option<u32>) -> Self {
        self.label = label;
        self
    }

    /// Number of rows `d`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; clouds hold at least one point.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.dim, self.len)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.dim + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.dim + row] = value;
    }

    #[inline]
    pub fn point(&self, col: usize) -> &[f64] {
        &self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.len).map(|j| self.get(row, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i)).collect()
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }

    /// True when every entry lies in `[0, 1]`.
    pub fn in_unit_cube(&self) -> bool {
        self.data.iter().all(|v| (0.0..=1.0).contains(v))
    }

    /// Returns the cloud whose `j`-th column is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len)?;
        let mut data = Vec::with_capacity(self.data.len());
        for &src in perm {
            data.extend_from_slice(self.point(src));
        }
        Ok(Self {
            dim: self.dim,
            len: self.len,
            data,
            label: self.label,
        })
    }

    /// Multiplies row `i` by `signs[i]`.
    pub fn apply_signs(&self, signs: &[f64]) -> Result<Self> {
        if signs.len() != self.dim {
            return domain(format!("expected {} signs, got {}", self.dim, signs.len()));
        }
        let mut out = self.clone();
        for col in out.data.chunks_exact_mut(self.dim) {
            for (v, s) in col.iter_mut().zip(signs) {
                *v *= s;
            }
        }
        Ok(out)
    }

    /// Adds `shift` to every column.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return domain(format!("expected shift of length {}, got {}", self.dim, shift.len()));
        }
        let mut out = self.clone();
        for col in out.data.chunks_exact_mut(self.dim) {
            for (v, t) in col.iter_mut().zip(shift) {
                *v += t;
            }
        }
        Ok(out)
    }

    /// Column mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.points() {
            for (acc, v) in m.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let n = self.len as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    pub(crate) fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return domain(format!("permutation has length {}, expected {n}", perm.len()));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return domain("not a permutation");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_points_agree() {
        let x = PointCloud::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(x.shape(), (2, 3));
        assert_eq!(x.point(1), &[2.0, 5.0]);
        assert_eq!(x.row(1), vec![4.0, 5.0, 6.0]);
        let y = PointCloud::from_points(&[[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(PointCloud::from_points::<[f64; 2]>(&[]).is_err());
        assert!(PointCloud::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PointCloud::from_column_major(1, 2, vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn permute_checks_input() {
        let x = PointCloud::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(x.permute_columns(&[2, 0, 1]).unwrap().row(0), vec![3.0, 1.0, 2.0]);
        assert!(x.permute_columns(&[0, 0, 1]).is_err());
        assert!(x.permute_columns(&[0, 1]).is_err());
    }
}
