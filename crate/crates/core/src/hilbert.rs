//! Finite-order Hilbert curves on the dyadic grid of `[0, 1]^d`.
//!
//! The order-`m` curve is a bijection between the `2^(d·m)` equal sub-intervals
//! of `[0, 1]` and the `2^(d·m)` cells of side `2^-m`. Consecutive intervals map
//! to face-adjacent cells, and refining the curve from order `m` to `m + 1`
//! keeps every child interval inside the cell of its parent.
//!
//! Encoding uses Skilling's transpose formulation: the index is stored as `d`
//! words of `m` bits whose interleaving (most significant bit first, axis 0
//! first) gives the curve position. For `d = 2, m = 1` the visiting order is
//! `(0,0) → (0,1) → (1,1) → (1,0)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest supported `d·m`; indices are stored in a `u64`.
pub const MAX_INDEX_BITS: u32 = 62;

/// Curve dimension `d` and order `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertParams {
    dim: u32,
    order: u32,
}

impl HilbertParams {
    pub fn new(dim: usize, order: u32) -> Result<Self> {
        if dim == 0 {
            return domain("Hilbert curve dimension must be at least 1");
        }
        if order == 0 {
            return domain("Hilbert curve order must be at least 1");
        }
        if (dim as u64) * (order as u64) > MAX_INDEX_BITS as u64 {
            return domain(format!(
                "d·m = {}·{} exceeds {MAX_INDEX_BITS} index bits",
                dim, order
            ));
        }
        Ok(Self {
            dim: dim as u32,
            order,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Cells per axis, `2^m`.
    #[inline]
    pub fn side(&self) -> u64 {
        1u64 << self.order
    }

    /// Number of cells (and curve intervals), `2^(d·m)`.
    #[inline]
    pub fn cell_count(&self) -> u64 {
        1u64 << (self.dim * self.order)
    }
}

/// Integer coordinates of a grid cell, each in `[0, 2^m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord(pub Vec<u64>);

impl CellCoord {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    fn validate(&self, params: HilbertParams) -> Result<()> {
        if self.0.len() != params.dim() {
            return domain(format!(
                "cell has {} coordinates, curve dimension is {}",
                self.0.len(),
                params.dim()
            ));
        }
        if let Some(c) = self.0.iter().find(|&&c| c >= params.side()) {
            return domain(format!("cell coordinate {c} outside [0, {})", params.side()));
        }
        Ok(())
    }

    /// L1 distance between two cells of the same grid.
    pub fn l1(&self, other: &Self) -> u64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.abs_diff(*b)).sum()
    }
}

/// Position along the curve, in `[0, 2^(d·m))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HilbertIndex(pub u64);

/// Maps a cell to its curve position.
pub fn encode(params: HilbertParams, cell: &CellCoord) -> Result<HilbertIndex> {
    cell.validate(params)?;
    let mut x = cell.0.clone();
    axes_to_transpose(&mut x, params.order);
    Ok(HilbertIndex(interleave(&x, params.order)))
}

/// Maps a curve position back to its cell.
pub fn decode(params: HilbertParams, index: HilbertIndex) -> Result<CellCoord> {
    if index.0 >= params.cell_count() {
        return domain(format!(
            "index {} outside [0, {})",
            index.0,
            params.cell_count()
        ));
    }
    let mut x = deinterleave(index.0, params.dim(), params.order);
    transpose_to_axes(&mut x, params.order);
    Ok(CellCoord(x))
}

/// The grid cell containing `point`; coordinates equal to 1 fall in the last cell.
pub fn cell_of(params: HilbertParams, point: &[f64]) -> Result<CellCoord> {
    if point.len() != params.dim() {
        return domain(format!(
            "point has {} coordinates, curve dimension is {}",
            point.len(),
            params.dim()
        ));
    }
    let side = params.side();
    let scale = side as f64;
    point
        .iter()
        .map(|&v| {
            if !(0.0..=1.0).contains(&v) {
                return domain(format!("coordinate {v} outside [0, 1]"));
            }
            // v·2^m is exact, so floor is exact as well.
            Ok(((v * scale).floor() as u64).min(side - 1))
        })
        .collect::<Result<Vec<_>>>()
        .map(CellCoord)
}

/// Centroid of a cell, `(2c + 1) / 2^(m+1)` per axis.
pub fn centroid(params: HilbertParams, cell: &CellCoord) -> Result<Vec<f64>> {
    cell.validate(params)?;
    let denom = (params.side() * 2) as f64;
    Ok(cell.0.iter().map(|&c| (2 * c + 1) as f64 / denom).collect())
}

/// Centroid of the `index`-th curve interval in `[0, 1]`.
pub fn interval_centroid(params: HilbertParams, index: HilbertIndex) -> Result<f64> {
    if index.0 >= params.cell_count() {
        return domain(format!("index {} outside curve range", index.0));
    }
    Ok((2 * index.0 + 1) as f64 / (2 * params.cell_count()) as f64)
}

/// Curve position of the cell containing `point`.
pub fn index_of_point(params: HilbertParams, point: &[f64]) -> Result<HilbertIndex> {
    let cell = cell_of(params, point)?;
    encode(params, &cell)
}

fn axes_to_transpose(x: &mut [u64], order: u32) {
    let n = x.len();
    let top = 1u64 << (order - 1);

    let mut q = top;
    while q > 1 {
        let p = q - 1;
        for i in 0..n {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q >>= 1;
    }

    for i in 1..n {
        x[i] ^= x[i - 1];
    }
    let mut t = 0;
    let mut q = top;
    while q > 1 {
        if x[n - 1] & q != 0 {
            t ^= q - 1;
        }
        q >>= 1;
    }
    for v in x.iter_mut() {
        *v ^= t;
    }
}

fn transpose_to_axes(x: &mut [u64], order: u32) {
    let n = x.len();
    let end = 2u64 << (order - 1);

    let t = x[n - 1] >> 1;
    for i in (1..n).rev() {
        x[i] ^= x[i - 1];
    }
    x[0] ^= t;

    let mut q = 2;
    while q != end {
        let p = q - 1;
        for i in (0..n).rev() {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q <<= 1;
    }
}

fn interleave(x: &[u64], order: u32) -> u64 {
    let mut index = 0u64;
    for bit in (0..order).rev() {
        for &word in x {
            index = (index << 1) | ((word >> bit) & 1);
        }
    }
    index
}

fn deinterleave(index: u64, dim: usize, order: u32) -> Vec<u64> {
    let mut x = vec![0u64; dim];
    let total = dim as u32 * order;
    for pos in 0..total {
        // pos counts from the most significant interleaved bit.
        let bit = (index >> (total - 1 - pos)) & 1;
        let axis = pos as usize % dim;
        let level = order - 1 - pos / dim as u32;
        x[axis] |= bit << level;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize, m: u32) -> HilbertParams {
        HilbertParams::new(d, m).unwrap()
    }

    #[test]
    fn one_dimension_is_identity() {
        assert_eq!(encode(p(1, 3), &CellCoord(vec![5])).unwrap(), HilbertIndex(5));
        assert_eq!(decode(p(1, 4), HilbertIndex(9)).unwrap(), CellCoord(vec![9]));
        for k in 0..1u64 << 6 {
            assert_eq!(encode(p(1, 6), &CellCoord(vec![k])).unwrap().0, k);
        }
    }

    #[test]
    fn first_order_plane_curve_is_pinned() {
        let cells: Vec<_> = (0..4)
            .map(|k| decode(p(2, 1), HilbertIndex(k)).unwrap().0)
            .collect();
        assert_eq!(cells, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn round_trip_d3_m2() {
        for k in 0..1 << 6 {
            let c = decode(p(3, 2), HilbertIndex(k)).unwrap();
            assert_eq!(encode(p(3, 2), &c).unwrap(), HilbertIndex(k));
        }
    }

    #[test]
    fn plane_m2_visits_every_cell_once() {
        let mut seen = [[false; 4]; 4];
        for k in 0..16 {
            let c = decode(p(2, 2), HilbertIndex(k)).unwrap();
            let (x, y) = (c.0[0] as usize, c.0[1] as usize);
            assert!(!seen[x][y]);
            seen[x][y] = true;
        }
        assert!(seen.iter().flatten().all(|&s| s));
    }

    #[test]
    fn plane_m3_consecutive_cells_adjacent() {
        let params = p(2, 3);
        for k in 0..params.cell_count() - 1 {
            let a = decode(params, HilbertIndex(k)).unwrap();
            let b = decode(params, HilbertIndex(k + 1)).unwrap();
            assert_eq!(a.l1(&b), 1, "k = {k}");
        }
    }

    #[test]
    fn cell_of_examples() {
        assert_eq!(cell_of(p(2, 2), &[0.0, 0.0]).unwrap().0, vec![0, 0]);
        assert_eq!(cell_of(p(2, 2), &[1.0, 0.3]).unwrap().0, vec![3, 1]);
        assert_eq!(cell_of(p(1, 3), &[0.5]).unwrap().0, vec![4]);
        assert!(cell_of(p(1, 3), &[1.2]).is_err());
        assert!(cell_of(p(1, 3), &[-0.1]).is_err());
        assert!(cell_of(p(2, 3), &[0.1]).is_err());
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(centroid(p(2, 1), &CellCoord(vec![0, 0])).unwrap(), vec![0.25, 0.25]);
        assert_eq!(centroid(p(1, 2), &CellCoord(vec![3])).unwrap(), vec![0.875]);
        let params = p(3, 2);
        for k in 0..params.cell_count() {
            let c = decode(params, HilbertIndex(k)).unwrap();
            let x = centroid(params, &c).unwrap();
            assert!(x.iter().all(|&v| v > 0.0 && v < 1.0));
            assert_eq!(cell_of(params, &x).unwrap(), c);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(HilbertParams::new(0, 1).is_err());
        assert!(HilbertParams::new(2, 0).is_err());
        assert!(HilbertParams::new(3, 21).is_err());
        assert!(HilbertParams::new(2, 31).is_ok());
        assert!(HilbertParams::new(1, 62).is_ok());
        assert!(encode(p(2, 2), &CellCoord(vec![4, 0])).is_err());
        assert!(encode(p(2, 2), &CellCoord(vec![1])).is_err());
        assert!(decode(p(2, 2), HilbertIndex(16)).is_err());
    }

    #[test]
    fn wide_index_round_trips() {
        let params = p(2, 31);
        let cell = CellCoord(vec![(1 << 31) - 1, 12345]);
        let k = encode(params, &cell).unwrap();
        assert_eq!(decode(params, k).unwrap(), cell);
    }
}
