#![allow(dead_code)]

use canon_core::PointCloud;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform cloud in `[0,1]^(d×n)`.
pub fn unit_cloud(rng: &mut impl Rng, d: usize, n: usize) -> PointCloud {
    let data = (0..d * n).map(|_| rng.random::<f64>()).collect();
    PointCloud::from_column_major(d, n, data).unwrap()
}

/// Cloud on a coarse grid so that ties between entries are common.
pub fn tie_heavy_cloud(rng: &mut impl Rng, d: usize, n: usize) -> PointCloud {
    let data = (0..d * n).map(|_| rng.random_range(0..4) as f64 / 4.0).collect();
    PointCloud::from_column_major(d, n, data).unwrap()
}

/// Cloud with entries in `[-1, 1]`.
pub fn signed_cloud(rng: &mut impl Rng, d: usize, n: usize) -> PointCloud {
    let data = (0..d * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    PointCloud::from_column_major(d, n, data).unwrap()
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_signs(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Sorted list of columns, for multiset comparison.
pub fn column_multiset(x: &PointCloud) -> Vec<Vec<u64>> {
    let mut cols: Vec<Vec<u64>> = x.points().map(|p| p.iter().map(|v| v.to_bits()).collect()).collect();
    cols.sort();
    cols
}

/// Every permutation of `0..n`, by recursion.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
