//! Seeded synthetic point-cloud datasets and the unit-cube normalization used
//! for externally supplied clouds.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{domain, Result};

/// Gaussian clusters of point clouds in `[0,1]^(d×n)`.
///
/// Each cluster has a template cloud with points drawn uniformly from
/// `[0.15, 0.85]^d`. An item is its cluster's template plus independent
/// `N(0, sigma²)` noise per entry, clamped to `[0, 1]`, with its columns shuffled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub clusters: usize,
    pub per_cluster: usize,
    pub dim: usize,
    pub points: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            clusters: 3,
            per_cluster: 100,
            dim: 3,
            points: 32,
            sigma: 0.05,
            seed: 0,
        }
    }
}

/// Generates `clusters × per_cluster` labelled clouds, cluster by cluster.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<PointCloud>> {
    if cfg.clusters == 0 || cfg.per_cluster == 0 || cfg.dim == 0 || cfg.points == 0 {
        return domain("cluster count, cluster size, d and n must all be positive");
    }
    if !(cfg.sigma >= 0.0) || !cfg.sigma.is_finite() {
        return domain(format!("sigma must be a finite non-negative number, got {}", cfg.sigma));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.sigma).expect("sigma validated above");
    let len = cfg.dim * cfg.points;

    let mut out = Vec::with_capacity(cfg.clusters * cfg.per_cluster);
    for label in 0..cfg.clusters {
        let template: Vec<f64> = (0..len).map(|_| rng.random_range(0.15..0.85)).collect();
        for _ in 0..cfg.per_cluster {
            let data: Vec<f64> = template
                .iter()
                .map(|&v| (v + noise.sample(&mut rng)).clamp(0.0, 1.0))
                .collect();
            let cloud = PointCloud::from_column_major(cfg.dim, cfg.points, data)?;
            let mut perm: Vec<usize> = (0..cfg.points).collect();
            perm.shuffle(&mut rng);
            out.push(cloud.permute_columns(&perm)?.with_label(Some(label as u32)));
        }
    }
    Ok(out)
}

/// Shuffles `items` with `seed` and splits off `train` and `test` items.
pub fn train_test_split<T>(mut items: Vec<T>, train: usize, test: usize, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if train + test > items.len() {
        return domain(format!(
            "requested {train} + {test} items from a pool of {}",
            items.len()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    items.shuffle(&mut rng);
    let test_items = items.split_off(train);
    Ok((items, test_items.into_iter().take(test).collect()))
}

/// Preprocessing applied to raw clouds before they enter a dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    /// Keep this many points, chosen uniformly without replacement.
    #[serde(default)]
    pub sample_n: Option<usize>,
    /// Shift every axis so its minimum is zero.
    #[serde(default)]
    pub shift_positive: bool,
    /// Divide all entries by the largest extent over the axes.
    #[serde(default)]
    pub divide_max_axis: bool,
}

/// Subsample, shift to the positive orthant and scale into `[0,1]`.
pub fn normalize(cloud: &PointCloud, norm: &Normalization, rng: &mut impl Rng) -> Result<PointCloud> {
    let mut out = match norm.sample_n {
        Some(k) if k > cloud.len() => {
            return domain(format!("cannot sample {k} points from a cloud of {}", cloud.len()));
        }
        Some(0) => return domain("sample size must be positive"),
        Some(k) => {
            let mut picked = index::sample(rng, cloud.len(), k).into_vec();
            picked.sort_unstable();
            let data = picked.iter().flat_map(|&j| cloud.point(j).iter().copied()).collect();
            PointCloud::from_column_major(cloud.dim(), k, data)?.with_label(cloud.label)
        }
        None => cloud.clone(),
    };
    if norm.shift_positive {
        let mins: Vec<f64> = (0..out.dim())
            .map(|i| (0..out.len()).map(|j| out.get(i, j)).fold(f64::INFINITY, f64::min))
            .collect();
        let neg: Vec<f64> = mins.iter().map(|m| -m).collect();
        out = out.translate(&neg)?;
    }
    if norm.divide_max_axis {
        let extent = out.values().fold(0.0f64, |m, v| m.max(v.abs()));
        if extent > 0.0 {
            let data = out.values().map(|v| v / extent).collect();
            out = PointCloud::from_column_major(out.dim(), out.len(), data)?.with_label(out.label);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let cfg = SynthConfig {
            clusters: 2,
            per_cluster: 4,
            dim: 3,
            points: 5,
            sigma: 0.3,
            seed: 11,
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert!(a.iter().all(|c| c.shape() == (3, 5) && c.in_unit_cube()));
        assert_eq!(a[0].label, Some(0));
        assert_eq!(a[7].label, Some(1));
        let c = generate(&SynthConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_sizes() {
        let items = generate(&SynthConfig {
            per_cluster: 10,
            ..Default::default()
        })
        .unwrap();
        let (tr, te) = train_test_split(items.clone(), 20, 10, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (20, 10));
        assert!(train_test_split(items, 25, 10, 1).is_err());
    }

    #[test]
    fn normalization_lands_in_unit_cube() {
        let x = PointCloud::from_rows(&[[-2.0, 0.0, 4.0, 1.0], [10.0, 11.0, 12.0, 10.5]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let norm = Normalization {
            sample_n: Some(3),
            shift_positive: true,
            divide_max_axis: true,
        };
        let y = normalize(&x, &norm, &mut rng).unwrap();
        assert_eq!(y.shape(), (2, 3));
        assert!(y.in_unit_cube());
        assert!(y.values().any(|v| v == 1.0));
        let too_many = Normalization {
            sample_n: Some(5),
            ..norm
        };
        assert!(normalize(&x, &too_many, &mut rng).is_err());
    }
}
