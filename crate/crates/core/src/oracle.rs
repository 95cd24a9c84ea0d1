//! Independent checks for the closed forms and for the clustering algorithm.
//!
//! [`mc_moments`] samples balls and half balls with a method unrelated to the
//! one in [`crate::synth`]: rejection from the bounding cube in up to three
//! dimensions, and otherwise the first `d` coordinates of a uniform point on
//! the unit sphere in `d + 2` dimensions (which is exactly uniform in the
//! d-ball).
//!
//! [`brute_force_kmeans`] enumerates every partition of a tiny dataset into
//! exactly k blocks as restricted growth strings.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::clustering::{sq_dist, Dataset};
use crate::error::{invalid, Error, Result};
use crate::synth::stream_rng;

const SHARDS: usize = 16;
pub const MIN_SAMPLES: usize = 1_000;
pub const MAX_BRUTE_FORCE_POINTS: usize = 12;
pub const MAX_BRUTE_FORCE_K: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentShape {
    Sphere,
    /// The half `x_0 >= 0`.
    HalfSphere,
}

/// Per-point Monte Carlo moments with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub samples: usize,
    /// Mean of `x_0`, the coordinate across the flat face of a half ball.
    pub mean_offset: f64,
    pub mean_offset_se: f64,
    /// Mean squared distance to the empirical centroid.
    pub mean_sq_dev: f64,
    pub mean_sq_dev_se: f64,
}

fn unit_ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, out: &mut [f64]) {
    if dim <= 3 {
        loop {
            let mut r2 = 0.0;
            for x in out.iter_mut() {
                *x = rng.random_range(-1.0..1.0);
                r2 += *x * *x;
            }
            if r2 <= 1.0 {
                return;
            }
        }
    }
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm2 += *x * *x;
        }
        for _ in 0..2 {
            let z: f64 = rng.sample(StandardNormal);
            norm2 += z * z;
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Monte Carlo estimate of the per-point moments of a ball or half ball.
pub fn mc_moments(
    dim: usize,
    radius: f64,
    shape: MomentShape,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if dim == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    if samples < MIN_SAMPLES {
        return Err(invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let shard_sizes: Vec<usize> = (0..SHARDS)
        .map(|s| samples / SHARDS + usize::from(s < samples % SHARDS))
        .collect();
    let shards: Vec<Vec<f64>> = shard_sizes
        .par_iter()
        .enumerate()
        .map(|(s, &n)| {
            let mut rng = stream_rng(seed, s as u64);
            let mut pts = vec![0.0; n * dim];
            for p in pts.chunks_exact_mut(dim) {
                unit_ball_point(&mut rng, dim, p);
                if shape == MomentShape::HalfSphere {
                    p[0] = p[0].abs();
                }
                p.iter_mut().for_each(|x| *x *= radius);
            }
            pts
        })
        .collect();
    let pts: Vec<f64> = shards.concat();
    let n = samples as f64;

    let mut centroid = vec![0.0; dim];
    for p in pts.chunks_exact(dim) {
        centroid.iter_mut().zip(p).for_each(|(c, x)| *c += x);
    }
    centroid.iter_mut().for_each(|c| *c /= n);

    let (mean_offset, mean_offset_se) = mean_and_se(pts.chunks_exact(dim).map(|p| p[0]), n);
    let (mean_sq_dev, mean_sq_dev_se) =
        mean_and_se(pts.chunks_exact(dim).map(|p| sq_dist(p, &centroid)), n);
    Ok(MomentEstimate {
        samples,
        mean_offset,
        mean_offset_se,
        mean_sq_dev,
        mean_sq_dev_se,
    })
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Exact k-means optimum of a tiny instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub min_error: f64,
    /// Optimal labels as a restricted growth string (first point in block 0).
    pub labels: Vec<usize>,
    /// Number of partitions examined, the Stirling number S(N, k).
    pub partitions: u64,
}

/// Exhaustive search over all partitions into exactly `k` non-empty blocks.
pub fn brute_force_kmeans(data: &Dataset, k: usize) -> Result<BruteForce> {
    let n = data.len();
    if n > MAX_BRUTE_FORCE_POINTS || k > MAX_BRUTE_FORCE_K {
        return Err(Error::InstanceTooLarge { points: n, k });
    }
    if k == 0 || k > n {
        return Err(invalid(format!("k must be in 1..={n}, got {k}")));
    }
    let mut search = Search {
        data,
        k,
        labels: vec![0; n],
        best: f64::INFINITY,
        best_labels: Vec::new(),
        partitions: 0,
    };
    search.descend(0, 0);
    let min_error = partition_error(data, &search.best_labels, k);
    Ok(BruteForce {
        min_error,
        labels: search.best_labels,
        partitions: search.partitions,
    })
}

struct Search<'a> {
    data: &'a Dataset,
    k: usize,
    labels: Vec<usize>,
    best: f64,
    best_labels: Vec<usize>,
    partitions: u64,
}

impl Search<'_> {
    /// `used` blocks are open among the first `i` points.
    fn descend(&mut self, i: usize, used: usize) {
        let n = self.labels.len();
        if i == n {
            if used == self.k {
                self.partitions += 1;
                let e = partition_error(self.data, &self.labels, self.k);
                if e < self.best {
                    self.best = e;
                    self.best_labels = self.labels.clone();
                }
            }
            return;
        }
        // not enough points left to open the missing blocks
        if used + (n - i) < self.k {
            return;
        }
        for b in 0..used.min(self.k) {
            self.labels[i] = b;
            self.descend(i + 1, used);
        }
        if used < self.k {
            self.labels[i] = used;
            self.descend(i + 1, used + 1);
        }
    }
}

/// Two-pass within-cluster sum of squares.
fn partition_error(data: &Dataset, labels: &[usize], k: usize) -> f64 {
    let dim = data.dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in data.points().zip(labels) {
        counts[l] += 1;
        sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
    }
    let means: Vec<Vec<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.iter().map(|x| x / c.max(1) as f64).collect())
        .collect();
    data.points()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &means[l]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pairs_on_a_line() {
        let d = Dataset::new(1, vec![0.0, 1.0, 10.0, 11.0]).unwrap();
        let b = brute_force_kmeans(&d, 2).unwrap();
        assert!((b.min_error - 1.0).abs() < 1e-12);
        assert_eq!(b.labels, vec![0, 0, 1, 1]);
        assert_eq!(b.partitions, 7);
    }

    #[test]
    fn trivial_k() {
        let d = Dataset::new(1, vec![0.0, 2.0, 7.0, 3.5]).unwrap();
        assert_eq!(brute_force_kmeans(&d, 4).unwrap().min_error, 0.0);
        let one = brute_force_kmeans(&d, 1).unwrap();
        assert!((one.min_error - d.total_scatter()).abs() < 1e-12);
        assert_eq!(one.partitions, 1);
    }

    #[test]
    fn stirling_counts() {
        let d = Dataset::new(1, (0..10).map(f64::from).collect()).unwrap();
        assert_eq!(brute_force_kmeans(&d, 2).unwrap().partitions, 511);
        assert_eq!(brute_force_kmeans(&d, 3).unwrap().partitions, 9330);
        assert_eq!(brute_force_kmeans(&d, 4).unwrap().partitions, 34105);
    }

    #[test]
    fn size_limits() {
        let big = Dataset::new(1, (0..13).map(f64::from).collect()).unwrap();
        assert!(matches!(brute_force_kmeans(&big, 2), Err(Error::InstanceTooLarge { .. })));
        let d = Dataset::new(1, (0..6).map(f64::from).collect()).unwrap();
        assert!(matches!(brute_force_kmeans(&d, 5), Err(Error::InstanceTooLarge { .. })));
        assert!(brute_force_kmeans(&d, 0).is_err());
    }

    #[test]
    fn mc_rejects_few_samples() {
        assert!(mc_moments(2, 1.0, MomentShape::Sphere, 999, 0).is_err());
        assert!(mc_moments(0, 1.0, MomentShape::Sphere, 1000, 0).is_err());
    }

    #[test]
    fn mc_points_are_deterministic() {
        let a = mc_moments(5, 1.0, MomentShape::HalfSphere, 5000, 3).unwrap();
        let b = mc_moments(5, 1.0, MomentShape::HalfSphere, 5000, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_offset > 0.0);
    }
}
