//! Seeded generators for ideal cluster datasets.
//!
//! Every cluster draws its points from its own ChaCha stream, seeded from the
//! master seed and the cluster index, so adding clusters never perturbs the
//! points of earlier ones and generation can run in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::clustering::{sq_dist, Dataset};
use crate::error::{invalid, Error, Result};

const PLACEMENT_ATTEMPTS: usize = 100_000;
const PLACEMENT_STREAM: u64 = u64::MAX;
const NOISE_STREAM: u64 = u64::MAX - 1;

/// SplitMix64 finaliser, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, stream))
}

/// One point uniform in the ball of `radius` around `center`, appended to `out`.
pub(crate) fn push_ball_point<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64, out: &mut Vec<f64>) {
    let dim = center.len();
    let start = out.len();
    let mut norm2 = 0.0;
    loop {
        for _ in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            norm2 += z * z;
            out.push(z);
        }
        if norm2 > 0.0 {
            break;
        }
        out.truncate(start);
    }
    let u: f64 = rng.random();
    let scale = radius * u.powf(1.0 / dim as f64) / norm2.sqrt();
    for (x, c) in out[start..].iter_mut().zip(center) {
        *x = c + *x * scale;
    }
}

/// `n` points uniform in the d-ball of radius `radius` centred at the origin.
pub fn sample_ball(dim: usize, radius: f64, n: usize, seed: u64) -> Result<Dataset> {
    check_ball(dim, radius, n)?;
    let mut rng = stream_rng(seed, 0);
    let center = vec![0.0; dim];
    let mut coords = Vec::with_capacity(n * dim);
    for _ in 0..n {
        push_ball_point(&mut rng, &center, radius, &mut coords);
    }
    Dataset::new(dim, coords)
}

fn check_ball(dim: usize, radius: f64, n: usize) -> Result<()> {
    if dim == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    if n == 0 {
        return Err(invalid("need at least one point"));
    }
    Ok(())
}

/// Parameters of a synthetic ideal-cluster dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub clusters: usize,
    pub dim: usize,
    pub radius: f64,
    pub points_per_cluster: usize,
    /// Floor on pairwise centroid distances, in units of `radius`.
    /// Values of 2 or more keep the balls disjoint.
    pub min_separation: f64,
    /// Factor in `(0, 1]` pulling every centroid towards the centroid mean
    /// after placement. Values below 1 create overlap on purpose.
    pub shrink: f64,
    pub seed: u64,
    /// Side of the hypercube (centred at the origin) that centroids are drawn
    /// from. `None` uses [`SynthSpec::box_side`]'s default.
    pub placement_box: Option<f64>,
    /// Vary each cluster's size by up to +/-10%.
    pub jitter: bool,
    /// Extra points drawn uniformly from the placement box grown by `radius`.
    pub background_noise: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            clusters: 10,
            dim: 2,
            radius: 1.0,
            points_per_cluster: 100,
            min_separation: 3.0,
            shrink: 1.0,
            seed: 0,
            placement_box: None,
            jitter: false,
            background_noise: 0,
        }
    }
}

impl SynthSpec {
    /// Side of the placement cube. The default is
    /// `sep * R * max((2K)^(1/d), sqrt(4K / d))`: the second term keeps the
    /// between-centroid scatter `d s² / 12` at its two-dimensional level as
    /// `d` grows, the first keeps low dimensions from packing too tightly.
    pub fn box_side(&self) -> f64 {
        self.placement_box.unwrap_or_else(|| {
            let (k, d) = (self.clusters as f64, self.dim as f64);
            let side = (2.0 * k).powf(1.0 / d).max((4.0 * k / d).sqrt());
            self.min_separation * self.radius * side
        })
    }

    fn validate(&self) -> Result<()> {
        check_ball(self.dim, self.radius, self.points_per_cluster)?;
        if self.clusters == 0 {
            return Err(invalid("need at least one cluster"));
        }
        if !(self.min_separation >= 0.0 && self.min_separation.is_finite()) {
            return Err(invalid(format!(
                "min_separation must be non-negative, got {}",
                self.min_separation
            )));
        }
        if !(self.shrink > 0.0 && self.shrink <= 1.0) {
            return Err(invalid(format!("shrink must lie in (0, 1], got {}", self.shrink)));
        }
        let side = self.box_side();
        if !(side >= 0.0 && side.is_finite()) {
            return Err(invalid(format!("placement box side must be non-negative, got {side}")));
        }
        Ok(())
    }
}

/// Ground truth of a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index per point, or [`Truth::NOISE`] for background points.
    pub labels: Vec<usize>,
}

impl Truth {
    pub const NOISE: usize = usize::MAX;
}

fn place_centroids(spec: &SynthSpec) -> Result<Vec<Vec<f64>>> {
    let side = spec.box_side();
    let min_d2 = (spec.min_separation * spec.radius).powi(2);
    let mut rng = stream_rng(spec.seed, PLACEMENT_STREAM);
    let mut placed: Vec<Vec<f64>> = Vec::with_capacity(spec.clusters);
    let mut attempts = 0;
    while placed.len() < spec.clusters {
        if attempts == PLACEMENT_ATTEMPTS {
            return Err(Error::PlacementFailed {
                clusters: spec.clusters,
                separation: spec.min_separation * spec.radius,
                box_side: side,
                attempts,
            });
        }
        attempts += 1;
        let candidate: Vec<f64> = (0..spec.dim)
            .map(|_| (rng.random::<f64>() - 0.5) * side)
            .collect();
        if placed.iter().all(|c| sq_dist(c, &candidate) >= min_d2) {
            placed.push(candidate);
        }
    }
    if spec.shrink < 1.0 {
        let dim = spec.dim;
        let k = placed.len() as f64;
        let mean: Vec<f64> = (0..dim)
            .map(|a| placed.iter().map(|c| c[a]).sum::<f64>() / k)
            .collect();
        for c in &mut placed {
            for (x, m) in c.iter_mut().zip(&mean) {
                *x = m + spec.shrink * (*x - m);
            }
        }
    }
    Ok(placed)
}

/// Generate `spec.clusters` uniform balls, cluster-major, plus optional noise.
pub fn generate(spec: &SynthSpec) -> Result<(Dataset, Truth)> {
    spec.validate()?;
    let centroids = place_centroids(spec)?;
    let blocks: Vec<Vec<f64>> = centroids
        .par_iter()
        .enumerate()
        .map(|(j, center)| {
            let mut rng = stream_rng(spec.seed, j as u64);
            let n = if spec.jitter {
                let f: f64 = rng.random_range(-0.1..=0.1);
                ((spec.points_per_cluster as f64 * (1.0 + f)).round() as usize).max(1)
            } else {
                spec.points_per_cluster
            };
            let mut block = Vec::with_capacity(n * spec.dim);
            for _ in 0..n {
                push_ball_point(&mut rng, center, spec.radius, &mut block);
            }
            block
        })
        .collect();

    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (j, block) in blocks.into_iter().enumerate() {
        labels.extend(std::iter::repeat_n(j, block.len() / spec.dim));
        coords.extend(block);
    }
    if spec.background_noise > 0 {
        let half = 0.5 * spec.box_side() + spec.radius;
        let mut rng = stream_rng(spec.seed, NOISE_STREAM);
        for _ in 0..spec.background_noise {
            coords.extend((0..spec.dim).map(|_| rng.random_range(-half..=half)));
            labels.push(Truth::NOISE);
        }
    }
    Ok((Dataset::new(spec.dim, coords)?, Truth { centroids, labels }))
}

/// Shapes that appear when the cluster count is off by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// The half `x_0 >= 0` of a ball centred at the origin.
    HalfSphere,
    /// Two balls centred at `(+L, 0, ..)` and `(-L, 0, ..)`.
    Dumbbell,
}

/// Sample a half ball or a dumbbell. `half_distance` is ignored for half balls
/// and must be at least `radius` for dumbbells.
pub fn generate_shape(
    shape: Shape,
    dim: usize,
    radius: f64,
    half_distance: f64,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    check_ball(dim, radius, n)?;
    let mut rng = stream_rng(seed, 0);
    let mut coords = Vec::with_capacity(n * dim);
    match shape {
        Shape::HalfSphere => {
            let origin = vec![0.0; dim];
            for i in 0..n {
                push_ball_point(&mut rng, &origin, radius, &mut coords);
                let x0 = &mut coords[i * dim];
                *x0 = x0.abs();
            }
        }
        Shape::Dumbbell => {
            if !(half_distance >= radius && half_distance.is_finite()) {
                return Err(invalid(format!(
                    "dumbbell needs L >= R, got L = {half_distance}, R = {radius}"
                )));
            }
            let mut left = vec![0.0; dim];
            left[0] = -half_distance;
            let mut right = vec![0.0; dim];
            right[0] = half_distance;
            for i in 0..n {
                let center = if i < n / 2 { &left } else { &right };
                push_ball_point(&mut rng, center, radius, &mut coords);
            }
        }
    }
    Dataset::new(dim, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_points_stay_inside() {
        for dim in [1, 2, 5, 12] {
            let d = sample_ball(dim, 2.5, 2000, 3).unwrap();
            assert_eq!(d.len(), 2000);
            let zero = vec![0.0; dim];
            assert!(d.points().all(|p| sq_dist(p, &zero) <= 2.5 * 2.5 + 1e-12));
        }
    }

    #[test]
    fn ball_is_deterministic() {
        assert_eq!(sample_ball(3, 1.0, 50, 9).unwrap(), sample_ball(3, 1.0, 50, 9).unwrap());
        assert_ne!(sample_ball(3, 1.0, 50, 9).unwrap(), sample_ball(3, 1.0, 50, 10).unwrap());
    }

    #[test]
    fn line_ball_has_variance_one_third() {
        let d = sample_ball(1, 1.0, 100_000, 1).unwrap();
        let xs = d.coords();
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        // sd of x^2 for U(-1,1) is 2/sqrt(45); four standard errors
        assert!((var - 1.0 / 3.0).abs() < 4.0 * (4.0f64 / 45.0).sqrt() / n.sqrt());
        assert!(xs.iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn generate_honours_separation() {
        let spec = SynthSpec {
            seed: 7,
            ..SynthSpec::default()
        };
        let (data, truth) = generate(&spec).unwrap();
        assert_eq!(data.len(), 1000);
        assert_eq!(truth.centroids.len(), 10);
        for (i, a) in truth.centroids.iter().enumerate() {
            for b in &truth.centroids[i + 1..] {
                assert!(sq_dist(a, b).sqrt() >= 3.0);
            }
        }
        for (p, &l) in data.points().zip(&truth.labels) {
            assert!(sq_dist(p, &truth.centroids[l]) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn shrink_halves_distances() {
        let base = SynthSpec {
            seed: 11,
            ..SynthSpec::default()
        };
        let (_, full) = generate(&base).unwrap();
        let (_, half) = generate(&SynthSpec { shrink: 0.5, ..base }).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let a = sq_dist(&full.centroids[i], &full.centroids[j]).sqrt();
                let b = sq_dist(&half.centroids[i], &half.centroids[j]).sqrt();
                assert!((b - 0.5 * a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clusters_are_stable_when_more_are_added() {
        let small = SynthSpec {
            clusters: 3,
            placement_box: Some(50.0),
            seed: 5,
            ..SynthSpec::default()
        };
        let big = SynthSpec { clusters: 4, ..small.clone() };
        let (a, ta) = generate(&small).unwrap();
        let (b, tb) = generate(&big).unwrap();
        assert_eq!(ta.centroids[..], tb.centroids[..3]);
        assert_eq!(a.coords(), &b.coords()[..a.coords().len()]);
    }

    #[test]
    fn placement_failure_is_reported() {
        let spec = SynthSpec {
            clusters: 50,
            placement_box: Some(1.0),
            ..SynthSpec::default()
        };
        assert!(matches!(generate(&spec), Err(Error::PlacementFailed { .. })));
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SynthSpec { clusters: 0, ..SynthSpec::default() },
            SynthSpec { dim: 0, ..SynthSpec::default() },
            SynthSpec { shrink: 0.0, ..SynthSpec::default() },
            SynthSpec { shrink: 1.5, ..SynthSpec::default() },
            SynthSpec { radius: -1.0, ..SynthSpec::default() },
            SynthSpec { points_per_cluster: 0, ..SynthSpec::default() },
        ];
        for s in bad {
            assert!(generate(&s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn jitter_and_noise() {
        let spec = SynthSpec {
            jitter: true,
            background_noise: 17,
            seed: 2,
            ..SynthSpec::default()
        };
        let (data, truth) = generate(&spec).unwrap();
        let noise = truth.labels.iter().filter(|&&l| l == Truth::NOISE).count();
        assert_eq!(noise, 17);
        let clustered = data.len() - noise;
        assert!((900..=1100).contains(&clustered));
        assert_eq!(truth.labels.len(), data.len());
    }

    #[test]
    fn single_cluster_recovers_its_centre() {
        let spec = SynthSpec {
            clusters: 1,
            points_per_cluster: 20_000,
            seed: 4,
            ..SynthSpec::default()
        };
        let (data, truth) = generate(&spec).unwrap();
        let m = data.mean();
        assert!(sq_dist(&m, &truth.centroids[0]).sqrt() < 0.03);
    }

    #[test]
    fn dumbbell_error_about_midpoint() {
        let d = generate_shape(Shape::Dumbbell, 2, 1.0, 2.0, 100_000, 8).unwrap();
        let per_point = d.points().map(|p| sq_dist(p, &[0.0, 0.0])).sum::<f64>() / d.len() as f64;
        assert!((per_point - 4.5).abs() < 0.02 * 4.5);
        assert!(generate_shape(Shape::Dumbbell, 2, 1.0, 0.5, 10, 8).is_err());
    }

    #[test]
    fn half_sphere_is_one_sided() {
        let d = generate_shape(Shape::HalfSphere, 3, 1.0, 0.0, 1000, 8).unwrap();
        assert!(d.points().all(|p| p[0] >= 0.0));
    }
}
