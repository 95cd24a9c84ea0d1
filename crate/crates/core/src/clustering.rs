//! Deterministic k-means: farthest-first seeding plus Lloyd iteration.
//!
//! For every k the seeds are the first k points of a single farthest-first
//! traversal (start at the point of smallest norm, then repeatedly take the
//! point whose distance to the nearest chosen seed is largest). Lloyd
//! iteration always starts from those saved seeds, never from the converged
//! centroids of the previous k. On well separated ideal clusters this puts
//! exactly one seed in each cluster at k = K, so the result is the optimal
//! clustering.
//!
//! Nothing here is random, and parallel work is limited to the per-point
//! assignment step, so results are bit-identical across runs and thread counts.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Points below this count are assigned sequentially.
const PAR_MIN_LEN: usize = 2048;

/// N points in d dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
}

impl Dataset {
    /// Build from a flat row-major buffer of `coords.len() / dim` points.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dataset dimension must be at least 1"));
        }
        if coords.is_empty() {
            return Err(invalid("dataset must contain at least one point"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!(
                "point {} has a non-finite coordinate {}",
                pos / dim,
                coords[pos]
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| invalid("dataset must contain at least one point"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; a dataset holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.points() {
            for (acc, x) in m.iter_mut().zip(p) {
                *acc += x;
            }
        }
        let n = self.len() as f64;
        m.iter_mut().for_each(|x| *x /= n);
        m
    }

    /// Sum of squared distances to the global mean (the k = 1 error).
    pub fn total_scatter(&self) -> f64 {
        let m = self.mean();
        self.points().map(|p| sq_dist(p, &m)).sum()
    }
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringConfig {
    pub max_iter: usize,
    /// Stop once the relative error decrease between iterations drops to this.
    pub tol: f64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-10,
        }
    }
}

/// Why a Lloyd run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// An assignment pass left every label unchanged.
    Converged,
    /// The relative error decrease fell below the tolerance.
    Tolerance,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Sum of squared distances from each point to its labelled centroid.
    pub error: f64,
    pub iterations: usize,
    pub initial_centroids: Vec<Vec<f64>>,
    pub stop: StopReason,
    /// Error after every centroid update, in order. Non-increasing.
    pub error_trace: Vec<f64>,
}

impl ClusteringResult {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Error recomputed from `labels` and `centroids`.
    pub fn recompute_error(&self, data: &Dataset) -> f64 {
        sse(data, &self.labels, &self.centroids)
    }
}

fn check_centroids(data: &Dataset, centroids: &[Vec<f64>]) -> Result<()> {
    if centroids.is_empty() {
        return Err(invalid("at least one centroid is required"));
    }
    for c in centroids {
        if c.len() != data.dim() {
            return Err(Error::DimensionMismatch {
                expected: data.dim(),
                found: c.len(),
            });
        }
    }
    Ok(())
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Label every point with its nearest centroid (lowest index wins ties).
pub fn assign(data: &Dataset, centroids: &[Vec<f64>]) -> Result<Vec<usize>> {
    check_centroids(data, centroids)?;
    Ok(assign_unchecked(data, centroids))
}

fn assign_unchecked(data: &Dataset, centroids: &[Vec<f64>]) -> Vec<usize> {
    (0..data.len())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|i| nearest(data.point(i), centroids))
        .collect()
}

fn sse(data: &Dataset, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    data.points()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum()
}

/// Recompute centroids as cluster means. Empty clusters are refilled with
/// the point farthest from its own centroid, taken from a cluster that keeps
/// at least one point; `labels` is updated accordingly.
fn update(data: &Dataset, labels: &mut [usize], k: usize) -> Vec<Vec<f64>> {
    let dim = data.dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in data.points().zip(labels.iter()) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    let mean = |sum: &[f64], count: usize| -> Vec<f64> {
        sum.iter().map(|s| s / count as f64).collect()
    };
    let mut centroids: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            if counts[j] > 0 {
                mean(&sums[j], counts[j])
            } else {
                vec![0.0; dim]
            }
        })
        .collect();

    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut donor_point = None;
        let mut best = f64::NEG_INFINITY;
        for (i, p) in data.points().enumerate() {
            let l = labels[i];
            if counts[l] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[l]);
            if d > best {
                best = d;
                donor_point = Some(i);
            }
        }
        // k <= N guarantees some cluster holds two or more points
        let i = donor_point.expect("an empty cluster implies a cluster with at least two points");
        let from = labels[i];
        let p = data.point(i);
        counts[from] -= 1;
        for (s, x) in sums[from].iter_mut().zip(p) {
            *s -= x;
        }
        centroids[from] = mean(&sums[from], counts[from]);
        labels[i] = empty;
        counts[empty] = 1;
        sums[empty] = p.to_vec();
        centroids[empty] = p.to_vec();
    }
    centroids
}

/// Lloyd iteration from the given initial centroids.
pub fn lloyd(data: &Dataset, init: &[Vec<f64>], cfg: &ClusteringConfig) -> Result<ClusteringResult> {
    check_centroids(data, init)?;
    let k = init.len();
    if k > data.len() {
        return Err(invalid(format!("k = {k} exceeds the {} available points", data.len())));
    }
    if cfg.max_iter == 0 {
        return Err(invalid("max_iter must be at least 1"));
    }

    let mut labels = assign_unchecked(data, init);
    let mut centroids;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;
    loop {
        iterations += 1;
        centroids = update(data, &mut labels, k);
        let err = sse(data, &labels, &centroids);
        let prev = trace.last().copied();
        trace.push(err);

        let next = assign_unchecked(data, &centroids);
        if next == labels {
            stop = StopReason::Converged;
            break;
        }
        labels = next;
        let stalled = prev.is_some_and(|prev: f64| prev - err <= cfg.tol * prev);
        if stalled || iterations == cfg.max_iter {
            if stalled {
                stop = StopReason::Tolerance;
            }
            // leave centroids as the means of the final labels
            centroids = update(data, &mut labels, k);
            trace.push(sse(data, &labels, &centroids));
            break;
        }
    }

    Ok(ClusteringResult {
        k,
        error: *trace.last().expect("at least one iteration ran"),
        centroids,
        labels,
        iterations,
        initial_centroids: init.to_vec(),
        stop,
        error_trace: trace,
    })
}

/// Indices of the first `k` farthest-first seeds.
pub fn farthest_first_indices(data: &Dataset, k: usize) -> Result<Vec<usize>> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(invalid(format!("k must be in 1..={n}, got {k}")));
    }
    let zero = vec![0.0; data.dim()];
    let first = (0..n)
        .map(|i| (i, sq_dist(data.point(i), &zero)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        .0;

    let mut chosen = vec![first];
    let mut picked = vec![false; n];
    picked[first] = true;
    let mut min_dist: Vec<f64> = (0..n).map(|i| sq_dist(data.point(i), data.point(first))).collect();
    while chosen.len() < k {
        let mut next = None;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            if !picked[i] && min_dist[i] > best {
                best = min_dist[i];
                next = Some(i);
            }
        }
        let next = next.expect("k <= N leaves an unpicked point");
        picked[next] = true;
        chosen.push(next);
        let c = data.point(next);
        for (i, md) in min_dist.iter_mut().enumerate() {
            let d = sq_dist(data.point(i), c);
            if d < *md {
                *md = d;
            }
        }
    }
    Ok(chosen)
}

/// The first `k` farthest-first seeds as coordinate vectors.
pub fn farthest_first_init(data: &Dataset, k: usize) -> Result<Vec<Vec<f64>>> {
    Ok(farthest_first_indices(data, k)?
        .into_iter()
        .map(|i| data.point(i).to_vec())
        .collect())
}

/// Clusterings for every k in a range.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub results: Vec<ClusteringResult>,
    /// Values of k whose error exceeds the error at k - 1.
    pub monotonicity_violations: Vec<usize>,
}

impl Sweep {
    pub fn ks(&self) -> Vec<usize> {
        self.results.iter().map(|r| r.k).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.error).collect()
    }

    pub fn get(&self, k: usize) -> Option<&ClusteringResult> {
        let first = self.results.first()?.k;
        self.results.get(k.checked_sub(first)?)
    }
}

/// Farthest-first + Lloyd for every k in `k_min..=k_max`.
pub fn sweep(data: &Dataset, k_min: usize, k_max: usize, cfg: &ClusteringConfig) -> Result<Sweep> {
    if k_min == 0 || k_min > k_max || k_max > data.len() {
        return Err(Error::InvalidRange {
            k_min,
            k_max,
            n_points: data.len(),
        });
    }
    // seeds are prefix-stable: the seeds for k are the first k seeds for k_max
    let seeds = farthest_first_init(data, k_max)?;
    let results = (k_min..=k_max)
        .into_par_iter()
        .map(|k| lloyd(data, &seeds[..k], cfg))
        .collect::<Result<Vec<_>>>()?;
    let monotonicity_violations = results
        .windows(2)
        .filter(|w| w[1].error > w[0].error)
        .map(|w| w[1].k)
        .collect();
    Ok(Sweep {
        results,
        monotonicity_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Dataset {
        Dataset::new(1, xs.to_vec()).unwrap()
    }

    fn pts(p: &[[f64; 2]]) -> Dataset {
        Dataset::from_points(p).unwrap()
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(0, vec![1.0]).is_err());
        assert!(Dataset::new(2, vec![]).is_err());
        assert!(Dataset::new(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(Dataset::new(1, vec![f64::NAN]).is_err());
        assert!(matches!(
            Dataset::from_points(&[vec![0.0, 0.0], vec![1.0]]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        let d = pts(&[[0.0, 0.0], [2.0, 4.0]]);
        assert_eq!(d.len(), 2);
        assert_eq!(d.point(1), &[2.0, 4.0]);
        assert_eq!(d.mean(), vec![1.0, 2.0]);
        assert_eq!(d.total_scatter(), 10.0);
    }

    #[test]
    fn assign_examples() {
        let d = line(&[0.0, 10.0]);
        assert_eq!(assign(&d, &[vec![0.0], vec![10.0]]).unwrap(), vec![0, 1]);
        let d = line(&[5.0]);
        assert_eq!(assign(&d, &[vec![0.0], vec![10.0]]).unwrap(), vec![0]);
        let d = pts(&[[0.0, 0.0], [1.0, 0.0], [9.0, 0.0]]);
        assert_eq!(
            assign(&d, &[vec![0.0, 0.0], vec![10.0, 0.0]]).unwrap(),
            vec![0, 0, 1]
        );
        assert!(matches!(
            assign(&d, &[vec![0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(assign(&d, &[]).is_err());
    }

    #[test]
    fn lloyd_single_cluster_is_mean() {
        let d = line(&[1.0, 2.0, 6.0]);
        let r = lloyd(&d, &[vec![100.0]], &ClusteringConfig::default()).unwrap();
        assert_eq!(r.centroids, vec![vec![3.0]]);
        assert!((r.error - d.total_scatter()).abs() < 1e-12);
        assert_eq!(r.stop, StopReason::Converged);
    }

    #[test]
    fn lloyd_two_on_a_line() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let r = lloyd(&d, &[vec![0.0], vec![10.0]], &ClusteringConfig::default()).unwrap();
        assert_eq!(r.centroids, vec![vec![0.5], vec![10.5]]);
        assert_eq!(r.labels, vec![0, 0, 1, 1]);
        assert!((r.error - 1.0).abs() < 1e-12);
        assert_eq!(r.initial_centroids, vec![vec![0.0], vec![10.0]]);
    }

    #[test]
    fn lloyd_repairs_empty_cluster() {
        // second seed duplicates the first, so it starts empty
        let d = line(&[0.0, 0.0, 1.0, 9.0, 10.0]);
        let r = lloyd(&d, &[vec![0.0], vec![0.0], vec![10.0]], &ClusteringConfig::default()).unwrap();
        assert!(r.cluster_sizes().iter().all(|&s| s > 0));
        assert!((r.recompute_error(&d) - r.error).abs() < 1e-12);
        for w in r.error_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lloyd_rejects_bad_input() {
        let d = line(&[0.0, 1.0]);
        let cfg = ClusteringConfig::default();
        assert!(lloyd(&d, &[vec![0.0], vec![1.0], vec![2.0]], &cfg).is_err());
        assert!(lloyd(&d, &[vec![0.0, 1.0]], &cfg).is_err());
        let zero = ClusteringConfig { max_iter: 0, tol: 0.0 };
        assert!(lloyd(&d, &[vec![0.0]], &zero).is_err());
    }

    #[test]
    fn max_iter_stop_leaves_means() {
        let d = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 20.0, 21.0]);
        let cfg = ClusteringConfig { max_iter: 1, tol: 0.0 };
        let r = lloyd(&d, &[vec![0.0], vec![1.0]], &cfg).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.stop, StopReason::MaxIterations);
        assert!((r.recompute_error(&d) - r.error).abs() < 1e-12);
        for (j, c) in r.centroids.iter().enumerate() {
            let members: Vec<f64> = d.points().zip(&r.labels).filter(|(_, &l)| l == j).map(|(p, _)| p[0]).collect();
            let m = members.iter().sum::<f64>() / members.len() as f64;
            assert!((c[0] - m).abs() < 1e-12);
        }
    }

    #[test]
    fn farthest_first_examples() {
        let d = pts(&[[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]]);
        assert_eq!(
            farthest_first_init(&d, 2).unwrap(),
            vec![vec![0.0, 0.0], vec![10.0, 0.0]]
        );
        assert_eq!(farthest_first_init(&d, 3).unwrap()[2], vec![1.0, 0.0]);
        assert!(farthest_first_init(&d, 4).is_err());
        assert!(farthest_first_init(&d, 0).is_err());
    }

    #[test]
    fn farthest_first_starts_at_min_norm_and_skips_picked_duplicates() {
        let d = pts(&[[5.0, 5.0], [-1.0, 0.0], [5.0, 5.0], [0.5, 0.5]]);
        assert_eq!(farthest_first_indices(&d, 1).unwrap(), vec![3]);
        // two copies of (5, 5): the second must still be picked eventually
        assert_eq!(farthest_first_indices(&d, 4).unwrap(), vec![3, 0, 1, 2]);
    }

    #[test]
    fn farthest_first_is_prefix_stable() {
        let d = line(&[3.0, -7.0, 2.5, 11.0, 0.1, 6.0, -2.0]);
        let all = farthest_first_indices(&d, 7).unwrap();
        for k in 1..=7 {
            assert_eq!(farthest_first_indices(&d, k).unwrap(), all[..k]);
        }
    }

    #[test]
    fn sweep_single_k() {
        let d = line(&[1.0, 2.0, 6.0]);
        let s = sweep(&d, 1, 1, &ClusteringConfig::default()).unwrap();
        assert_eq!(s.results.len(), 1);
        assert!((s.results[0].error - d.total_scatter()).abs() < 1e-12);
        assert!(sweep(&d, 0, 1, &ClusteringConfig::default()).is_err());
        assert!(sweep(&d, 2, 1, &ClusteringConfig::default()).is_err());
        assert!(sweep(&d, 1, 4, &ClusteringConfig::default()).is_err());
    }

    #[test]
    fn sweep_uses_saved_seeds() {
        let d = line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0, 30.0, 31.0]);
        let s = sweep(&d, 1, 4, &ClusteringConfig::default()).unwrap();
        let seeds = farthest_first_init(&d, 4).unwrap();
        for r in &s.results {
            assert_eq!(r.initial_centroids, seeds[..r.k]);
        }
        assert_eq!(s.get(3).unwrap().k, 3);
        assert!(s.get(5).is_none());
        assert!(s.monotonicity_violations.is_empty());
    }
}
