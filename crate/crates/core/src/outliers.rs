//! Single-pass density filter.
//!
//! The density of a point is the number of *other* points within a fixed
//! radius. Points whose density is below `min_neighbors` are dropped. The pass
//! is not iterated: removing points changes densities, and the filter does not
//! chase that.

use rayon::prelude::*;

use crate::clustering::{sq_dist, Dataset};
use crate::error::{invalid, Result};

/// Multiple of the median nearest-neighbour distance used as the auto radius.
pub const AUTO_RADIUS_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeighborhoodRadius {
    /// `AUTO_RADIUS_FACTOR` times the median nearest-neighbour distance.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityFilterConfig {
    pub radius: NeighborhoodRadius,
    pub min_neighbors: usize,
}

impl Default for DensityFilterConfig {
    fn default() -> Self {
        Self {
            radius: NeighborhoodRadius::Auto,
            min_neighbors: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    /// Surviving points in their original order.
    pub kept: Dataset,
    /// Indices (into the input) of removed points, increasing.
    pub removed: Vec<usize>,
    /// Radius actually used.
    pub radius: f64,
    pub warning: Option<String>,
}

fn nearest_neighbor_distances(data: &Dataset) -> Vec<f64> {
    (0..data.len())
        .into_par_iter()
        .map(|i| {
            let p = data.point(i);
            let mut best = f64::INFINITY;
            for (j, q) in data.points().enumerate() {
                if j != i {
                    best = best.min(sq_dist(p, q));
                }
            }
            best.sqrt()
        })
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// `AUTO_RADIUS_FACTOR` times the median nearest-neighbour distance.
pub fn auto_radius(data: &Dataset) -> f64 {
    AUTO_RADIUS_FACTOR * median(nearest_neighbor_distances(data))
}

/// Number of other points within `radius` (inclusive) of each point.
pub fn neighbor_counts(data: &Dataset, radius: f64) -> Vec<usize> {
    let r2 = radius * radius;
    (0..data.len())
        .into_par_iter()
        .map(|i| {
            let p = data.point(i);
            data.points()
                .enumerate()
                .filter(|&(j, q)| j != i && sq_dist(p, q) <= r2)
                .count()
        })
        .collect()
}

pub fn density_filter(data: &Dataset, cfg: &DensityFilterConfig) -> Result<FilterOutcome> {
    if data.len() < 2 {
        return Err(invalid("density filtering needs at least two points"));
    }
    if cfg.min_neighbors == 0 {
        return Err(invalid("min_neighbors must be at least 1"));
    }
    let first = data.point(0);
    if data.points().all(|p| p == first) {
        return Ok(FilterOutcome {
            kept: data.clone(),
            removed: Vec::new(),
            radius: 0.0,
            warning: Some("all points are identical; nothing removed".to_string()),
        });
    }
    let radius = match cfg.radius {
        NeighborhoodRadius::Auto => auto_radius(data),
        NeighborhoodRadius::Fixed(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid(format!("filter radius must be positive, got {r}")));
            }
            r
        }
    };
    let counts = neighbor_counts(data, radius);
    let (kept_idx, removed): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| counts[i] >= cfg.min_neighbors);
    if kept_idx.is_empty() {
        return Err(invalid(format!(
            "density filter (radius {radius}, min_neighbors {}) would remove every point",
            cfg.min_neighbors
        )));
    }
    Ok(FilterOutcome {
        kept: data.select(&kept_idx)?,
        removed,
        radius,
        warning: None,
    })
}
