//! Closed-form geometry of ideal clusters.
//!
//! An ideal cluster is a d-dimensional ball of radius `R` filled with points
//! of uniform density. Near the true cluster count `K` the optimal clustering
//! only ever produces three shapes: the full ball, a half ball (when one ball
//! receives two centroids) and a dumbbell (two balls sharing one centroid).
//! Their within-cluster errors are expressed through a handful of
//! dimension-dependent constants:
//!
//! | constant | value |
//! |----------|-------|
//! | `alpha`  | `d / (d + 2)` |
//! | `gamma`  | `Γ((d+2)/2) / (√π Γ((d+3)/2))` |
//! | `beta`   | `(alpha - gamma²) / 2` |
//! | `rho`    | `R * gamma`, offset of the half-ball centroid from its flat face |
//! | `V`      | `π^(d/2) R^d / Γ((d+2)/2)` |
//!
//! All Γ ratios are evaluated as differences of log-Γ values, so nothing
//! overflows for large `d` (Γ((d+2)/2) alone overflows an `f64` near d = 340).

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::penalty::PenaltyFamily;

/// Dimension-dependent constants of an ideal cluster of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConstants {
    pub dim: usize,
    pub radius: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rho: f64,
    /// Ball volume. Underflows to zero for very large `dim` with `R = 1`; use
    /// [`ln_volume`](Self::ln_volume) when that matters.
    pub volume: f64,
    pub ln_volume: f64,
}

impl GeometryConstants {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid(format!("radius must be positive and finite, got {radius}")));
        }
        let d = dim as f64;
        let alpha = d / (d + 2.0);
        let gamma = half_ball_offset_ratio(dim);
        let beta = 0.5 * (alpha - gamma * gamma);
        let ln_volume =
            0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * (d + 2.0)) + d * radius.ln();
        Ok(Self {
            dim,
            radius,
            alpha,
            beta,
            gamma,
            rho: radius * gamma,
            volume: ln_volume.exp(),
            ln_volume,
        })
    }

    /// `alpha / (2 beta)`: 4 on a line, decreasing towards 1 as `dim` grows.
    pub fn alpha_over_two_beta(&self) -> f64 {
        self.alpha / (2.0 * self.beta)
    }

    pub fn rho_squared(&self) -> f64 {
        self.rho * self.rho
    }
}

/// Shorthand for [`GeometryConstants::new`].
pub fn constants(dim: usize, radius: f64) -> Result<GeometryConstants> {
    GeometryConstants::new(dim, radius)
}

/// Above this dimension the offset ratio comes from log-gamma instead of the
/// two-step recurrence.
const RECURRENCE_MAX_DIM: usize = 1000;

/// `gamma = rho / R` for a half ball in `dim` dimensions.
///
/// `gamma(1) = 1/2`, `gamma(2) = 4 / (3 pi)` and
/// `gamma(d + 2) = gamma(d) (d + 2) / (d + 3)`; the recurrence keeps small
/// dimensions exact to rounding (`alpha / 2 beta` is 4 on a line).
fn half_ball_offset_ratio(dim: usize) -> f64 {
    if dim > RECURRENCE_MAX_DIM {
        let d = dim as f64;
        return (ln_gamma(0.5 * (d + 2.0)) - ln_gamma(0.5 * (d + 3.0))).exp()
            / std::f64::consts::PI.sqrt();
    }
    let (mut g, mut d) = if dim % 2 == 1 {
        (0.5, 1)
    } else {
        (4.0 / (3.0 * std::f64::consts::PI), 2)
    };
    while d < dim {
        g *= (d + 2) as f64 / (d + 3) as f64;
        d += 2;
    }
    g
}

/// What stands in for the "amount" of a cluster in the error formulas.
///
/// The closed forms integrate over the ball, so errors scale with the volume
/// `V`. For a dense sample the volume plays the role of the point count of a
/// cluster, which is how the formulas are applied to data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusterMass {
    /// Use the continuous ball volume `V`.
    Volume,
    /// Use a per-cluster point count (typically `N / K`).
    Points(f64),
}

impl ClusterMass {
    pub fn resolve(&self, c: &GeometryConstants) -> f64 {
        match *self {
            ClusterMass::Volume => c.volume,
            ClusterMass::Points(n) => n,
        }
    }
}

/// Within-cluster errors of the three shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeErrors {
    pub sphere: f64,
    /// Error of one half ball, expressed against the full-ball mass.
    pub half_sphere: f64,
    pub dumbbell: f64,
}

/// Errors of a ball, a half ball and a dumbbell whose ball centres are each
/// `half_distance` away from the dumbbell centre.
pub fn shape_errors(
    c: &GeometryConstants,
    half_distance: f64,
    mass: ClusterMass,
) -> Result<ShapeErrors> {
    check_positive("L", half_distance)?;
    let v = mass.resolve(c);
    let r2 = c.radius * c.radius;
    let sphere = v * r2 * c.alpha;
    Ok(ShapeErrors {
        sphere,
        half_sphere: v * r2 * c.beta,
        dumbbell: 2.0 * sphere + 2.0 * v * half_distance * half_distance,
    })
}

/// Unpenalized errors at `K - 1`, `K` and `K + 1` clusters for `K` ideal clusters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorLadder {
    pub k: usize,
    pub below: f64,
    pub at: f64,
    pub above: f64,
    /// `E_{K-1} - E_K = 2 V L²`.
    pub merge_gap: f64,
    /// `E_K - E_{K+1} = V R² (alpha - 2 beta)`.
    pub split_gap: f64,
}

impl ErrorLadder {
    /// `(k, E_k)` pairs for `K - 1`, `K`, `K + 1`.
    pub fn points(&self) -> [(usize, f64); 3] {
        [(self.k - 1, self.below), (self.k, self.at), (self.k + 1, self.above)]
    }
}

pub fn error_ladder(
    c: &GeometryConstants,
    k: usize,
    half_distance: f64,
    mass: ClusterMass,
) -> Result<ErrorLadder> {
    if k < 2 {
        return Err(invalid(format!("error ladder needs K >= 2, got {k}")));
    }
    check_positive("L", half_distance)?;
    let v = mass.resolve(c);
    let r2 = c.radius * c.radius;
    let kf = k as f64;
    let at = kf * v * r2 * c.alpha;
    let merge_gap = 2.0 * v * half_distance * half_distance;
    Ok(ErrorLadder {
        k,
        below: at + merge_gap,
        at,
        above: (kf - 1.0) * v * r2 * c.alpha + 2.0 * v * r2 * c.beta,
        merge_gap,
        split_gap: v * r2 * (c.alpha - 2.0 * c.beta),
    })
}

/// Admissible range of the additive penalty coefficient for an assumed `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBounds {
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    /// Midpoint with the `rho²` term dropped (`N L² / K` for the linear family).
    pub approx: f64,
    pub family: PenaltyFamily,
    pub assumed_k: usize,
}

impl LambdaBounds {
    /// Strictly inside the open interval `(lower, upper)`.
    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.lower && lambda < self.upper
    }
}

/// Bounds on lambda for `n_points` points spread over `k` ideal clusters
/// (each cluster counts `n_points / k` points).
pub fn lambda_bounds(
    n_points: usize,
    k: usize,
    c: &GeometryConstants,
    half_distance: f64,
    family: PenaltyFamily,
) -> Result<LambdaBounds> {
    if n_points < k {
        return Err(invalid(format!("need N >= K, got N = {n_points}, K = {k}")));
    }
    let per_cluster = n_points as f64 / k as f64;
    lambda_bounds_for_mass(ClusterMass::Points(per_cluster), k, c, half_distance, family)
}

/// Bounds on lambda with an explicit cluster mass.
///
/// `V rho² / (f(K+1) - f(K)) < lambda < 2 V L² / (f(K) - f(K-1))`, using the
/// exact penalty increments rather than their large-K expansions.
pub fn lambda_bounds_for_mass(
    mass: ClusterMass,
    k: usize,
    c: &GeometryConstants,
    half_distance: f64,
    family: PenaltyFamily,
) -> Result<LambdaBounds> {
    if k < 2 {
        return Err(invalid(format!("lambda bounds need K >= 2, got {k}")));
    }
    check_positive("L", half_distance)?;
    family.validate()?;
    let v = mass.resolve(c);
    let step_up = family.increment(k);
    let step_down = family.increment(k - 1);
    let lower = v * c.rho_squared() / step_up;
    let upper = 2.0 * v * half_distance * half_distance / step_down;
    if !(lower < upper) {
        return Err(Error::DegenerateBounds { lower, upper });
    }
    Ok(LambdaBounds {
        lower,
        upper,
        midpoint: 0.5 * (lower + upper),
        approx: 0.5 * upper,
        family,
        assumed_k: k,
    })
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {value}")))
    }
}
