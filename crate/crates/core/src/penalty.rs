//! Penalized errors and the cluster-count estimation procedure.
//!
//! Two penalized objectives are built on top of the unpenalized sweep errors
//! `E_k`:
//!
//! - additive: `E_k + lambda * f(k)`, whose minimiser depends on `lambda`;
//! - multiplicative: `f(k) * E_k`, which has no free coefficient.
//!
//! The additive coefficient depends on the cluster count it is meant to
//! detect, so the scan assumes each `K` in turn, derives `lambda(K)` from the
//! k = K clustering, and keeps `K` as a candidate when the additive minimiser
//! lands on `K` again. Candidates are then intersected with the minima of the
//! multiplicative curve.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::clustering::{sq_dist, Dataset, Sweep};
use crate::error::{invalid, Error, Result};
use crate::geometry::{self, ClusterMass};

/// Monotone penalty function `f(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PenaltyFamily {
    /// `f(k) = k`
    #[default]
    Linear,
    /// `f(k) = ln k`
    Log,
    /// `f(k) = k^p`, `p > 0`
    Polynomial(f64),
    /// `f(k) = e^k`
    Exponential,
}

impl PenaltyFamily {
    pub const DEFAULT_POWER: f64 = 2.0;

    pub fn eval(&self, k: usize) -> f64 {
        let k = k as f64;
        match *self {
            PenaltyFamily::Linear => k,
            PenaltyFamily::Log => k.ln(),
            PenaltyFamily::Polynomial(p) => k.powf(p),
            PenaltyFamily::Exponential => k.exp(),
        }
    }

    /// `f(k + 1) - f(k)`, computed without cancellation where possible.
    pub fn increment(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            PenaltyFamily::Linear => 1.0,
            PenaltyFamily::Log => (1.0 / kf).ln_1p(),
            PenaltyFamily::Polynomial(p) => (kf + 1.0).powf(p) - kf.powf(p),
            PenaltyFamily::Exponential => kf.exp() * 1f64.exp_m1(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PenaltyFamily::Polynomial(p) if !(p > 0.0 && p.is_finite()) => Err(invalid(format!(
                "polynomial penalty power must be positive, got {p}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PenaltyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltyFamily::Linear => f.write_str("linear"),
            PenaltyFamily::Log => f.write_str("log"),
            PenaltyFamily::Polynomial(p) => write!(f, "poly:{p}"),
            PenaltyFamily::Exponential => f.write_str("exp"),
        }
    }
}

impl FromStr for PenaltyFamily {
    type Err = Error;

    /// Accepts `linear`, `log`, `exp`, `poly` (power 2) and `poly:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let family = match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => PenaltyFamily::Linear,
            "log" | "ln" => PenaltyFamily::Log,
            "exp" | "exponential" => PenaltyFamily::Exponential,
            "poly" | "polynomial" => PenaltyFamily::Polynomial(Self::DEFAULT_POWER),
            other => {
                let power = other
                    .strip_prefix("poly:")
                    .or_else(|| other.strip_prefix("polynomial:"))
                    .ok_or_else(|| invalid(format!("unknown penalty family '{s}'")))?;
                let p = power
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("bad polynomial power '{power}'")))?;
                PenaltyFamily::Polynomial(p)
            }
        };
        family.validate()?;
        Ok(family)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyMode {
    Additive { lambda: f64 },
    Multiplicative,
}

/// Penalized error for each k.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyCurve {
    pub ks: Vec<usize>,
    pub raw_errors: Vec<f64>,
    pub penalized: Vec<f64>,
    pub family: PenaltyFamily,
    pub mode: PenaltyMode,
}

/// Minima of a penalized curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveMinima {
    /// Smallest k attaining the global minimum.
    pub global: usize,
    /// The global minimum sits on the first or last k of the curve.
    pub global_at_boundary: bool,
    /// Interior strict local minima, in increasing k.
    pub local: Vec<usize>,
}

impl PenaltyCurve {
    fn build(ks: &[usize], raw: &[f64], family: PenaltyFamily, mode: PenaltyMode) -> Result<Self> {
        if ks.is_empty() {
            return Err(invalid("penalty curve needs at least one k"));
        }
        if ks.len() != raw.len() {
            return Err(invalid(format!(
                "{} values of k but {} errors",
                ks.len(),
                raw.len()
            )));
        }
        if ks[0] == 0 || ks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("k values must be positive and strictly increasing"));
        }
        family.validate()?;
        let penalized = ks
            .iter()
            .zip(raw)
            .map(|(&k, &e)| match mode {
                PenaltyMode::Additive { lambda } => e + lambda * family.eval(k),
                PenaltyMode::Multiplicative => family.eval(k) * e,
            })
            .collect();
        Ok(Self {
            ks: ks.to_vec(),
            raw_errors: raw.to_vec(),
            penalized,
            family,
            mode,
        })
    }

    /// Smallest k attaining the minimum penalized value.
    pub fn argmin(&self) -> usize {
        self.ks[self.argmin_index()]
    }

    fn argmin_index(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.penalized.iter().enumerate() {
            if v < self.penalized[best] {
                best = i;
            }
        }
        best
    }

    pub fn minima(&self) -> CurveMinima {
        let g = self.argmin_index();
        let p = &self.penalized;
        let local = (1..p.len().saturating_sub(1))
            .filter(|&i| p[i] < p[i - 1] && p[i] < p[i + 1])
            .map(|i| self.ks[i])
            .collect();
        CurveMinima {
            global: self.ks[g],
            global_at_boundary: g == 0 || g + 1 == p.len(),
            local,
        }
    }

    pub fn value_at(&self, k: usize) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.penalized[i])
    }
}

/// `E_k + lambda * f(k)` for each k.
pub fn additive_curve(
    ks: &[usize],
    raw: &[f64],
    lambda: f64,
    family: PenaltyFamily,
) -> Result<PenaltyCurve> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    PenaltyCurve::build(ks, raw, family, PenaltyMode::Additive { lambda })
}

/// `f(k) * E_k` for each k.
pub fn multiplicative_curve(ks: &[usize], raw: &[f64], family: PenaltyFamily) -> Result<PenaltyCurve> {
    PenaltyCurve::build(ks, raw, family, PenaltyMode::Multiplicative)
}

/// Smallest pairwise distance between centroids.
pub fn estimate_l(centroids: &[Vec<f64>]) -> Result<f64> {
    if centroids.len() < 2 {
        return Err(invalid("estimating L needs at least two centroids"));
    }
    let mut best = f64::INFINITY;
    for (i, a) in centroids.iter().enumerate() {
        for b in &centroids[i + 1..] {
            best = best.min(sq_dist(a, b));
        }
    }
    Ok(best.sqrt())
}

/// How lambda is chosen for an assumed cluster count.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LambdaRule {
    /// Midpoint of the admissible range with the `rho²` term dropped:
    /// `(N / K) L² / (f(K) - f(K-1))`, i.e. `N L² / K` for the linear family.
    #[default]
    Approximate,
    /// Exact midpoint; needs the cluster radius to evaluate `rho`.
    ExactMidpoint { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScanConfig {
    pub family: PenaltyFamily,
    pub rule: LambdaRule,
}

/// One row of the assumed-vs-estimated table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub assumed_k: usize,
    /// Half the smallest inter-centroid distance of the k = assumed_k
    /// clustering: the centre offset of each half of the dumbbell that forms
    /// when the two closest clusters merge.
    pub l: f64,
    pub lambda: f64,
    pub estimated_k: usize,
}

impl ScanEntry {
    pub fn is_candidate(&self) -> bool {
        self.assumed_k == self.estimated_k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveScan {
    pub family: PenaltyFamily,
    pub entries: Vec<ScanEntry>,
    pub candidates: BTreeSet<usize>,
}

/// Lambda for an assumed `k` given the dumbbell half-distance `l`.
pub fn scan_lambda(
    n_points: usize,
    dim: usize,
    k: usize,
    l: f64,
    cfg: &ScanConfig,
) -> Result<f64> {
    let per_cluster = n_points as f64 / k as f64;
    match cfg.rule {
        LambdaRule::Approximate => {
            cfg.family.validate()?;
            Ok(per_cluster * l * l / cfg.family.increment(k - 1))
        }
        LambdaRule::ExactMidpoint { radius } => {
            let c = geometry::constants(dim, radius)?;
            let b = geometry::lambda_bounds_for_mass(
                ClusterMass::Points(per_cluster),
                k,
                &c,
                l,
                cfg.family,
            )?;
            Ok(b.midpoint)
        }
    }
}

/// Assumed-vs-estimated scan over `K = 2..=k_assumed_max`.
///
/// The additive curve for every assumed K runs over all k >= 2 in the sweep;
/// the sweep must therefore cover `2..=k_assumed_max + 1`.
pub fn additive_scan(
    data: &Dataset,
    sweep: &Sweep,
    k_assumed_max: usize,
    cfg: &ScanConfig,
) -> Result<AdditiveScan> {
    let ks = sweep.ks();
    let errors = sweep.errors();
    let first = *ks.first().ok_or_else(|| invalid("empty sweep"))?;
    let last = *ks.last().expect("non-empty");
    if k_assumed_max < 2 || first > 2 || last < k_assumed_max + 1 {
        return Err(invalid(format!(
            "scan up to K = {k_assumed_max} needs a sweep covering 2..={}, got {first}..={last}",
            k_assumed_max + 1
        )));
    }
    let start = ks.iter().position(|&k| k == 2).expect("sweep covers 2");
    let (ks, errors) = (&ks[start..], &errors[start..]);

    let mut entries = Vec::with_capacity(k_assumed_max - 1);
    for assumed in 2..=k_assumed_max {
        let result = sweep.get(assumed).expect("sweep covers assumed k");
        let l = 0.5 * estimate_l(&result.centroids)?;
        let lambda = scan_lambda(data.len(), data.dim(), assumed, l, cfg)?;
        let estimated_k = if lambda > 0.0 && lambda.is_finite() {
            additive_curve(ks, errors, lambda, cfg.family)?.argmin()
        } else {
            // coincident centroids give L = 0; the scan cannot say anything
            0
        };
        entries.push(ScanEntry {
            assumed_k: assumed,
            l,
            lambda,
            estimated_k,
        });
    }
    let candidates = entries
        .iter()
        .filter(|e| e.is_candidate())
        .map(|e| e.assumed_k)
        .collect();
    Ok(AdditiveScan {
        family: cfg.family,
        entries,
        candidates,
    })
}

/// Intersection of additive and multiplicative candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub agreed: BTreeSet<usize>,
    /// Set only when exactly one value is agreed on.
    pub estimate: Option<usize>,
}

pub fn disambiguate(additive: &BTreeSet<usize>, multiplicative: &BTreeSet<usize>) -> Agreement {
    let agreed: BTreeSet<usize> = additive.intersection(multiplicative).copied().collect();
    let estimate = if agreed.len() == 1 {
        agreed.first().copied()
    } else {
        None
    };
    Agreement { agreed, estimate }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    /// Largest assumed K in the additive scan.
    pub k_assumed_max: usize,
    pub scan: ScanConfig,
    pub multiplicative_family: PenaltyFamily,
}

/// Everything the estimation procedure produces.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub n_points: usize,
    pub dim: usize,
    pub scan: AdditiveScan,
    pub multiplicative: PenaltyCurve,
    pub multiplicative_global_min: usize,
    pub multiplicative_global_min_at_boundary: bool,
    pub multiplicative_local_minima: BTreeSet<usize>,
    pub agreed: BTreeSet<usize>,
    pub final_estimate: Option<usize>,
}

impl EstimationReport {
    pub fn additive_candidates(&self) -> &BTreeSet<usize> {
        &self.scan.candidates
    }

    /// Global minimum (unless on the boundary) plus interior local minima.
    pub fn multiplicative_candidates(&self) -> BTreeSet<usize> {
        let mut set = self.multiplicative_local_minima.clone();
        if !self.multiplicative_global_min_at_boundary {
            set.insert(self.multiplicative_global_min);
        }
        set
    }

    /// Additive curve for one assumed K of the scan.
    pub fn additive_curve_for(&self, assumed_k: usize) -> Option<PenaltyCurve> {
        let entry = self.scan.entries.iter().find(|e| e.assumed_k == assumed_k)?;
        if !(entry.lambda > 0.0 && entry.lambda.is_finite()) {
            return None;
        }
        let start = self.multiplicative.ks.iter().position(|&k| k >= 2)?;
        additive_curve(
            &self.multiplicative.ks[start..],
            &self.multiplicative.raw_errors[start..],
            entry.lambda,
            self.scan.family,
        )
        .ok()
    }
}

/// Run the scan, the multiplicative curve and the agreement step on a sweep.
pub fn estimate(data: &Dataset, sweep: &Sweep, cfg: &EstimateConfig) -> Result<EstimationReport> {
    let scan = additive_scan(data, sweep, cfg.k_assumed_max, &cfg.scan)?;
    let multiplicative = multiplicative_curve(&sweep.ks(), &sweep.errors(), cfg.multiplicative_family)?;
    let minima = multiplicative.minima();
    let mut report = EstimationReport {
        n_points: data.len(),
        dim: data.dim(),
        scan,
        multiplicative,
        multiplicative_global_min: minima.global,
        multiplicative_global_min_at_boundary: minima.global_at_boundary,
        multiplicative_local_minima: minima.local.into_iter().collect(),
        agreed: BTreeSet::new(),
        final_estimate: None,
    };
    let agreement = disambiguate(&report.scan.candidates, &report.multiplicative_candidates());
    report.agreed = agreement.agreed;
    report.final_estimate = agreement.estimate;
    Ok(report)
}
