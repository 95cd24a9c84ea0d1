//! Estimating the number of clusters with penalized k-means.
//!
//! The crate is organised around the pipeline it supports:
//!
//! - [`geometry`]: closed-form constants for ideal (uniform, spherical,
//!   identical, non-overlapping) clusters, the error ladder around the true
//!   cluster count and the admissible range for the additive penalty
//!   coefficient.
//! - [`clustering`]: deterministic farthest-first seeding followed by Lloyd
//!   iteration, and the sweep over k that produces unpenalized errors.
//! - [`penalty`]: additive (`E + lambda * f(k)`) and multiplicative
//!   (`f(k) * E`) penalized curves, the assumed-vs-estimated scan and the
//!   agreement step combining both.
//! - [`synth`]: seeded generators for ideal cluster datasets and the
//!   half-sphere / dumbbell shapes.
//! - [`outliers`]: single-pass density filter.
//! - [`oracle`]: Monte Carlo moments and exhaustive k-means used to check the
//!   rest of the crate.
//! - [`cli`]: CSV ingestion, report emission and the end-to-end pipeline used
//!   by the `penkm` binary.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory (`cargo run --release --example <name>`).

pub mod cli;
pub mod clustering;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod outliers;
pub mod penalty;
pub mod synth;

pub use clustering::{ClusteringConfig, ClusteringResult, Dataset, StopReason};
pub use error::{Error, Result};
pub use geometry::{ClusterMass, GeometryConstants, LambdaBounds};
pub use penalty::{EstimationReport, PenaltyCurve, PenaltyFamily};
