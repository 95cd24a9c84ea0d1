use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The lambda interval is empty, which happens when clusters overlap (L < R).
    #[error("degenerate lambda bounds: lower {lower} >= upper {upper}")]
    DegenerateBounds { lower: f64, upper: f64 },

    #[error("k range {k_min}..={k_max} is invalid for {n_points} points")]
    InvalidRange {
        k_min: usize,
        k_max: usize,
        n_points: usize,
    },

    #[error(
        "could not place {clusters} centroids with separation {separation} in a box of side \
         {box_side} after {attempts} attempts; enlarge the placement box or lower the separation"
    )]
    PlacementFailed {
        clusters: usize,
        separation: f64,
        box_side: f64,
        attempts: usize,
    },

    #[error("instance too large for exhaustive search: {points} points, k = {k} (limit 12 points, k <= 4)")]
    InstanceTooLarge { points: usize, k: usize },

    #[error("{path}: row {row}, column {column}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
