//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("boundaries intersect: h+ - h- = {gap:.6e} <= 0 at x1 = {x1:.6}")]
    BoundariesIntersect { x1: f64, gap: f64 },

    #[error("mean boundary gap is {mean_gap:.12} instead of 1 (set normalize_gap to rescale)")]
    MeanGapNotUnit { mean_gap: f64 },

    #[error("degenerate metric: numerical ellipticity constant {constant:.3e} below 1e-8")]
    DegenerateMetric { constant: f64 },

    #[error("point ({x1:.6}, {x2:.6}) at index {index} lies outside the domain")]
    PointOutsideDomain { index: usize, x1: f64, x2: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    Params(String),

    #[error("CFL violation: dt = {dt:.3e} exceeds advective limit; suggested dt <= {suggested:.3e}")]
    CflViolation { dt: f64, suggested: f64 },

    #[error("NaN detected in field '{field}' at step {step}")]
    NanDetected { field: &'static str, step: u64 },

    #[error("snapshot grid mismatch: file is {file_n1}x{file_n2}, expected {want_n1}x{want_n2}")]
    SnapshotGridMismatch {
        file_n1: usize,
        file_n2: usize,
        want_n1: usize,
        want_n2: usize,
    },

    #[error("bad snapshot file: {0}")]
    SnapshotFormat(String),

    #[error("diagnostics: {0}")]
    Diagnostics(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
