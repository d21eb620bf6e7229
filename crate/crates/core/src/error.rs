//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library. Each variant has a stable kebab-case
/// [`kind`](Error::kind) used in machine-readable CLI reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension d={d}: the walk is recurrent below d=3")]
    UnsupportedDimension { d: usize },

    #[error("invalid side length n={n}: need n >= 2")]
    InvalidSideLength { n: usize },

    #[error("torus size n^d does not fit the addressable range (n={n}, d={d})")]
    SizeOverflow { n: usize, d: usize },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("region of {size} sites exceeds the dense-solve cap of {cap}")]
    RegionTooLarge { size: usize, cap: usize },

    #[error("region is empty")]
    EmptyRegion,

    #[error("region covers the full torus, so the exit time is undefined")]
    FullTorusRegion,

    #[error("empty sample set")]
    EmptySample,

    #[error("empty bulk region for n={n}: the interval (n^beta, n - n^beta] holds no integer")]
    EmptyBulkRegion { n: usize },

    #[error("quadrature did not converge: last refinement {achieved:e}, target {target:e}")]
    QuadratureNoConvergence { achieved: f64, target: f64 },

    #[error("walk exceeded the step budget of {cap} steps")]
    StepBudgetExceeded { cap: u64 },

    #[error("field of {size} sites exceeds the resource cap of {cap}")]
    ResourceExhausted { size: usize, cap: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
}

impl Error {
    /// Stable machine-readable identifier for this error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedDimension { .. } => "unsupported-dimension",
            Error::InvalidSideLength { .. } => "invalid-side-length",
            Error::SizeOverflow { .. } => "size-overflow",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::RegionTooLarge { .. } => "region-too-large",
            Error::EmptyRegion => "empty-region",
            Error::FullTorusRegion => "full-torus-region",
            Error::EmptySample => "empty-sample",
            Error::EmptyBulkRegion { .. } => "empty-bulk-region",
            Error::QuadratureNoConvergence { .. } => "quadrature-no-convergence",
            Error::StepBudgetExceeded { .. } => "step-budget-exceeded",
            Error::ResourceExhausted { .. } => "resource-exhausted",
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::Io(_) => "io",
            Error::Format { .. } => "format",
        }
    }

    /// True for errors that indicate a bad request rather than a failed
    /// computation; the CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedDimension { .. }
                | Error::InvalidSideLength { .. }
                | Error::SizeOverflow { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter { .. }
                | Error::EmptyBulkRegion { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
