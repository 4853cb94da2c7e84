//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by model construction, solvers, and dataset I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Two containers that must agree in length (or an operator and its
    /// input) do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter violates its documented domain (e.g. a non-positive
    /// bandwidth or an elevation outside `[0, pi/2)`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A required collection is empty.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// An index does not address a valid element.
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// A NaN or infinity appeared where only finite values are allowed.
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    /// A numerical method cannot continue (e.g. conjugate gradients met
    /// non-positive curvature, so the system is not positive definite).
    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    /// A file is not a valid container: bad magic, malformed header, or
    /// inconsistent declared sizes.
    #[error("format error: {0}")]
    Format(String),

    /// A container ended before its declared payload was complete.
    #[error("truncated file: {0}")]
    Truncated(String),

    /// A container declares a format version this build does not read.
    #[error("unsupported format version {found} (supported: {supported})")]
    Version { found: u32, supported: u32 },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
