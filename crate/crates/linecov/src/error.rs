use core::fmt;

use crate::quadrature::IntegralResult;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two inputs that must share a dimension do not.
    DimensionMismatch { expected: usize, got: usize },
    /// A scaling matrix was not symmetric as stored.
    NotSymmetric,
    /// A matrix required to be positive definite was not, even after the
    /// listed jitter multipliers (relative to the mean diagonal) were tried.
    NotPositiveDefinite { jitter_tried: &'static [f64] },
    /// An argument was outside its documented domain.
    InvalidArgument(&'static str),
    /// A non-adaptive quadrature rule exhausted its highest-order rule
    /// without meeting the requested tolerance. The best value and its
    /// error estimate are still carried.
    ToleranceNotReached(IntegralResult),
    /// The adaptive 2D integrator hit its subdivision depth cap before
    /// meeting the requested tolerance. The best value is still carried.
    DepthCapReached(IntegralResult),
    /// A covariance entry failed to evaluate; carries the matrix position.
    CovarianceEntry {
        row: usize,
        col: usize,
        source: alloc::boxed::Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NotSymmetric => write!(f, "scaling matrix is not symmetric"),
            Error::NotPositiveDefinite { jitter_tried } => write!(
                f,
                "matrix not positive definite after jitter ladder {jitter_tried:?}"
            ),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::ToleranceNotReached(r) => write!(
                f,
                "tolerance not reached: value {} with estimate {}",
                r.value, r.abs_error_estimate
            ),
            Error::DepthCapReached(r) => write!(
                f,
                "subdivision depth cap reached: value {} with estimate {}",
                r.value, r.abs_error_estimate
            ),
            Error::CovarianceEntry { row, col, source } => {
                write!(f, "covariance entry ({row}, {col}): {source}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
