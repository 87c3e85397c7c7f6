//! Error vocabulary shared by every module.
//!
//! Provides:
//! * `QError` - typed failure cases for exact and numeric evaluation
//! * `QResult<T>` - shorthand result alias

use thiserror::Error;

/// Failure cases surfaced by evaluation routines.
///
/// Exact routines never silently return a wrong value: any division by an
/// exact zero that is not a known structural cancellation is reported as
/// `Pole` (or `Singular` for matrix work), so callers can reject a parameter
/// draw and redraw instead of propagating garbage.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    /// A q-shifted factorial or closed form hit a zero denominator.
    #[error("pole encountered: {0}")]
    Pole(String),

    /// A Gram matrix entry or norm vanished where a nonzero value is required.
    #[error("degenerate parameter point: {0}")]
    Degenerate(String),

    /// A matrix elimination or determinant-based coefficient lost rank.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// An operation requiring a symmetric polynomial received a non-symmetric one.
    #[error("polynomial is not symmetric: {0}")]
    NotSymmetric(String),

    /// A partition does not fit in the requested number of variables.
    #[error("partition length exceeds variable count: {0}")]
    Length(String),

    /// A truncated series failed to meet its accuracy target within the shell cap.
    #[error("series did not converge: {0}")]
    Convergence(String),

    /// A sequence transform was asked to leave its finite support window.
    #[error("index outside supported window: {0}")]
    Support(String),

    /// Invalid argument combination (bad parameter range, wrong dimensions).
    #[error("invalid argument: {0}")]
    Domain(String),
}

pub type QResult<T> = Result<T, QError>;
