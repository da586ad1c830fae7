//! Error types shared across the crate.

use std::fmt;

use crate::estimation::FitResult;

/// Errors produced by generators, fitters, theory predictors, and sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented precondition. The message names
    /// the offending parameter and the constraint.
    InvalidParameter(String),

    /// Residual sum of squares is (numerically) zero, so the profiled
    /// Gaussian likelihood is unbounded. Sweeps treat the trial as invalid
    /// and resample once; zero-noise scenarios fall back to a floored
    /// variance instead (see `montecarlo`).
    DegenerateVariance { rss: f64 },

    /// No optimizer start converged. Carries the best fit found so sweeps
    /// can record the trial with its convergence flag cleared.
    NonConvergence(Box<FitResult>),

    /// Two series that must share a sampling grid do not.
    GridMismatch,

    /// A trajectory left the finite range during integration.
    Diverged { t: f64 },

    /// A numeric root-finder found no sign change on its search grid.
    NoRoot,

    /// No parameter window exists in which the candidate model is preferred.
    NoWindow,

    /// A selection-proportion curve never crosses 50%.
    NoCrossing,

    /// The requested formula variant is not defined for this operation.
    UnsupportedVariant { op: &'static str, variant: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DegenerateVariance { rss } => {
                write!(f, "degenerate variance: RSS = {rss:e} is numerically zero")
            }
            Error::NonConvergence(best) => write!(
                f,
                "no start converged after {} iterations (best RSS {:e})",
                best.iterations, best.rss
            ),
            Error::GridMismatch => write!(f, "time series do not share a sampling grid"),
            Error::Diverged { t } => write!(f, "trajectory diverged (non-finite state at t = {t})"),
            Error::NoRoot => write!(f, "no root bracketed on the search grid"),
            Error::NoWindow => write!(f, "no window in which the candidate model is preferred"),
            Error::NoCrossing => write!(f, "selection proportion never crosses 50%"),
            Error::UnsupportedVariant { op, variant } => {
                write!(f, "{op} does not define the {variant} variant")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
