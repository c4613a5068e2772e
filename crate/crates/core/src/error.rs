//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by operator construction, steady-state solvers, closed
/// forms and the sweep engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A bosonic mode was requested with fewer than three Fock levels.
    #[error("invalid truncation: a bosonic mode needs n_max >= 2, got {0}")]
    InvalidTruncation(usize),

    /// Physical parameters violate their domain (negative rate, bad phase, ...).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The steady manifold is not one-dimensional.
    #[error("ambiguous steady state: null-space dimension {nullity} (residual {residual:e})")]
    AmbiguousSteadyState { nullity: usize, residual: f64 },

    /// A normalized correlation was requested for a field with no population.
    #[error("undefined correlation: normalizing moment is {moment}")]
    UndefinedCorrelation { moment: Complex64 },

    /// A block of the low-drive hierarchy is singular.
    #[error("degenerate spectrum: regression block of total order {order} is singular")]
    DegenerateSpectrum { order: usize },

    /// A correlator required by the mixing formula is absent from the table.
    #[error("incomplete correlator table: missing <{0:?}>")]
    IncompleteTable([u32; 4]),

    /// A degenerate squeezing drive beyond the parametric threshold.
    #[error("instability: squeezing drive {lambda} exceeds threshold {threshold}")]
    Instability { lambda: f64, threshold: f64 },

    /// A least-squares series fit is ill-conditioned.
    #[error("window too wide: series fit residual {residual:e} (condition {condition:e})")]
    WindowTooWide { residual: f64, condition: f64 },

    /// A generic domain violation (negative input, wrong list length, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical linear-algebra failure.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// A configuration file could not be read or validated.
    #[error("config error: {0}")]
    Config(String),

    /// Output files could not be written.
    #[error("io error: {0}")]
    Io(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
