use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the documented domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result exceeds the floating-point range.
    #[error("overflow: {what} overflows for arguments above {threshold}")]
    Overflow { what: String, threshold: f64 },
    /// Invalid mode index, e.g. |m| > n for a spherical harmonic.
    #[error("index error: {0}")]
    Index(String),
    /// A Green's function was evaluated at coincident points.
    #[error("kernel is singular at coincident points")]
    Singular,
    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An input parameter is invalid.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },
    /// A construction hit a vanishing normalization.
    #[error("degenerate construction: {0}")]
    Degenerate(String),
    /// A source reaches outside the admissible support.
    #[error("support violation: {0}")]
    Support(String),
    /// The independent residual families disagree.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    /// Grid-sampled data requested at points that are not grid nodes.
    #[error("source is only sampled on its quadrature grid: {0}")]
    NotSampled(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
