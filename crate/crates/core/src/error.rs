use thiserror::Error;

/// Errors raised by the simulation and numerics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("quadrature did not converge: error estimate {error:e} above tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("series did not converge: {0}")]
    NonConvergent(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("law has unbounded support; exact lattice evaluation needs a support bound")]
    UnboundedSupport,

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("parameters outside the domain of the result: {0}")]
    Domain(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("walk position overflowed 64-bit range at step {step}")]
    Overflow { step: usize },

    #[error("window ({t0}, {tf}] out of range for a path with {len} steps")]
    Window { t0: usize, tf: usize, len: usize },

    #[error("medium spacing must be positive, got {value} at bond {bond}")]
    NonPositiveSpacing { bond: i64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
