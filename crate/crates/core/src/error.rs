use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("spectral grid [{k_min}, {k_max}] does not cover [{need_min}, {need_max}] (Gaussian would be truncated)")]
    GridTooNarrow {
        k_min: f64,
        k_max: f64,
        need_min: f64,
        need_max: f64,
    },

    #[error("sampled medium contains no molecules")]
    EmptyMedium,

    #[error("mean level spacing needs at least 2 molecules, got {0}")]
    TooFewMolecules(usize),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("zero coupling: no detection channel")]
    ZeroCoupling,

    #[error("integrator did not converge to {tolerance:e} within {max_steps} steps (last change {last_change:e})")]
    NonConvergence {
        max_steps: usize,
        tolerance: f64,
        last_change: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fit needs at least {needed} nonempty bins, got {got}")]
    TooFewBins { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
