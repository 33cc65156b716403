use thiserror::Error;

use crate::params::ValidationReport;

/// Errors raised by the model, its comparison systems and the threshold machinery.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid step size h = {0}; must be positive and finite")]
    InvalidStepSize(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid coefficient `{name}`: {reason}")]
    InvalidCoefficient { name: String, reason: String },

    #[error("invalid functional response `{name}`: {reason}")]
    InvalidResponse { name: String, reason: String },

    #[error("positivity violation at step {step}: {detail}")]
    PositivityViolation { step: usize, detail: String },

    #[error("implicit prey update did not converge at step {step}: residual {residual:e}")]
    RootNotConverged { step: usize, residual: f64 },

    #[error("attractor search did not converge: residual {residual:e} > tolerance {tol:e} after burn-in {burn_in}")]
    NoConvergence { residual: f64, tol: f64, burn_in: usize },

    #[error("reference solution does not cover index {index} (covers {start}..{end})")]
    ReferenceWindowExhausted { index: usize, start: usize, end: usize },

    #[error("coefficients are not periodic; a common period is required")]
    AperiodicInput,

    #[error("no-predation threshold requires a_n = 0, found a_{index} = {value}")]
    NonzeroPredation { index: usize, value: f64 },

    #[error("inconsistent thresholds: R^u({extinction_lambda}) < 1 and R^l({persistence_lambda}) > 1; reference solutions are unreliable")]
    InconsistentThresholds {
        extinction_lambda: usize,
        persistence_lambda: usize,
    },

    #[error("trajectory has {len} states, needs more than the tail window {tail}")]
    TrajectoryTooShort { len: usize, tail: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("predator response `{0}` does not factor as g0(x, y) * z")]
    FactorizationUnavailable(String),

    #[error("hypothesis validation failed: {0}")]
    Validation(ValidationReport),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
