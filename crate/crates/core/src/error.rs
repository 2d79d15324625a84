use thiserror::Error;

/// Errors raised by the engine. Each variant is a domain error: the inputs
/// are well-formed numbers but violate a mathematical precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("game parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("probability `{name}` = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("degenerate payoff spread: S_m^cc == S_m^dd ({value})")]
    DegenerateSpread { value: f64 },

    #[error("controlled payoff is singular at p1 = 1, p4 = 0")]
    SingularControl,

    #[error("target payoff {target} outside the controllable range [{low}, {high}]")]
    TargetOutOfRange { target: f64, low: f64, high: f64 },

    #[error("no feasible ZD strategy for target {target}: {reason}")]
    Infeasible { target: f64, reason: String },

    #[error("strategy is not of zero-determinant form: residual {residual:e}")]
    NotZeroDeterminant { residual: f64 },

    #[error("invalid mechanism configuration: {0}")]
    InvalidMechanism(String),

    #[error("all initial computing powers are zero")]
    ZeroPower,

    #[error("computing power must be finite and non-negative, got {0}")]
    InvalidPower(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("history is empty; at least one round is required")]
    EmptyHistory,

    #[error("invalid experiment configuration: {0}")]
    InvalidExperiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
