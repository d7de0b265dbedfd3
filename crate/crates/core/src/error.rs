use thiserror::Error;

/// Invalid or inconsistent scenario input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("`{key}` must be {expected}, got {value}")]
    OutOfRange {
        key: String,
        expected: &'static str,
        value: f64,
    },
    #[error("task probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("no task classes defined")]
    NoTasks,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("cannot read `{path}`: {reason}")]
    Io { path: String, reason: String },
}

/// Failures of the analytic pipeline or the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericalError {
    #[error("quadrature did not reach tolerance: estimate {value:.6e}, error {abs_error:.3e} after {intervals} intervals")]
    Quadrature { value: f64, abs_error: f64, intervals: usize },
    #[error("truncated and infinite-range quadrature disagree: {truncated:.12e} vs {infinite:.12e}")]
    TailMismatch { truncated: f64, infinite: f64 },
    #[error("non-finite result: {0}")]
    NonFinite(&'static str),
    #[error("fixed point did not converge after {iterations} iterations (last step {last_step:.3e})")]
    FixedPoint { iterations: usize, last_step: f64 },
    #[error("edge server unstable: utilization {utilization:.6}")]
    Unstable { utilization: f64 },
    #[error("{0} link unserviceable at the SNR threshold")]
    Unserviceable(&'static str),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("rejection sampling gave up after {0} redraws")]
    Redraw(u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] NumericalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
