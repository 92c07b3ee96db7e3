use thiserror::Error;

/// Errors raised by the reliability computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code parameters (n={n}, k={k}): need 1 <= k < n")]
    InvalidCode { n: usize, k: usize },

    #[error("failure-count vector has {got} entries, expected {expected}")]
    CountLength { expected: usize, got: usize },

    #[error("parts sum to {sum}, expected {total}")]
    PartSum { total: u64, sum: u64 },

    #[error("enumeration guard exceeded: {what} (limits: s <= {max_s}, patterns <= {max_patterns})")]
    GuardExceeded {
        what: String,
        max_s: u64,
        max_patterns: u64,
    },

    #[error("rho = {rho} is outside the validity domain, need rho >= {min}")]
    ValidityDomain { rho: String, min: String },

    #[error("volume polynomial v_({i},{j}) needs i + j <= s - 1 with s = {s}")]
    VolumeIndex { i: usize, j: usize, s: usize },

    #[error("gap vector has length {got}, expected {expected}")]
    GapLength { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("cannot parse '{input}': {reason}")]
    Parse { input: String, reason: String },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
