use thiserror::Error;

/// Errors raised by moment generation, function handling and the approximation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A hypothesis or precondition does not hold.
    ///
    /// `requirement` names the violated inequality, e.g. `rA < 1`.
    #[error("requires {requirement}; got {got}")]
    Hypothesis { requirement: String, got: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A series whose convergence needs `u < 1` was asked for at `u >= 1`.
    #[error("divergent series: requires {requirement}; got {got}")]
    Divergence { requirement: String, got: String },

    #[error("non-finite value at z = {re} + {im}i")]
    EvaluationFailure { re: f64, im: f64 },

    #[error("|z| = {modulus} lies outside the disk of analyticity |z| < {radius}")]
    Domain { modulus: f64, radius: f64 },

    #[error("growth envelope violated at k = {k}: |c_k| = {coefficient} > {envelope}")]
    EnvelopeViolation { k: usize, coefficient: f64, envelope: f64 },

    #[error("series truncation failed: {0}")]
    Truncation(String),

    #[error("interpolation system too ill-conditioned: {0}")]
    Conditioning(String),

    /// The function is a polynomial of degree <= 1, so quantities normalised by f'' are undefined.
    #[error("degenerate function: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A row of a convergence study failed.
    #[error("n = {n}: {source}")]
    Row { n: u64, source: Box<Error> },
}

impl Error {
    pub(crate) fn hypothesis(requirement: impl Into<String>, got: impl ToString) -> Self {
        Error::Hypothesis {
            requirement: requirement.into(),
            got: got.to_string(),
        }
    }

    pub(crate) fn divergence(requirement: impl Into<String>, got: impl ToString) -> Self {
        Error::Divergence {
            requirement: requirement.into(),
            got: got.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
