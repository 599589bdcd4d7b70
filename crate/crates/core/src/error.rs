use thiserror::Error;

/// Errors produced by the tracking library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance matrix is not positive semi-definite even after jitter")]
    InvalidCovariance,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("density has no components")]
    EmptyDensity,

    #[error("weights cannot be normalized (sum = {0})")]
    DegenerateWeights(f64),

    #[error("collapsed existence probability {sum} exceeds 1 beyond rounding tolerance")]
    CollapseOverflow { sum: f64 },

    #[error("innovation covariance is not invertible")]
    SingularInnovation,

    #[error("target coincides with sensor position; bearing and Doppler undefined")]
    DegenerateGeometry,

    #[error("likelihood is zero for every particle")]
    EmptyLikelihood,

    #[error("invalid unscented transform parameters: lambda + d = {0}")]
    InvalidUnscentedParams(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
