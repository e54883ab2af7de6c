use thiserror::Error;

/// Errors raised by the entropy library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid isoelastic order gamma = {0}: need gamma < 1 and gamma != 0")]
    InvalidGamma(f64),

    #[error("invalid Renyi order alpha = {0}: need alpha > 0 and alpha != 1")]
    InvalidAlpha(f64),

    #[error("invalid scale {name} = {value}: must be strictly positive")]
    InvalidScale { name: &'static str, value: f64 },

    #[error("convex dual evaluated at negative argument {0}")]
    NegativeArgument(f64),

    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("probability vector is empty")]
    EmptyVector,

    #[error("probability vector has non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probability vector sums to {sum}, not 1 (pass the renormalize flag to rescale)")]
    NotNormalized { sum: f64 },

    #[error("vectors have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("all probabilities are zero")]
    DegenerateInput,

    #[error("{first} is not absolutely continuous with respect to {second}")]
    NotAbsolutelyContinuous {
        first: &'static str,
        second: &'static str,
    },

    #[error("utility is not normalized: u(1) = {0}, expected 0 (apply affine(1, -u(1)))")]
    UtilityNotNormalized(f64),

    #[error("brute-force grid supports at most 4 atoms, got {0}")]
    TooLarge(usize),

    #[error("grid resolution {0} is below the minimum of 100")]
    ResolutionTooSmall(usize),

    #[error("no convergence after {iterations} iterations (bracket [{lo}, {hi}])")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("objective is unbounded above")]
    UnboundedAbove,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("internal self-check failed: {0}")]
    SelfCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
