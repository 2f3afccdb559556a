use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate spectral segment [{a}, {b}]")]
    DegenerateSegment { a: f64, b: f64 },

    #[error(
        "Chebyshev tail too large at t = {t}: |c_last|/max|c| = {ratio:e} exceeds {tolerance:e}"
    )]
    TailTooLarge { t: f64, ratio: f64, tolerance: f64 },

    #[error("Chebyshev-to-Taylor conversion requires m <= {max}, got {m}")]
    Conditioning { m: usize, max: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
}
