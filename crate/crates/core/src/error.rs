use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Jacobi parameters: {0}")]
    InvalidParams(String),

    #[error("requested degree {requested} exceeds the {available} stored Jacobi parameters")]
    ParameterExhaustion { requested: usize, available: usize },

    #[error("CD formula disagrees with direct summation (relative error {rel_err:e})")]
    CdMismatch { rel_err: f64 },

    #[error("degenerate kernel center: K_n(x0, x0) = {0}")]
    DegenerateCenter(f64),

    #[error("window holds {0} zeros, more than the supported maximum")]
    WindowTooLarge(usize),

    #[error("need at least {needed} zeros, found {found}")]
    InsufficientZeros { needed: usize, found: usize },

    #[error("index error: {0}")]
    Index(String),

    #[error("the anderson model requires a seed")]
    SeedRequired,

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("shift range [{lo}, {hi}] is outside the generation range [{min}, {max}]")]
    OutOfRange { lo: i64, hi: i64, min: i64, max: i64 },

    #[error("Herglotz violation at shift {shift}: Im m = {im:e}")]
    HerglotzViolation { shift: usize, im: f64 },

    #[error("degenerate normalization: Im u_1 = 0")]
    DegenerateNormalization,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
