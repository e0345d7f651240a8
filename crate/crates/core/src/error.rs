use thiserror::Error;

/// Errors raised by the simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("modes are not orthonormal (overlap residual {0:.3e})")]
    NotOrthonormal(f64),

    #[error("degenerate ground space cannot be resolved: {0}")]
    Degeneracy(String),

    #[error("zero-mode assignment failed: {0}")]
    Assignment(String),

    #[error("schedule discontinuous at junction {junction}: max deviation {deviation:.3e}")]
    Discontinuity { junction: usize, deviation: f64 },

    #[error("invalid braid word: {0}")]
    BraidWord(String),

    #[error("fock space too large: {modes} modes exceeds the limit of {limit}")]
    FockTooLarge { modes: usize, limit: usize },

    #[error("convention check failed: {0}")]
    Convention(String),
}

pub type Result<T> = std::result::Result<T, Error>;
