//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by identification, geometry, synthesis, and control routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("empty polytope: {0}")]
    EmptySet(String),

    #[error("polytope unbounded in direction required by {0}")]
    Unbounded(String),

    #[error("rank condition violated: {0} (smallest singular value {1:.3e})")]
    RankDeficient(String, f64),

    #[error("insufficient excitation for sampled data: {0}")]
    InsufficientExcitation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("LMI problem infeasible: {0}")]
    LmiInfeasible(String),

    #[error("LMI solver undecided after iteration limit: {0}")]
    LmiUndecided(String),

    #[error("QP infeasible")]
    QpInfeasible,

    #[error("projection exceeded the intermediate row cap of {cap} rows; reduce dimensions")]
    ProjectionBlowup { cap: usize },

    #[error("sample deficit: {got} samples provided, {required} required")]
    SampleDeficit { got: usize, required: usize },

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
