use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid step {step} does not divide the delay {delay}")]
    MisalignedGrid { delay: f64, step: f64 },

    /// Non-finite or exploding values; the step is too coarse for the mode.
    #[error("numerical failure in mode {mode:?} (lambda = {lambda}) at node {node}: {detail}")]
    Numerical {
        mode: Option<usize>,
        lambda: f64,
        node: usize,
        detail: String,
    },

    #[error("lattice is empty")]
    EmptyLattice,

    #[error("covariance of mode {mode} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { mode: usize, min_eigenvalue: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
