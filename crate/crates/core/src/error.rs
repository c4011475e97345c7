use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("problem too large: {0}")]
    Size(String),

    #[error("unsupported structure: {0}")]
    Structure(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("embedding error: {0}")]
    Embedding(String),

    #[error("QUBO has no nonzero coefficients")]
    EmptySpectrum,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
