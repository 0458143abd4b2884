//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by mesh construction, evaluation and the bound pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("index {index:?} is outside the mesh with counts {counts:?}")]
    IndexOutOfRange {
        index: Vec<usize>,
        counts: Vec<usize>,
    },
    #[error("axis {axis} is out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("grid functions live on different meshes")]
    MeshMismatch,
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: String, iterations: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
