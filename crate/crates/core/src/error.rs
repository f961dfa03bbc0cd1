use thiserror::Error;

use crate::network::VertexId;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid vertex {vertex}: {reason}")]
    InvalidVertex { vertex: String, reason: String },

    /// The vertex is valid in principle but cannot be represented (index
    /// overflow, conductance overflow). Random walks treat this as censoring.
    #[error("vertex {vertex} is outside the representable range")]
    OutOfRange { vertex: VertexId },

    #[error("window too small: neighbor of {vertex} lies outside the window{}", required_radius.map(|r| format!(" (required radius {r})")).unwrap_or_default())]
    WindowTooSmall { vertex: VertexId, required_radius: Option<usize> },

    #[error("functions live on different windows")]
    WindowMismatch,

    #[error("vertex {0} is not in the window")]
    NotInWindow(VertexId),

    #[error("function is not harmonic: max residual {max_residual:e} exceeds {tolerance:e}")]
    NotHarmonic { max_residual: f64, tolerance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("network classified recurrent; refusing ({0})")]
    Recurrent(String),

    #[error("spec error at {location}: {message}")]
    Spec { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
