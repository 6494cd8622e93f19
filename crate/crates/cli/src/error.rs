use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] condcopula_core::Error),

    #[error("infeasible moments at x = {x}: cap c = {cap} is too small for mean {mean} and variance {variance}")]
    InfeasibleMoments { x: f64, cap: f64, mean: f64, variance: f64 },

    #[error("invalid configuration at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {message}")]
    Data { path: String, message: String },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_error(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}
