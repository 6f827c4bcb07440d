use qroutesim_core::QuditError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("{gate} cannot act on a site of dimension {dim}")]
    Unsupported { gate: String, dim: usize },
    #[error("{gate} expects {want} sites, got {got}")]
    Arity { gate: String, want: usize, got: usize },
    #[error("site {site} out of range for a {n}-site circuit")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("post-selection has no inverse / unitary")]
    NotUnitary,
    #[error("circuit text line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Qudit(#[from] QuditError),
}
