use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuditError {
    #[error("site dimension {0} not supported (sites are qubits or qutrits)")]
    InvalidDim(usize),
    #[error("invalid basis label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("post-selection kept weight {0:e}: everything discarded")]
    AllDiscarded(f64),
    #[error("operation requires a density-matrix register")]
    RequiresMixed,
    #[error("invalid state: {0}")]
    InvalidState(String),
}
