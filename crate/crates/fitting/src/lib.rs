//! Small numerical toolkit: just what the noise and protocol code needs.

mod lsq;
mod ode;
mod root;

pub use lsq::{least_squares, FitReport, LsqOptions};
pub use ode::{ode_integrate, ode_integrate_linear, OdeOptions};
pub use root::find_root;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("normal equations stayed singular across the damping schedule")]
    Singular,
    #[error("no sign change on [{0}, {1}]")]
    Bracket(f64, f64),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("no convergence after {0} iterations")]
    NotConverged(usize),
}

pub type Result<T> = std::result::Result<T, FitError>;
