//! Markovian amplitude damping and dephasing for qubits and qutrits, the
//! |120⟩ / |110⟩ decay amplitudes with and without post-selection, and an
//! executor that interleaves circuit layers with those channels.

mod amplitudes;
mod channel;
mod executor;
mod rates;

pub use amplitudes::{amplitude_a110, amplitude_a120, amplitude_a120_limit, balance_point, leaky_a110, leaky_a120};
pub use channel::{apply_noise_step, lindblad_channel, lindblad_generator, qubit_channel, qutrit_channel, site_channel};
pub use executor::{NoiseModel, Outcome};
pub use rates::{DecayRates, LeakageSpec};

use qroutesim_core::QuditError;
use qroutesim_gates::GateError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NoiseError {
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("closed form needs Γ10 ≠ Γ21; use the limit form")]
    DegenerateRates,
    #[error("invalid rates: {0}")]
    InvalidRates(String),
    #[error(transparent)]
    Qudit(#[from] QuditError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

pub type Result<T> = std::result::Result<T, NoiseError>;

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(NoiseError::InvalidTime(t))
    }
}

/// expm1(x)/x, continuous at 0.
pub(crate) fn phi1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x / 2.0 + x * x / 6.0
    } else {
        x.exp_m1() / x
    }
}
