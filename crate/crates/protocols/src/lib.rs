//! Measurement protocols for single routers and the two-layer network:
//! θ/φ scans, state tomography, random access tests and the Floquet
//! calibration loop, all run on the noisy simulator.

mod address;
mod floquet;
mod leakage;
mod nm;
mod qst;
mod rat;
mod rng;
mod scans;

pub use address::{AddressBasis, AddressState};
pub use floquet::{floquet_cost, floquet_populations, FloquetCost};
pub use leakage::leakage_revival;
pub use nm::{nelder_mead, NmOptions, NmResult};
pub use qst::{qst, qst_router, trace_distance, QstMethod, QstResult};
pub use rat::{
    delta_theta_for_leakage, fit_rat, m_rat, rat_addresses, rat_single, rat_single_circuit, rat_two_layer, rat_two_layer_circuit, RatConfig,
    RatFit, RatResult,
};
pub use rng::{sample_counts, trial_rng, TrialRng};
pub use scans::{fit_phi_offset, phi_scan, theta_scan, PhiPoint, ThetaPoint, ODD_STATES, EVEN_STATES};

use qroutesim_core::QuditError;
use qroutesim_fitting::FitError;
use qroutesim_gates::GateError;
use qroutesim_noise::NoiseError;
use qroutesim_routing::RoutingError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("invalid protocol input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Qudit(#[from] QuditError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;
