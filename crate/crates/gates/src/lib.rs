//! Transition-composite-gate (TCG) library.
//!
//! Conventions shared by every constructor here:
//! * two-site √CZ gates take the sites as `[data, control]`; the exchanged pair
//!   is |11⟩ ↔ |02⟩ of that ordered pair (the control carries the |2⟩), and the
//!   gate is the identity on every other two-qutrit basis state;
//! * a QRouter sends its input to the right branch for address |0⟩ and to the
//!   left branch for address |1⟩ (non-eraser) or |2⟩ (eraser), so the address
//!   cos θ|0⟩ + e^{iφ} sin θ|L⟩ gives P_L = sin²θ;
//! * global phases are kept; comparisons that ignore them say so.

mod circuit;
mod cswap;
mod error;
mod floquet;
mod kinds;
mod router;
mod text;

pub use circuit::{Circuit, Layer, Op, Step};
pub use cswap::{
    cswap_gates, cswap_sequence, ideal_cswap_block, leaky_cswap_matrix, printed_leaky_cswap_matrix, restrict_to,
    sp_cswap_gates, sp_cswap_sequence, CswapOrder, SpBasis, CSWAP_SUBSPACE, SP_TRANSFER_SUBSPACE,
};
pub use error::GateError;
pub use floquet::FloquetParams;
pub use kinds::{
    single_qutrit_matrix, sqrt_cz_block, sqrt_cz_matrix, GateKind, GateSpec, Levels, SingleKind, SingleQutritGate,
    SqrtCzParams, DEFAULT_SINGLE_NS, DEFAULT_SQRT_CZ_NS,
};
pub use router::{
    address_state, flip_gates, printed_router_block, qrouter_circuit, qrouter_circuit_with, qrouter_gates,
    router_subspace, RouterParams, RouterSites, Scheme,
};
pub use text::{parse_circuit, write_circuit};

pub type Result<T> = std::result::Result<T, GateError>;
