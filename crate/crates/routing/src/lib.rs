//! Bucket-brigade routing trees built from QRouters, and the circuits that
//! load an address, move a bus qubit to a leaf and back, and unload.

mod compile;
mod landscape;
mod tree;

pub use compile::{
    clifford_router, compile_query, gate_counts, router_stage, transfer_gates, CompileOptions, CompileScheme,
    CompiledQuery, Mode, StageRange,
};
pub use landscape::{product_form, two_layer_landscape, two_layer_network, LandscapePoint, TWO_LAYER_DIMS};
pub use tree::{build_tree, NodeBinding, RoutingTree, MAX_SIM_LAYERS};

use qroutesim_core::QuditError;
use qroutesim_gates::GateError;
use qroutesim_noise::NoiseError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RoutingError {
    #[error("a routing tree needs at least one layer")]
    NoLayers,
    #[error("{layers} layers exceed the simulation capacity of {max}")]
    Capacity { layers: usize, max: usize },
    #[error("scheme {scheme} cannot run a {mode} query")]
    IncompatibleMode { mode: String, scheme: String },
    #[error("memory has {got} bits, tree has {want} leaves")]
    MemorySize { want: usize, got: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Qudit(#[from] QuditError),
}

pub type Result<T> = std::result::Result<T, RoutingError>;
