//! Packed triangular placement of bucket-brigade router trees on a
//! square-lattice processor.
//!
//! A router is a T: the address qubit plus three of its four lattice
//! neighbours (input, left, right), i.e. an isosceles right triangle with
//! the address at its centre. A child's input is its parent's left or right
//! vertex; nothing else is shared.

mod export;
mod grid;
mod region;
mod search;
mod triangle;

pub use export::{layout_csv, layout_json, parse_layout_json};
pub use grid::{Coord, Dir, GridSpec};
pub use search::{
    best_layout, best_layout_by, compactness, grow_layout, qubits_needed, BestLayout, GrowFailure, Seed, DEFAULT_BUDGET,
};
pub use triangle::{check_layout, LayoutReport, Side, Triangle, TriangleLayout, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayoutError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid layout file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LayoutError>;
