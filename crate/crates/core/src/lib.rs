//! Nodal domain counts of Schrödinger operators on discrete and metric graphs.

pub mod discrete;
pub mod graph;
pub mod io;
pub mod metric;
pub mod riccati;
pub mod verify;
mod tolerances;

pub use graph::{Graph, GraphError, RootedTree, SignPattern};
pub use tolerances::Tolerances;
