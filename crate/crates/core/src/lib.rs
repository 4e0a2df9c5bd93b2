//! Synthesis, simulation and analysis of circuits for nearest-neighbor
//! qubit grids, with and without fast classical control.
//!
//! * [`compactor`] builds multi-controlled gates and fan-out in depth
//!   linear in the grid side.
//! * [`teleport`] moves qubits along teleportation chains in constant depth
//!   and compiles abstract circuits onto a grid with that overhead.
//! * [`sim`] checks results exactly: classical, stabilizer and dense.
//! * [`analyze`] measures light cones and depth lower bounds.

pub mod analyze;
pub mod circuit;
pub mod compactor;
pub mod error;
pub mod format;
pub mod geom;
pub mod pauli;
pub mod render;
pub mod sim;
pub mod teleport;
pub mod verify;

pub use error::{Error, Result};
