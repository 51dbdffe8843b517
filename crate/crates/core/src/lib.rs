//! Simulation of planar surface codes on lattices with fabrication defects.
//!
//! Broken qubits and couplers are removed from the lattice and the damaged
//! checks around them are merged into superchecks. The resulting effective
//! code is run under circuit-level depolarizing noise with gauge
//! measurements alternating between the two check types, and decoded with
//! minimum-weight perfect matching.

pub mod decoder;
pub mod effective_code;
pub mod error;
pub mod experiments;
pub mod frame;
pub mod geometry;
pub mod noise;
pub mod pauli;
pub mod schedule;
pub mod syndrome;
pub mod tableau;
mod unionfind;

pub use error::{Error, Result};
