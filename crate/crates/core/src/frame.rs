//! Simulation backends: a Pauli frame for sampling and a tableau wrapper.
//!
//! The frame tracks only the error relative to the noiseless circuit, so its
//! measurement results are flips. Detection events and logical readouts are
//! deterministic in the noiseless circuit, which makes the two backends agree
//! on them exactly when fed the same faults.

use rand::Rng;

use crate::error::Result;
use crate::pauli::{Basis, Pauli};
use crate::schedule::StabilizerBackend;
use crate::tableau::Tableau;

#[derive(Debug, Clone)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(num_qubits: usize) -> Self {
        PauliFrame { x: vec![false; num_qubits], z: vec![false; num_qubits] }
    }

    /// X component of the accumulated error, per qubit.
    pub fn x_errors(&self) -> &[bool] {
        &self.x
    }

    pub fn z_errors(&self) -> &[bool] {
        &self.z
    }
}

impl StabilizerBackend for PauliFrame {
    fn reset(&mut self, qubit: usize, _basis: Basis) {
        self.x[qubit] = false;
        self.z[qubit] = false;
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.x[target] ^= self.x[control];
        self.z[control] ^= self.z[target];
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        self.x[qubit] ^= pauli.has_x();
        self.z[qubit] ^= pauli.has_z();
    }

    fn measure(&mut self, qubit: usize, basis: Basis) -> bool {
        match basis {
            Basis::Z => self.x[qubit],
            Basis::X => self.z[qubit],
        }
    }
}

/// Tableau together with the generator used for random measurement outcomes.
#[derive(Debug, Clone)]
pub struct TableauBackend<R> {
    pub tableau: Tableau,
    rng: R,
}

impl<R: Rng> TableauBackend<R> {
    pub fn new(num_qubits: usize, rng: R) -> Result<Self> {
        Ok(TableauBackend { tableau: Tableau::new(num_qubits)?, rng })
    }
}

impl<R: Rng> StabilizerBackend for TableauBackend<R> {
    fn reset(&mut self, qubit: usize, basis: Basis) {
        self.tableau.reset(qubit, basis, &mut self.rng);
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.tableau.cnot(control, target);
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        self.tableau.pauli(qubit, pauli);
    }

    fn measure(&mut self, qubit: usize, basis: Basis) -> bool {
        self.tableau.measure(qubit, basis, &mut self.rng).outcome
    }
}
