//! Circuit-level depolarizing noise driven by a single component error rate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Result};
use crate::pauli::Pauli;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    p_comp: f64,
}

impl NoiseParams {
    pub fn new(p_comp: f64) -> Result<Self> {
        check_probability("p_comp", p_comp)?;
        Ok(NoiseParams { p_comp })
    }

    pub fn noiseless() -> Self {
        NoiseParams { p_comp: 0.0 }
    }

    pub fn p_comp(&self) -> f64 {
        self.p_comp
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_comp == 0.0
    }

    /// Probability that a two-qubit gate is followed by a non-identity Pauli pair.
    pub fn two_qubit_rate(&self) -> f64 {
        self.p_comp
    }

    /// Probability that an idle qubit picks up a non-identity Pauli.
    pub fn idle_rate(&self) -> f64 {
        0.8 * self.p_comp
    }

    /// Probability of a wrong preparation or a flipped readout.
    pub fn classical_rate(&self) -> f64 {
        self.p_comp
    }

    /// One of the 15 non-identity two-qubit Paulis, each with rate `p/15`.
    pub fn sample_two_qubit<R: Rng + ?Sized>(&self, rng: &mut R) -> (Pauli, Pauli) {
        let p = self.two_qubit_rate();
        let u: f64 = rng.random();
        if u >= p {
            return (Pauli::I, Pauli::I);
        }
        let k = ((u / p * 15.0) as usize).min(14) + 1;
        (Pauli::ALL[k / 4], Pauli::ALL[k % 4])
    }

    /// X, Y or Z, each with rate `4p/15`.
    pub fn sample_idle<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let p = self.idle_rate();
        let u: f64 = rng.random();
        if u >= p {
            return Pauli::I;
        }
        [Pauli::X, Pauli::Y, Pauli::Z][((u / p * 3.0) as usize).min(2)]
    }

    /// Whether a preparation or readout goes wrong.
    pub fn sample_classical<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.random::<f64>() < self.classical_rate()
    }
}
