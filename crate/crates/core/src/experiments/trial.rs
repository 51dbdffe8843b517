use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decoder::{logical_failure, Correction, DecodingGraph, WeightModel};
use crate::effective_code::{
    build_effective_code, map_to_disabled, min_effective_distance, sample_fabrication, EffectiveCode, FabricationSpec,
};
use crate::error::{check_probability, invalid, Error, Result};
use crate::frame::{PauliFrame, TableauBackend};
use crate::geometry::{CheckKind, CodeLayout};
use crate::noise::NoiseParams;
use crate::pauli::Pauli;
use crate::schedule::{build_schedule, run_round, Protocol, RoundSchedule, StabilizerBackend};
use crate::syndrome::{detection_events, DefectSet, SyndromeHistory};

/// Which simulator executes the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Backend {
    /// Pauli frame; exact for detection events and fast.
    #[default]
    Frame,
    /// Full stabilizer tableau.
    Tableau,
}

/// Independent random streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Fabrication = 0,
    Noise = 1,
    Measurement = 2,
}

/// Generator for one stream of one trial, reproducible from the master seed.
pub fn trial_rng(seed: u64, trial: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(4).wrapping_add(stream as u64));
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub distance: usize,
    pub p_comp: f64,
    pub p_qubit: f64,
    pub p_link: f64,
    /// Noisy rounds; defaults to twice the distance.
    pub rounds: Option<usize>,
    pub weights: WeightModel,
    pub backend: Backend,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(distance: usize, p_comp: f64) -> Self {
        TrialConfig {
            distance,
            p_comp,
            p_qubit: 0.0,
            p_link: 0.0,
            rounds: None,
            weights: WeightModel::LogLikelihood,
            backend: Backend::Frame,
            seed: 0,
        }
    }

    pub fn with_fabrication(mut self, p_qubit: f64, p_link: f64) -> Self {
        self.p_qubit = p_qubit;
        self.p_link = p_link;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.distance < 2 {
            return Err(invalid(format!("code distance must be at least 2, got {}", self.distance)));
        }
        check_probability("p_comp", self.p_comp)?;
        check_probability("p_qubit", self.p_qubit)?;
        check_probability("p_link", self.p_link)?;
        if self.rounds == Some(0) {
            return Err(invalid("at least one noisy round is required"));
        }
        Ok(())
    }

    pub fn protocol(&self) -> Protocol {
        Protocol { noisy_rounds: self.rounds.unwrap_or(2 * self.distance) }
    }

    pub fn noise(&self) -> Result<NoiseParams> {
        NoiseParams::new(self.p_comp)
    }

    pub fn has_random_fabrication(&self) -> bool {
        self.p_qubit > 0.0 || self.p_link > 0.0
    }
}

/// Result of running one shot on an instance.
#[derive(Debug, Clone)]
pub struct Shot {
    pub history: SyndromeHistory,
    pub defects: DefectSet,
    pub correction: Correction,
    pub logical_error: bool,
}

/// Everything about a fabricated instance that does not change between shots.
#[derive(Debug, Clone)]
pub struct Instance<'a> {
    pub layout: &'a CodeLayout,
    pub code: EffectiveCode,
    pub protocol: Protocol,
    pub noise: NoiseParams,
    schedules: [RoundSchedule; 2],
    pub graph: DecodingGraph,
}

impl<'a> Instance<'a> {
    /// Requires a code that has not percolated.
    pub fn new(
        layout: &'a CodeLayout,
        code: EffectiveCode,
        noise: NoiseParams,
        weights: WeightModel,
        protocol: Protocol,
    ) -> Result<Self> {
        if code.percolated() {
            return Err(invalid("cannot run a memory experiment on a percolated instance"));
        }
        let schedules = [build_schedule(layout, &code, 0), build_schedule(layout, &code, 1)];
        let graph = DecodingGraph::new(layout, &code, &noise, weights, protocol)?;
        Ok(Instance { layout, code, protocol, noise, schedules, graph })
    }

    /// Runs the whole round sequence on `backend`, drawing circuit faults from `rng`.
    pub fn execute<B: StabilizerBackend + ?Sized, R: Rng + ?Sized>(
        &self,
        backend: &mut B,
        rng: &mut R,
    ) -> SyndromeHistory {
        let mut history = SyndromeHistory::default();
        let quiet = NoiseParams::noiseless();
        for round in 0..self.protocol.total_rounds() {
            let noisy = self.protocol.is_noisy(round);
            let noise = if noisy { &self.noise } else { &quiet };
            // Schedules depend only on parity; the templates carry rounds 0 and 1.
            let mut outcomes = run_round(backend, &self.schedules[round % 2], noise, rng);
            outcomes.round_index = round;
            history.push(outcomes, !noisy);
        }
        history
    }

    /// Plaquette detection events of a history and the matching correction for them.
    pub fn decode(&self, history: &SyndromeHistory) -> Result<(DefectSet, Correction)> {
        let defects = detection_events(history, &self.code, CheckKind::Plaquette)?;
        let nodes = self.graph.defect_nodes(&defects)?;
        let correction = self.graph.decode(&nodes)?;
        Ok((defects, correction))
    }

    /// One shot with the Pauli-frame backend.
    pub fn run_frame<R: Rng>(&self, noise_rng: &mut R) -> Result<Shot> {
        let mut frame = PauliFrame::new(self.layout.num_qubits());
        let history = self.execute(&mut frame, noise_rng);
        let (defects, correction) = self.decode(&history)?;
        let logical_error = logical_failure(self.layout, &self.code, frame.x_errors(), &correction)?;
        Ok(Shot { history, defects, correction, logical_error })
    }

    /// One shot with the tableau backend; the correction is applied to the
    /// state and the logical is read off as an expectation value.
    pub fn run_tableau<R: Rng, M: Rng>(&self, noise_rng: &mut R, measurement_rng: M) -> Result<Shot> {
        let mut backend = TableauBackend::new(self.layout.num_qubits(), measurement_rng)?;
        let history = self.execute(&mut backend, noise_rng);
        let (defects, correction) = self.decode(&history)?;
        for &q in &correction.flips {
            backend.tableau.pauli(q, Pauli::X);
        }
        let z_product = |qubits: &mut dyn Iterator<Item = usize>| -> Vec<(usize, Pauli)> {
            qubits.map(|q| (q, Pauli::Z)).collect()
        };
        for (g, group) in self.code.sector(CheckKind::Plaquette).groups().iter().enumerate() {
            let ops = z_product(&mut group.support.iter().map(|&q| self.layout.index(q)));
            if backend.tableau.expectation(&ops) != Some(false) {
                return Err(Error::Decoder(format!("plaquette group {g} not restored to +1")));
            }
        }
        let ops = z_product(&mut self.code.logical_z_cut().iter().map(|&q| self.layout.index(q)));
        let logical_error = match backend.tableau.expectation(&ops) {
            Some(v) => v,
            None => return Err(Error::Internal("logical readout is not deterministic".into())),
        };
        Ok(Shot { history, defects, correction, logical_error })
    }

    pub fn run<R: Rng, M: Rng>(&self, backend: Backend, noise_rng: &mut R, measurement_rng: M) -> Result<Shot> {
        match backend {
            Backend::Frame => self.run_frame(noise_rng),
            Backend::Tableau => self.run_tableau(noise_rng, measurement_rng),
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialOutcome {
    Percolated,
    Completed { logical_error: bool, effective_distance: usize, defects: usize },
}

/// Builds the effective code of a fabrication spec.
pub fn fabricate(layout: &CodeLayout, spec: &FabricationSpec) -> Result<EffectiveCode> {
    build_effective_code(layout, &map_to_disabled(layout, spec))
}

/// Samples a fabrication for trial `index` and runs one shot on it.
pub fn run_trial(cfg: &TrialConfig, layout: &CodeLayout, index: u64) -> Result<TrialOutcome> {
    let mut fab_rng = trial_rng(cfg.seed, index, Stream::Fabrication);
    let spec = sample_fabrication(layout, cfg.p_qubit, cfg.p_link, &mut fab_rng)?;
    let code = fabricate(layout, &spec)?;
    if code.percolated() {
        return Ok(TrialOutcome::Percolated);
    }
    let instance = Instance::new(layout, code, cfg.noise()?, cfg.weights, cfg.protocol())?;
    run_on_instance(cfg, &instance, index)
}

/// Runs shot `index` on a fixed instance.
pub fn run_on_instance(cfg: &TrialConfig, instance: &Instance<'_>, index: u64) -> Result<TrialOutcome> {
    let mut noise_rng = trial_rng(cfg.seed, index, Stream::Noise);
    let meas_rng = trial_rng(cfg.seed, index, Stream::Measurement);
    let shot = instance.run(cfg.backend, &mut noise_rng, meas_rng)?;
    Ok(TrialOutcome::Completed {
        logical_error: shot.logical_error,
        effective_distance: min_effective_distance(&instance.code).unwrap_or(0),
        defects: shot.defects.len(),
    })
}
