//! Syndrome-extraction circuits for an effective code.
//!
//! A round takes six timesteps: ancilla preparation, four CNOT layers in the
//! order north, west, east, south, and ancilla measurement. Checks that are
//! not part of a supercheck are measured every round. Members of star
//! superchecks are measured only in even rounds and members of plaquette
//! superchecks only in odd rounds, so anticommuting gauges never share a
//! round.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::effective_code::{CheckGroup, EffectiveCode};
use crate::geometry::{CheckKind, CodeLayout, Coord, Direction};
use crate::noise::NoiseParams;
use crate::pauli::{Basis, Pauli};

/// Which supercheck type a round measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    X,
    Z,
}

impl Parity {
    pub fn of_round(round: usize) -> Parity {
        if round.is_multiple_of(2) {
            Parity::X
        } else {
            Parity::Z
        }
    }

    fn measures(self, kind: CheckKind) -> bool {
        matches!((self, kind), (Parity::X, CheckKind::Star) | (Parity::Z, CheckKind::Plaquette))
    }
}

/// Whether the members of `group` are measured in `round`.
pub fn group_measured_in(group: &CheckGroup, kind: CheckKind, round: usize) -> bool {
    !group.is_supercheck() || Parity::of_round(round).measures(kind)
}

/// Operations a simulator must support to run a round.
pub trait StabilizerBackend {
    fn reset(&mut self, qubit: usize, basis: Basis);
    fn cnot(&mut self, control: usize, target: usize);
    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli);
    /// `true` for a −1 outcome, or for a flip when the backend tracks errors only.
    fn measure(&mut self, qubit: usize, basis: Basis) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotKind {
    Prepare,
    Cnot(Direction),
    Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operation {
    Prepare { qubit: usize, basis: Basis },
    Cnot { control: usize, target: usize },
    Measure { qubit: usize, basis: Basis, check: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub kind: SlotKind,
    pub ops: Vec<Operation>,
    /// Enabled qubits with nothing to do in this slot.
    pub idle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSchedule {
    pub round_index: usize,
    pub parity: Parity,
    pub slots: Vec<Slot>,
    /// Check indices measured this round, ascending.
    pub measured: Vec<usize>,
}

/// Number of timesteps per round.
pub const SLOTS_PER_ROUND: usize = 6;

/// Timestep of the CNOT between a check and its neighbour in `dir`.
pub fn cnot_slot(dir: Direction) -> usize {
    1 + dir.order()
}

pub fn build_schedule(layout: &CodeLayout, code: &EffectiveCode, round_index: usize) -> RoundSchedule {
    let parity = Parity::of_round(round_index);
    let mut enabled = vec![false; layout.num_qubits()];
    for &q in layout.data_qubits() {
        let qi = layout.index(q);
        enabled[qi] = !code.is_disabled(qi);
    }
    let mut measured = Vec::new();
    for kind in CheckKind::ALL {
        let sector = code.sector(kind);
        for group in sector.groups() {
            for &ci in &group.measured {
                enabled[layout.index(layout.check(ci).site)] = true;
                if group_measured_in(group, kind, round_index) {
                    measured.push(ci);
                }
            }
        }
    }
    measured.sort_unstable();

    let mut slots = Vec::with_capacity(SLOTS_PER_ROUND);
    let mut busy = vec![false; layout.num_qubits()];
    let mut finish = |kind: SlotKind, ops: Vec<Operation>, busy: &mut Vec<bool>| {
        let idle = (0..layout.num_qubits()).filter(|&q| enabled[q] && !busy[q]).collect();
        busy.iter_mut().for_each(|b| *b = false);
        slots.push(Slot { kind, ops, idle });
    };

    let basis_of = |ci: usize| match layout.check(ci).kind {
        CheckKind::Star => Basis::X,
        CheckKind::Plaquette => Basis::Z,
    };
    let ancilla = |ci: usize| layout.index(layout.check(ci).site);

    let mut ops = Vec::new();
    for &ci in &measured {
        busy[ancilla(ci)] = true;
        ops.push(Operation::Prepare { qubit: ancilla(ci), basis: basis_of(ci) });
    }
    finish(SlotKind::Prepare, ops, &mut busy);

    for dir in Direction::ALL {
        let mut ops = Vec::new();
        for &ci in &measured {
            let a = ancilla(ci);
            let Some(q) = layout.check(ci).site.step(dir, layout.size()) else {
                continue;
            };
            let qi = layout.index(q);
            if code.is_disabled(qi) {
                continue;
            }
            busy[a] = true;
            busy[qi] = true;
            ops.push(match layout.check(ci).kind {
                CheckKind::Star => Operation::Cnot { control: a, target: qi },
                CheckKind::Plaquette => Operation::Cnot { control: qi, target: a },
            });
        }
        finish(SlotKind::Cnot(dir), ops, &mut busy);
    }

    let mut ops = Vec::new();
    for &ci in &measured {
        busy[ancilla(ci)] = true;
        ops.push(Operation::Measure { qubit: ancilla(ci), basis: basis_of(ci), check: ci });
    }
    finish(SlotKind::Measure, ops, &mut busy);

    RoundSchedule { round_index, parity, slots, measured }
}

/// Raw outcomes of one round, ordered by check index (and hence by site).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundOutcomes {
    pub round_index: usize,
    /// `(check index, outcome)` with `true` meaning −1.
    pub outcomes: Vec<(usize, bool)>,
}

impl RoundOutcomes {
    /// One line `round <k> <r,c>=<+1|-1> ...`.
    pub fn dump(&self, layout: &CodeLayout) -> String {
        let mut line = format!("round {}", self.round_index);
        for &(ci, v) in &self.outcomes {
            let site: Coord = layout.check(ci).site;
            let _ = write!(line, " {site}={}", if v { "-1" } else { "+1" });
        }
        line
    }
}

/// Executes one round on `backend`, drawing faults from `rng` unless the
/// noise is switched off.
pub fn run_round<B, R>(backend: &mut B, schedule: &RoundSchedule, noise: &NoiseParams, rng: &mut R) -> RoundOutcomes
where
    B: StabilizerBackend + ?Sized,
    R: Rng + ?Sized,
{
    let noisy = !noise.is_noiseless();
    let mut outcomes = Vec::with_capacity(schedule.measured.len());
    for slot in &schedule.slots {
        for op in &slot.ops {
            match *op {
                Operation::Prepare { qubit, basis } => {
                    backend.reset(qubit, basis);
                    if noisy && noise.sample_classical(rng) {
                        let flip = if basis == Basis::Z { Pauli::X } else { Pauli::Z };
                        backend.apply_pauli(qubit, flip);
                    }
                }
                Operation::Cnot { control, target } => {
                    backend.cnot(control, target);
                    if noisy {
                        let (a, b) = noise.sample_two_qubit(rng);
                        backend.apply_pauli(control, a);
                        backend.apply_pauli(target, b);
                    }
                }
                Operation::Measure { qubit, basis, check } => {
                    let mut v = backend.measure(qubit, basis);
                    if noisy && noise.sample_classical(rng) {
                        v = !v;
                    }
                    outcomes.push((check, v));
                }
            }
        }
        if noisy {
            for &q in &slot.idle {
                let p = noise.sample_idle(rng);
                backend.apply_pauli(q, p);
            }
        }
    }
    RoundOutcomes { round_index: schedule.round_index, outcomes }
}

/// Fault locations per round, by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultAudit {
    pub preparations: usize,
    pub two_qubit_gates: usize,
    pub idles: usize,
    pub measurements: usize,
}

pub fn audit(schedule: &RoundSchedule) -> FaultAudit {
    let mut a = FaultAudit::default();
    for slot in &schedule.slots {
        a.idles += slot.idle.len();
        for op in &slot.ops {
            match op {
                Operation::Prepare { .. } => a.preparations += 1,
                Operation::Cnot { .. } => a.two_qubit_gates += 1,
                Operation::Measure { .. } => a.measurements += 1,
            }
        }
    }
    a
}

/// Round structure of a memory experiment: two perfect rounds, the noisy
/// rounds, then two more perfect rounds. Each perfect pair contains one round
/// of either parity so every supercheck has a noiseless reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protocol {
    pub noisy_rounds: usize,
}

impl Protocol {
    pub const LEAD_IN: usize = 2;

    pub fn total_rounds(&self) -> usize {
        self.noisy_rounds + 2 * Self::LEAD_IN
    }

    pub fn is_noisy(&self, round: usize) -> bool {
        (Self::LEAD_IN..Self::LEAD_IN + self.noisy_rounds).contains(&round)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective_code::build_effective_code;
    use std::collections::BTreeSet;

    fn code(l: usize, dis: &[(usize, usize)]) -> (CodeLayout, EffectiveCode) {
        let layout = CodeLayout::new(l).unwrap();
        let d: BTreeSet<Coord> = dis.iter().map(|&(r, c)| Coord::new(r, c)).collect();
        let code = build_effective_code(&layout, &d).unwrap();
        (layout, code)
    }

    #[test]
    fn bulk_check_fault_budget() {
        let (layout, code) = code(5, &[]);
        let sched = build_schedule(&layout, &code, 0);
        let a = audit(&sched);
        let checks = layout.checks().len();
        let links = layout.links().len();
        assert_eq!(a.preparations, checks);
        assert_eq!(a.measurements, checks);
        assert_eq!(a.two_qubit_gates, links);
        // Every qubit is either busy or idle in every slot.
        let busy_slots: usize = 2 * checks + 2 * links;
        assert_eq!(a.idles + busy_slots, SLOTS_PER_ROUND * layout.num_qubits());
    }

    #[test]
    fn slots_never_reuse_a_qubit() {
        let (layout, code) = code(5, &[(4, 4), (1, 1), (0, 6)]);
        for round in 0..2 {
            let sched = build_schedule(&layout, &code, round);
            for slot in &sched.slots {
                let mut seen = vec![false; layout.num_qubits()];
                for op in &slot.ops {
                    let qs = match *op {
                        Operation::Prepare { qubit, .. } | Operation::Measure { qubit, .. } => vec![qubit],
                        Operation::Cnot { control, target } => vec![control, target],
                    };
                    for q in qs {
                        assert!(!seen[q]);
                        seen[q] = true;
                    }
                }
                for &q in &slot.idle {
                    assert!(!seen[q]);
                }
            }
        }
    }

    #[test]
    fn superchecks_alternate_by_parity() {
        let (layout, code) = code(3, &[(2, 2)]);
        let star_pair = [layout.check_index(Coord::new(1, 2)).unwrap(), layout.check_index(Coord::new(3, 2)).unwrap()];
        let plaq_pair = [layout.check_index(Coord::new(2, 1)).unwrap(), layout.check_index(Coord::new(2, 3)).unwrap()];
        let even = build_schedule(&layout, &code, 4);
        let odd = build_schedule(&layout, &code, 5);
        assert!(star_pair.iter().all(|c| even.measured.contains(c)));
        assert!(plaq_pair.iter().all(|c| !even.measured.contains(c)));
        assert!(star_pair.iter().all(|c| !odd.measured.contains(c)));
        assert!(plaq_pair.iter().all(|c| odd.measured.contains(c)));
        let plain = layout.check_index(Coord::new(1, 0)).unwrap();
        assert!(even.measured.contains(&plain) && odd.measured.contains(&plain));
    }

    #[test]
    fn disabled_qubits_get_no_operations() {
        let (layout, code) = code(4, &[(2, 2), (3, 3)]);
        let sched = build_schedule(&layout, &code, 1);
        for slot in &sched.slots {
            for op in &slot.ops {
                if let Operation::Cnot { control, target } = *op {
                    assert!(!code.is_disabled(control) && !code.is_disabled(target));
                }
            }
            assert!(slot.idle.iter().all(|&q| !code.is_disabled(q)));
        }
    }

    #[test]
    fn protocol_layout() {
        let p = Protocol { noisy_rounds: 6 };
        assert_eq!(p.total_rounds(), 10);
        let noisy: Vec<_> = (0..10).filter(|&r| p.is_noisy(r)).collect();
        assert_eq!(noisy, vec![2, 3, 4, 5, 6, 7]);
    }
}
