//! Supercheck values and detection events.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::effective_code::{CheckGroup, EffectiveCode};
use crate::error::{internal, Result};
use crate::geometry::{CheckKind, CodeLayout};
use crate::schedule::RoundOutcomes;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeHistory {
    pub rounds: Vec<RoundOutcomes>,
    /// Whether each round ran without noise.
    pub perfect: Vec<bool>,
}

impl SyndromeHistory {
    pub fn push(&mut self, outcomes: RoundOutcomes, perfect: bool) {
        self.rounds.push(outcomes);
        self.perfect.push(perfect);
    }

    pub fn dump(&self, layout: &CodeLayout) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            let _ = writeln!(out, "{}", r.dump(layout));
        }
        out
    }
}

/// Product of the member outcomes of a group, as a parity (`true` = −1).
pub fn supercheck_value(outcomes: &BTreeMap<usize, bool>, group: &CheckGroup) -> Result<bool> {
    let mut parity = false;
    for ci in &group.measured {
        match outcomes.get(ci) {
            Some(&v) => parity ^= v,
            None => return Err(internal(format!("supercheck member {ci} was not measured"))),
        }
    }
    Ok(parity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Defect {
    pub round: usize,
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectSet {
    pub kind: CheckKind,
    /// Sorted by round, then group.
    pub defects: Vec<Defect>,
    /// Rounds between consecutive measurements of each group.
    pub spacing: Vec<usize>,
}

impl DefectSet {
    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Groups of `kind` whose value changed since their previous measurement.
pub fn detection_events(history: &SyndromeHistory, code: &EffectiveCode, kind: CheckKind) -> Result<DefectSet> {
    let sector = code.sector(kind);
    let n = sector.groups().len();
    let mut last: Vec<Option<bool>> = vec![None; n];
    let mut value = vec![false; n];
    let mut seen = vec![0usize; n];
    let mut touched = Vec::new();
    let mut defects = Vec::new();
    for round in &history.rounds {
        for &(ci, v) in &round.outcomes {
            if let Some(g) = sector.group_of_check(ci) {
                if seen[g] == 0 {
                    touched.push(g);
                }
                seen[g] += 1;
                value[g] ^= v;
            }
        }
        touched.sort_unstable();
        for &g in &touched {
            if seen[g] != sector.group(g).measured.len() {
                return Err(internal(format!(
                    "group {g} had {} of {} members measured in round {}",
                    seen[g],
                    sector.group(g).measured.len(),
                    round.round_index
                )));
            }
            if let Some(prev) = last[g] {
                if prev != value[g] {
                    defects.push(Defect { round: round.round_index, group: g });
                }
            }
            last[g] = Some(value[g]);
            value[g] = false;
            seen[g] = 0;
        }
        touched.clear();
    }
    let spacing = sector.groups().iter().map(|g| if g.is_supercheck() { 2 } else { 1 }).collect();
    Ok(DefectSet { kind, defects, spacing })
}
