//! Matching decoder for X errors on an effective code.

pub mod blossom;
mod graph;
mod matching;

pub use graph::{DecodingGraph, DetectorMap, GraphEdge, GraphStats, WeightModel, WEIGHT_SCALE};
pub use matching::{mwpm, Correction, Match, MatchingGraph};

use crate::effective_code::EffectiveCode;
use crate::error::{Error, Result};
use crate::geometry::{CheckKind, CodeLayout};

/// Whether the residual X error combined with the correction flips the
/// logical Z readout.
///
/// `residual_x` is indexed by site. Fails if the combination leaves any
/// plaquette group with odd parity, which means the correction does not
/// return the state to the code space.
pub fn logical_failure(
    layout: &CodeLayout,
    code: &EffectiveCode,
    residual_x: &[bool],
    correction: &Correction,
) -> Result<bool> {
    let mut total = residual_x.to_vec();
    for &q in &correction.flips {
        total[q] ^= true;
    }
    for (g, group) in code.sector(CheckKind::Plaquette).groups().iter().enumerate() {
        let parity = group.support.iter().filter(|&&q| total[layout.index(q)]).count() % 2;
        if parity == 1 {
            return Err(Error::Decoder(format!("plaquette group {g} left with odd parity")));
        }
    }
    Ok(code.logical_z_cut().iter().filter(|&&q| total[layout.index(q)]).count() % 2 == 1)
}
