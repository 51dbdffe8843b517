//! Runs a damaged lattice without noise on the full tableau. The individual
//! checks inside a supercheck give random outcomes, yet their product is
//! fixed from round to round, so no detector ever fires.
//!
//! ```text
//! cargo run --example gauge_outcomes
//! ```

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fabsim::decoder::WeightModel;
use fabsim::effective_code::build_effective_code;
use fabsim::experiments::Instance;
use fabsim::geometry::{CheckKind, CodeLayout, Coord};
use fabsim::noise::NoiseParams;
use fabsim::schedule::Protocol;

fn main() -> fabsim::Result<()> {
    let layout = CodeLayout::new(5)?;
    let code = build_effective_code(&layout, &BTreeSet::from([Coord { r: 4, c: 4 }]))?;
    let protocol = Protocol { noisy_rounds: 6 };
    let instance = Instance::new(&layout, code, NoiseParams::noiseless(), WeightModel::LogLikelihood, protocol)?;
    let group = instance
        .code
        .sector(CheckKind::Plaquette)
        .groups()
        .iter()
        .find(|g| g.is_supercheck())
        .expect("a bulk hole merges two plaquettes")
        .clone();

    for shot in 0..3u64 {
        let result = instance.run_tableau(&mut ChaCha8Rng::seed_from_u64(0), ChaCha8Rng::seed_from_u64(shot))?;
        let mut lines = Vec::new();
        for round in &result.history.rounds {
            let mine: Vec<bool> =
                round.outcomes.iter().filter(|(c, _)| group.measured.contains(c)).map(|&(_, v)| v).collect();
            if mine.is_empty() {
                continue; // measured on alternate rounds
            }
            let each: String = mine.iter().map(|&v| if v { '-' } else { '+' }).collect();
            let product = if mine.iter().filter(|&&v| v).count() % 2 == 1 { '-' } else { '+' };
            lines.push(format!("{each}→{product}"));
        }
        println!("shot {shot}: {}  detection events {}", lines.join(" "), result.defects.len());
    }
    Ok(())
}
