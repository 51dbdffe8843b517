//! One noisy shot end to end: detection events, the matching found by the
//! decoder, the correction it implies and whether a logical error remains.
//!
//! ```text
//! cargo run --release --example decode_shot
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fabsim::decoder::{mwpm, Match, WeightModel};
use fabsim::effective_code::sample_fabrication;
use fabsim::experiments::{fabricate, Instance};
use fabsim::geometry::CodeLayout;
use fabsim::noise::NoiseParams;
use fabsim::schedule::Protocol;

fn main() -> fabsim::Result<()> {
    let layout = CodeLayout::new(7)?;
    let spec = sample_fabrication(&layout, 0.03, 0.03, &mut ChaCha8Rng::seed_from_u64(11))?;
    let code = fabricate(&layout, &spec)?;
    let noise = NoiseParams::new(0.004)?;
    let instance = Instance::new(&layout, code, noise, WeightModel::LogLikelihood, Protocol { noisy_rounds: 14 })?;
    let stats = instance.graph.stats();
    println!(
        "decoding graph: {} detectors, {} edges ({stats:?})",
        instance.graph.detectors().len(),
        instance.graph.edges().len()
    );

    let shot = instance.run_frame(&mut ChaCha8Rng::seed_from_u64(5))?;
    println!("{} detection events", shot.defects.len());
    for d in &shot.defects.defects {
        println!("  round {:>2} group {}", d.round, d.group);
    }

    let nodes = instance.graph.defect_nodes(&shot.defects)?;
    let matching = instance.graph.matching_graph(&nodes);
    let pairing = mwpm(&matching)?;
    for m in &pairing {
        match *m {
            Match::Pair(a, b) => println!("  pair {a} – {b}"),
            Match::Boundary(a) => println!("  {a} – boundary"),
        }
    }
    println!("total weight {}", matching.total_weight(&pairing));
    let flips: Vec<String> = shot.correction.flips.iter().map(|&q| layout.coord(q).to_string()).collect();
    println!("correction flips {}", flips.join(" "));
    println!("logical error: {}", shot.logical_error);
    Ok(())
}
