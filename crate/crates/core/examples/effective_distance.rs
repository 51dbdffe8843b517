//! Average effective distance of fabricated lattices and a closer look at
//! one instance's dressed logical operators.
//!
//! ```text
//! cargo run --release --example effective_distance
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fabsim::effective_code::{effective_distance, sample_fabrication, LogicalKind};
use fabsim::experiments::{distance_study, fabricate};
use fabsim::geometry::CodeLayout;

fn main() -> fabsim::Result<()> {
    println!("{:>4} {:>6} {:>8} {:>8}", "L", "p", "L′ link", "L′ qubit");
    for l in [5, 9, 13] {
        for p in [0.0, 0.02, 0.06, 0.10] {
            let link = distance_study(l, 0.0, p, 500, 7)?;
            let qubit = distance_study(l, p, 0.0, 500, 7)?;
            println!("{l:>4} {p:>6.2} {:>8.2} {:>8.2}", link.mean_effective_distance, qubit.mean_effective_distance);
        }
    }

    let layout = CodeLayout::new(9)?;
    let spec = sample_fabrication(&layout, 0.05, 0.05, &mut ChaCha8Rng::seed_from_u64(3))?;
    let code = fabricate(&layout, &spec)?;
    println!("\none L=9 instance with {} disabled data qubits", code.disabled().len());
    for kind in [LogicalKind::Z, LogicalKind::X] {
        match code.logical(kind) {
            Some(path) => {
                let sites: Vec<String> = path.qubits.iter().map(|q| q.to_string()).collect();
                println!(
                    "{kind:?}: distance {:?}, one shortest logical {}",
                    effective_distance(&code, kind),
                    sites.join(" ")
                );
            }
            None => println!("{kind:?}: percolated"),
        }
    }
    Ok(())
}
