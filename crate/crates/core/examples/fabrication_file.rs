//! Loads a fabrication pattern, maps it onto disabled qubits and reports the
//! resulting code. Pass a pattern file, or run without arguments to use a
//! built-in one.
//!
//! ```text
//! cargo run --example fabrication_file -- pattern.txt
//! ```
//!
//! Lines are `Q r c` for a faulty qubit at site `(r, c)` and `L r c d` for
//! the link from the check at `(r, c)` in direction `d` (n, e, s or w).

use std::path::Path;

use fabsim::effective_code::{map_to_disabled, min_effective_distance, FabricationSpec};
use fabsim::experiments::fabricate;
use fabsim::geometry::CodeLayout;

const BUILT_IN: &str = "\
# a dead data qubit, a dead syndrome qubit and a broken coupler
Q 4 4
Q 5 2
L 3 6 e
";

fn main() -> fabsim::Result<()> {
    let layout = CodeLayout::new(7)?;
    let spec = match std::env::args().nth(1) {
        Some(path) => FabricationSpec::read(Path::new(&path), &layout)?,
        None => FabricationSpec::parse(BUILT_IN, &layout, Path::new("<built-in>"))?,
    };
    println!("{} faulty qubits, {} faulty links", spec.faulty_qubits.len(), spec.faulty_links.len());

    let disabled = map_to_disabled(&layout, &spec);
    let shown: Vec<String> = disabled.iter().map(|q| q.to_string()).collect();
    println!("disabled data qubits: {}", shown.join(" "));

    let code = fabricate(&layout, &spec)?;
    if code.percolated() {
        println!("the lattice percolated; no logical qubit survives");
        return Ok(());
    }
    println!("effective distance {:?} of nominal {}", min_effective_distance(&code), code.nominal_distance());
    println!("largest supercheck weight {}", code.max_supercheck_weight());
    print!("normalised pattern:\n{}", spec.to_text());
    Ok(())
}
