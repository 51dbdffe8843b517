//! Fraction of fabrications that percolate, for link and qubit faults, on
//! three lattice sizes. The curves steepen with size and cross near the
//! critical rate.
//!
//! ```text
//! cargo run --release --example percolation_sweep
//! ```

use fabsim::effective_code::FaultModel;
use fabsim::experiments::percolation_rate;

fn main() -> fabsim::Result<()> {
    for model in [FaultModel::Link, FaultModel::Qubit] {
        // A single qubit is lost with probability one half at this rate.
        println!("{model:?} faults, single-qubit estimate {:.4}", model.critical_rate());
        println!("{:>6} {:>8} {:>8} {:>8}", "p", "L=10", "L=20", "L=40");
        for step in 0..7 {
            let p = 0.11 + 0.01 * step as f64;
            let (p_qubit, p_link) = match model {
                FaultModel::Link => (0.0, p),
                FaultModel::Qubit => (p, 0.0),
            };
            let row: Vec<String> = [10, 20, 40]
                .iter()
                .map(|&l| percolation_rate(l, p_qubit, p_link, 2_000, 1).map(|r| format!("{:>8.3}", r.fraction)))
                .collect::<fabsim::Result<_>>()?;
            println!("{p:>6.2} {}", row.join(" "));
        }
    }
    Ok(())
}
