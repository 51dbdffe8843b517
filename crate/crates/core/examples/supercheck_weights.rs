//! Distribution of the largest supercheck weight per instance at a fixed
//! link fault rate. Larger lattices contain rarer, bigger clusters, so the
//! typical maximum grows with size.
//!
//! ```text
//! cargo run --release --example supercheck_weights
//! ```

use fabsim::experiments::supercheck_study;

fn main() -> fabsim::Result<()> {
    for l in [5, 9, 13, 17] {
        let s = supercheck_study(l, 0.0, 0.10, 1_000, 4)?;
        let mode = s.histogram.iter().enumerate().max_by_key(|&(_, n)| n).map_or(0, |(w, _)| w);
        println!(
            "L={l:>2}: mean max weight {:>6.2}, most common {mode:>3}, largest seen {:>3}, percolated {}",
            s.mean_max_weight,
            s.histogram.len() - 1,
            s.percolated
        );
    }
    Ok(())
}
