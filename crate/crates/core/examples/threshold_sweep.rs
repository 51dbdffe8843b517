//! A small threshold sweep: logical error rates for two distances over a
//! range of circuit noise, the crossing estimate, and an exponential fit of
//! how the crossing moves with link faults.
//!
//! ```text
//! cargo run --release --example threshold_sweep
//! ```
//!
//! The trial counts here keep the run to a minute or two; the acceptance
//! target and the `threshold` subcommand do the same at larger scale.

use fabsim::experiments::{
    estimate_threshold, fit_exponential, run_campaign, CurvePoint, ThresholdEstimate, TrialConfig,
};

fn crossing(p_link: f64, rates: &[f64], trials: usize) -> fabsim::Result<ThresholdEstimate> {
    let mut points = Vec::new();
    for l in [3, 5] {
        for &p in rates {
            let cfg = TrialConfig::new(l, p).with_fabrication(0.0, p_link).with_seed(21);
            let point = run_campaign(&cfg, trials, None)?;
            println!("  L={l} p={p:.4} p_log={:.4} ± {:.4}", point.p_log, point.std_err);
            points.push(CurvePoint { distance: l, x: p, y: point.p_log, trials: point.survivors() });
        }
    }
    estimate_threshold(&points, 100, 0)
}

fn main() -> fabsim::Result<()> {
    let mut fit_points = Vec::new();
    for (p_link, rates) in [
        (0.0, [0.004, 0.006, 0.008, 0.010, 0.012]),
        (0.03, [0.002, 0.003, 0.004, 0.005, 0.006]),
        (0.06, [0.001, 0.0015, 0.002, 0.0025, 0.003]),
    ] {
        println!("p_link = {p_link}");
        match crossing(p_link, &rates, 1_500)? {
            ThresholdEstimate::Crossing(c) => {
                println!("  crossing at {:.5} ± {:.5}", c.value, c.std_err);
                fit_points.push((p_link, c.value));
            }
            ThresholdEstimate::NoCrossing => println!("  no crossing in range"),
        }
    }
    // Distances 3 and 5 sit far from the asymptotic regime, so expect a rough fit.
    if fit_points.len() >= 3 {
        let fit = fit_exponential(&fit_points)?;
        println!("threshold ≈ {:.4}·exp({:.1}·p_link), β ± {:.1}", fit.alpha, fit.beta, fit.beta_std_err);
    }
    Ok(())
}
