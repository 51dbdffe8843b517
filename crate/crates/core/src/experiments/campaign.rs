use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{fabricate, run_on_instance, run_trial, Instance, TrialConfig, TrialOutcome};
use crate::effective_code::FabricationSpec;
use crate::error::{invalid, Result};
use crate::geometry::CodeLayout;

/// Aggregated result of many trials at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignPoint {
    #[serde(rename = "L")]
    pub distance: usize,
    pub p_comp: f64,
    pub p_qubit: f64,
    pub p_link: f64,
    pub trials: usize,
    pub percolated: usize,
    pub logical_errors: usize,
    /// Logical error rate among trials that did not percolate.
    pub p_log: f64,
    pub std_err: f64,
}

impl CampaignPoint {
    pub fn survivors(&self) -> usize {
        self.trials - self.percolated
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    percolated: usize,
    errors: usize,
    completed: usize,
}

impl Tally {
    fn add(mut self, o: &TrialOutcome) -> Self {
        match o {
            TrialOutcome::Percolated => self.percolated += 1,
            TrialOutcome::Completed { logical_error, .. } => {
                self.completed += 1;
                self.errors += *logical_error as usize;
            }
        }
        self
    }

    fn merge(self, o: Tally) -> Self {
        Tally {
            percolated: self.percolated + o.percolated,
            errors: self.errors + o.errors,
            completed: self.completed + o.completed,
        }
    }
}

fn point(cfg: &TrialConfig, trials: usize, t: Tally) -> CampaignPoint {
    let (p_log, std_err) = if t.completed == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let p = t.errors as f64 / t.completed as f64;
        (p, (p * (1.0 - p) / t.completed as f64).sqrt())
    };
    CampaignPoint {
        distance: cfg.distance,
        p_comp: cfg.p_comp,
        p_qubit: cfg.p_qubit,
        p_link: cfg.p_link,
        trials,
        percolated: t.percolated,
        logical_errors: t.errors,
        p_log,
        std_err,
    }
}

/// Runs `trials` trials. With `fixed` every shot uses the same fabrication;
/// otherwise each trial draws its own from the configured rates.
///
/// Trials are independent and seeded by index, so the result does not depend
/// on how rayon schedules them.
pub fn run_campaign(cfg: &TrialConfig, trials: usize, fixed: Option<&FabricationSpec>) -> Result<CampaignPoint> {
    cfg.validate()?;
    if trials == 0 {
        return Err(invalid("trial count must be positive"));
    }
    let layout = CodeLayout::new(cfg.distance)?;
    let shared = match fixed {
        Some(spec) => Some(fabricate(&layout, spec)?),
        None if !cfg.has_random_fabrication() => Some(fabricate(&layout, &FabricationSpec::default())?),
        None => None,
    };
    let tally = match shared {
        Some(code) if code.percolated() => Tally { percolated: trials, ..Default::default() },
        Some(code) => {
            let instance = Instance::new(&layout, code, cfg.noise()?, cfg.weights, cfg.protocol())?;
            run_parallel(trials, |i| run_on_instance(cfg, &instance, i))?
        }
        None => run_parallel(trials, |i| run_trial(cfg, &layout, i))?,
    };
    Ok(point(cfg, trials, tally))
}

fn run_parallel<F>(trials: usize, f: F) -> Result<Tally>
where
    F: Fn(u64) -> Result<TrialOutcome> + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .try_fold(Tally::default, |t, i| f(i).map(|o| t.add(&o)))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// Runs every configuration in turn.
pub fn run_sweep(configs: &[TrialConfig], trials: usize) -> Result<Vec<CampaignPoint>> {
    configs.iter().map(|c| run_campaign(c, trials, None)).collect()
}
