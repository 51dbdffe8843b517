//! Classical studies of fabricated lattices, and the native versus
//! effective-distance comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::campaign::{run_campaign, CampaignPoint};
use super::trial::{fabricate, run_on_instance, trial_rng, Instance, Stream, TrialConfig, TrialOutcome};
use crate::effective_code::{is_percolated, map_to_disabled, min_effective_distance, sample_fabrication};
use crate::error::{check_probability, invalid, Result};
use crate::geometry::CodeLayout;

fn check_rates(p_qubit: f64, p_link: f64, instances: usize) -> Result<()> {
    check_probability("p_qubit", p_qubit)?;
    check_probability("p_link", p_link)?;
    if instances == 0 {
        return Err(invalid("instance count must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationPoint {
    #[serde(rename = "L")]
    pub distance: usize,
    pub p_qubit: f64,
    pub p_link: f64,
    pub instances: usize,
    pub percolated: usize,
    pub fraction: f64,
}

/// Fraction of sampled fabrications that percolate.
pub fn percolation_rate(
    distance: usize,
    p_qubit: f64,
    p_link: f64,
    instances: usize,
    seed: u64,
) -> Result<PercolationPoint> {
    check_rates(p_qubit, p_link, instances)?;
    let layout = CodeLayout::new(distance)?;
    let percolated = (0..instances as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = trial_rng(seed, i, Stream::Fabrication);
            let spec = sample_fabrication(&layout, p_qubit, p_link, &mut rng)?;
            let mut mask = vec![false; layout.num_qubits()];
            for q in map_to_disabled(&layout, &spec) {
                mask[layout.index(q)] = true;
            }
            Ok(is_percolated(&layout, &mask) as usize)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(PercolationPoint {
        distance,
        p_qubit,
        p_link,
        instances,
        percolated,
        fraction: percolated as f64 / instances as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    #[serde(rename = "L")]
    pub distance: usize,
    pub p_qubit: f64,
    pub p_link: f64,
    pub instances: usize,
    pub percolated: usize,
    /// Mean of `min(Z distance, X distance)` over instances that did not percolate.
    pub mean_effective_distance: f64,
    pub min_effective_distance: Option<usize>,
    pub max_effective_distance: Option<usize>,
}

pub fn distance_study(
    distance: usize,
    p_qubit: f64,
    p_link: f64,
    instances: usize,
    seed: u64,
) -> Result<DistanceStats> {
    let per = instance_stats(distance, p_qubit, p_link, instances, seed)?;
    let alive: Vec<usize> = per.iter().filter_map(|s| s.map(|s| s.0)).collect();
    let mean = if alive.is_empty() { f64::NAN } else { alive.iter().sum::<usize>() as f64 / alive.len() as f64 };
    Ok(DistanceStats {
        distance,
        p_qubit,
        p_link,
        instances,
        percolated: instances - alive.len(),
        mean_effective_distance: mean,
        min_effective_distance: alive.iter().copied().min(),
        max_effective_distance: alive.iter().copied().max(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupercheckStats {
    #[serde(rename = "L")]
    pub distance: usize,
    pub p_qubit: f64,
    pub p_link: f64,
    pub instances: usize,
    pub percolated: usize,
    /// Mean over non-percolated instances of the largest supercheck weight.
    pub mean_max_weight: f64,
    /// `histogram[w]` counts instances whose largest supercheck has weight `w`.
    pub histogram: Vec<usize>,
}

pub fn supercheck_study(
    distance: usize,
    p_qubit: f64,
    p_link: f64,
    instances: usize,
    seed: u64,
) -> Result<SupercheckStats> {
    let per = instance_stats(distance, p_qubit, p_link, instances, seed)?;
    let weights: Vec<usize> = per.iter().filter_map(|s| s.map(|s| s.1)).collect();
    let mut histogram = vec![0; weights.iter().copied().max().unwrap_or(0) + 1];
    for &w in &weights {
        histogram[w] += 1;
    }
    Ok(SupercheckStats {
        distance,
        p_qubit,
        p_link,
        instances,
        percolated: instances - weights.len(),
        mean_max_weight: if weights.is_empty() {
            f64::NAN
        } else {
            weights.iter().sum::<usize>() as f64 / weights.len() as f64
        },
        histogram,
    })
}

/// Per instance, `(effective distance, largest supercheck weight)` or `None` if percolated.
fn instance_stats(
    distance: usize,
    p_qubit: f64,
    p_link: f64,
    instances: usize,
    seed: u64,
) -> Result<Vec<Option<(usize, usize)>>> {
    check_rates(p_qubit, p_link, instances)?;
    let layout = CodeLayout::new(distance)?;
    (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i, Stream::Fabrication);
            let spec = sample_fabrication(&layout, p_qubit, p_link, &mut rng)?;
            let code = fabricate(&layout, &spec)?;
            Ok(min_effective_distance(&code).map(|d| (d, code.max_supercheck_weight())))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NativeComparison {
    pub native: CampaignPoint,
    pub fabricated: CampaignPoint,
    /// Fabrications drawn to find enough instances with the target distance.
    pub draws: usize,
    /// `(fabricated - native) / combined standard error`.
    pub z_score: f64,
}

/// Compares a fault-free lattice of distance `target` against lattices of
/// distance `intended` whose fabrication left effective distance `target`.
///
/// Each fabricated trial uses a fresh instance from the filtered pool.
pub fn native_vs_effective(
    intended: usize,
    target: usize,
    p_qubit: f64,
    p_link: f64,
    p_comp: f64,
    trials: usize,
    seed: u64,
) -> Result<NativeComparison> {
    check_rates(p_qubit, p_link, trials)?;
    if target > intended {
        return Err(invalid("target distance cannot exceed the intended distance"));
    }
    let native = run_campaign(&TrialConfig::new(target, p_comp).with_seed(seed), trials, None)?;

    let layout = CodeLayout::new(intended)?;
    let cfg = TrialConfig::new(intended, p_comp).with_fabrication(p_qubit, p_link).with_seed(seed ^ 0x5eed);
    let noise = cfg.noise()?;
    let max_draws = trials.saturating_mul(1000).max(1000);
    let mut pool: Vec<u64> = Vec::with_capacity(trials);
    let mut draws = 0u64;
    while pool.len() < trials {
        if draws as usize >= max_draws {
            return Err(invalid(format!(
                "only {} of {trials} fabrications reached effective distance {target}",
                pool.len()
            )));
        }
        let mut rng = trial_rng(cfg.seed, draws, Stream::Fabrication);
        let spec = sample_fabrication(&layout, p_qubit, p_link, &mut rng)?;
        if min_effective_distance(&fabricate(&layout, &spec)?) == Some(target) {
            pool.push(draws);
        }
        draws += 1;
    }
    let errors = pool
        .par_iter()
        .map(|&i| -> Result<usize> {
            let mut rng = trial_rng(cfg.seed, i, Stream::Fabrication);
            let spec = sample_fabrication(&layout, p_qubit, p_link, &mut rng)?;
            let instance = Instance::new(&layout, fabricate(&layout, &spec)?, noise, cfg.weights, cfg.protocol())?;
            match run_on_instance(&cfg, &instance, i)? {
                TrialOutcome::Completed { logical_error, .. } => Ok(logical_error as usize),
                TrialOutcome::Percolated => Err(invalid("filtered instance percolated")),
            }
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = errors as f64 / trials as f64;
    let fabricated = CampaignPoint {
        distance: intended,
        p_comp,
        p_qubit,
        p_link,
        trials,
        percolated: 0,
        logical_errors: errors,
        p_log: p,
        std_err: (p * (1.0 - p) / trials as f64).sqrt(),
    };
    let combined = (native.std_err.powi(2) + fabricated.std_err.powi(2)).sqrt();
    let z_score = if combined > 0.0 { (fabricated.p_log - native.p_log) / combined } else { 0.0 };
    Ok(NativeComparison { native, fabricated, draws: draws as usize, z_score })
}
