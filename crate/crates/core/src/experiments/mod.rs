//! Monte-Carlo campaigns and the analyses built on them.

mod campaign;
pub mod output;
mod studies;
mod threshold;
mod trial;

pub use campaign::{run_campaign, run_sweep, CampaignPoint};
pub use studies::{
    distance_study, native_vs_effective, percolation_rate, supercheck_study, DistanceStats, NativeComparison,
    PercolationPoint, SupercheckStats,
};
pub use threshold::{estimate_threshold, fit_exponential, Crossing, CurvePoint, ExponentialFit, ThresholdEstimate};
pub use trial::{
    fabricate, run_on_instance, run_trial, trial_rng, Backend, Instance, Shot, Stream, TrialConfig, TrialOutcome,
};
