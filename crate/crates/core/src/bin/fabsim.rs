use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use fabsim::decoder::WeightModel;
use fabsim::effective_code::FabricationSpec;
use fabsim::experiments::output::{write_rows, Format};
use fabsim::experiments::{
    distance_study, estimate_threshold, fabricate, fit_exponential, native_vs_effective, percolation_rate,
    run_campaign, supercheck_study, trial_rng, Backend, CampaignPoint, CurvePoint, Instance, Stream, ThresholdEstimate,
    TrialConfig,
};
use fabsim::geometry::CodeLayout;

#[derive(Parser)]
#[command(name = "fabsim", version, about = "Surface-code memory experiments on lattices with fabrication defects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Logical error rate at one parameter point.
    Simulate(SimulateArgs),
    /// Fraction of fabrications that percolate, over a grid of rates.
    Percolation(GridArgs),
    /// Mean effective distance over a grid of rates.
    Distance(GridArgs),
    /// Largest supercheck weight per instance over a grid of rates.
    Superchecks(GridArgs),
    /// Sweep p_comp for several distances and locate the crossing.
    Threshold(ThresholdArgs),
    /// Fit threshold(p_fab) = alpha * exp(beta * p_fab).
    Fit(FitArgs),
    /// Fabricated lattices filtered to a target distance against a native lattice of that distance.
    NativeCompare(NativeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Frame,
    Tableau,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long = "L")]
    distance: usize,
    #[arg(long)]
    p_comp: f64,
    #[arg(long, default_value_t = 0.0)]
    p_qubit: f64,
    #[arg(long, default_value_t = 0.0)]
    p_link: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Noisy rounds; twice the distance by default.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every elementary edge of the decoding graph costs 1.
    #[arg(long)]
    unit_weights: bool,
    /// Fixed fabrication pattern used by every trial.
    #[arg(long)]
    fab_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "frame")]
    backend: BackendArg,
    /// Writes the per-round syndrome of trial 0 to this file.
    #[arg(long)]
    dump_rounds: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GridArgs {
    /// Comma-separated distances.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    distance: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_qubit: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_link: Vec<f64>,
    /// Fabrication instances per grid point.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long = "L", value_delimiter = ',', default_value = "5,7,9")]
    distance: Vec<usize>,
    /// Comma-separated physical error rates; 0.05% to 1% in 0.05% steps by default.
    #[arg(long, value_delimiter = ',')]
    p_comp: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_qubit: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_link: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    unit_weights: bool,
    /// Estimate from an existing campaign table instead of simulating.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Also write the simulated campaign points here.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with columns `p_fab,threshold`.
    #[arg(long, conflicts_with = "point")]
    input: Option<PathBuf>,
    /// Inline `p_fab:threshold` pair; repeatable.
    #[arg(long)]
    point: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct NativeArgs {
    /// Intended distance of the fabricated lattices.
    #[arg(long = "L")]
    distance: usize,
    /// Effective distance the fabricated lattices are filtered to.
    #[arg(long)]
    target: usize,
    #[arg(long)]
    p_comp: f64,
    #[arg(long, default_value_t = 0.0)]
    p_qubit: f64,
    #[arg(long, default_value_t = 0.0)]
    p_link: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Percolation(a) => grid(a, |l, q, k, n, s| Ok(Row::Percolation(percolation_rate(l, q, k, n, s)?))),
        Command::Distance(a) => grid(a, |l, q, k, n, s| Ok(Row::Distance(distance_study(l, q, k, n, s)?))),
        Command::Superchecks(a) => {
            grid(a, |l, q, k, n, s| Ok(Row::Supercheck(SupercheckRow::from(supercheck_study(l, q, k, n, s)?))))
        }
        Command::Threshold(a) => threshold(a),
        Command::Fit(a) => fit(a),
        Command::NativeCompare(a) => native(a),
    }
}

fn emit<T: Serialize>(rows: &[T], out: &OutputArgs) -> Result<()> {
    let format = match out.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match &out.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_rows(rows, format, &mut w)?;
            w.flush()?;
        }
        None => write_rows(rows, format, io::stdout().lock())?,
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = TrialConfig::new(a.distance, a.p_comp).with_fabrication(a.p_qubit, a.p_link).with_seed(a.seed);
    cfg.rounds = a.rounds;
    cfg.backend = match a.backend {
        BackendArg::Frame => Backend::Frame,
        BackendArg::Tableau => Backend::Tableau,
    };
    if a.unit_weights {
        cfg.weights = WeightModel::Unit;
    }
    cfg.validate()?;
    let layout = CodeLayout::new(a.distance)?;
    let fixed = match &a.fab_file {
        Some(path) => {
            if cfg.has_random_fabrication() {
                bail!("--fab-file cannot be combined with --p-qubit or --p-link");
            }
            Some(FabricationSpec::read(path, &layout)?)
        }
        None => None,
    };
    if let Some(path) = &a.dump_rounds {
        dump_rounds(&cfg, &layout, fixed.as_ref(), path)?;
    }
    if a.trials == 0 {
        return emit::<CampaignPoint>(&[], &a.output);
    }
    let point = run_campaign(&cfg, a.trials, fixed.as_ref())?;
    emit(&[point], &a.output)
}

fn dump_rounds(cfg: &TrialConfig, layout: &CodeLayout, fixed: Option<&FabricationSpec>, path: &Path) -> Result<()> {
    let spec = match fixed {
        Some(s) => s.clone(),
        None => {
            let mut rng = trial_rng(cfg.seed, 0, Stream::Fabrication);
            fabsim::effective_code::sample_fabrication(layout, cfg.p_qubit, cfg.p_link, &mut rng)?
        }
    };
    let code = fabricate(layout, &spec)?;
    if code.percolated() {
        bail!("trial 0 percolated; there is no syndrome to dump");
    }
    let instance = Instance::new(layout, code, cfg.noise()?, cfg.weights, cfg.protocol())?;
    let mut noise_rng = trial_rng(cfg.seed, 0, Stream::Noise);
    let shot = instance.run(cfg.backend, &mut noise_rng, trial_rng(cfg.seed, 0, Stream::Measurement))?;
    std::fs::write(path, shot.history.dump(layout)).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum Row {
    Percolation(fabsim::experiments::PercolationPoint),
    Distance(fabsim::experiments::DistanceStats),
    Supercheck(SupercheckRow),
}

/// Flat form of the supercheck statistics; the histogram is `weight:count` pairs.
#[derive(Serialize)]
struct SupercheckRow {
    #[serde(rename = "L")]
    distance: usize,
    p_qubit: f64,
    p_link: f64,
    instances: usize,
    percolated: usize,
    mean_max_weight: f64,
    histogram: String,
}

impl From<fabsim::experiments::SupercheckStats> for SupercheckRow {
    fn from(s: fabsim::experiments::SupercheckStats) -> Self {
        let histogram = s
            .histogram
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(w, n)| format!("{w}:{n}"))
            .collect::<Vec<_>>()
            .join(" ");
        SupercheckRow {
            distance: s.distance,
            p_qubit: s.p_qubit,
            p_link: s.p_link,
            instances: s.instances,
            percolated: s.percolated,
            mean_max_weight: s.mean_max_weight,
            histogram,
        }
    }
}

fn grid<F>(a: GridArgs, f: F) -> Result<()>
where
    F: Fn(usize, f64, f64, usize, u64) -> fabsim::Result<Row>,
{
    let mut rows = Vec::new();
    for &l in &a.distance {
        for &q in &a.p_qubit {
            for &k in &a.p_link {
                rows.push(f(l, q, k, a.trials, a.seed)?);
            }
        }
    }
    emit(&rows, &a.output)
}

#[derive(Serialize)]
struct ThresholdRow {
    p_qubit: f64,
    p_link: f64,
    /// Empty when the curves do not cross.
    threshold: Option<f64>,
    std_err: Option<f64>,
    crossings: usize,
}

fn default_p_comp() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.0005).collect()
}

fn threshold(a: ThresholdArgs) -> Result<()> {
    let mut points: Vec<CampaignPoint> = match &a.input {
        Some(path) => {
            let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
            r.deserialize().collect::<std::result::Result<_, _>>()?
        }
        None => {
            let p_comp = if a.p_comp.is_empty() { default_p_comp() } else { a.p_comp.clone() };
            let mut out = Vec::new();
            for &q in &a.p_qubit {
                for &k in &a.p_link {
                    for &l in &a.distance {
                        for &p in &p_comp {
                            let mut cfg = TrialConfig::new(l, p).with_fabrication(q, k).with_seed(a.seed);
                            cfg.rounds = a.rounds;
                            if a.unit_weights {
                                cfg.weights = WeightModel::Unit;
                            }
                            out.push(run_campaign(&cfg, a.trials, None)?);
                        }
                    }
                }
            }
            out
        }
    };
    points.sort_by(|x, y| {
        (x.p_qubit, x.p_link, x.distance, x.p_comp)
            .partial_cmp(&(y.p_qubit, y.p_link, y.distance, y.p_comp))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if let Some(path) = &a.points {
        emit(&points, &OutputArgs { out: Some(path.clone()), format: a.output.format })?;
    }
    let mut rows = Vec::new();
    let mut keys: Vec<(f64, f64)> = points.iter().map(|p| (p.p_qubit, p.p_link)).collect();
    keys.dedup();
    for (q, k) in keys {
        let curve: Vec<CurvePoint> = points
            .iter()
            .filter(|p| p.p_qubit == q && p.p_link == k && p.p_log.is_finite())
            .map(|p| CurvePoint { distance: p.distance, x: p.p_comp, y: p.p_log, trials: p.survivors() })
            .collect();
        let est = estimate_threshold(&curve, a.bootstrap, a.seed)?;
        let (threshold, std_err, crossings) = match &est {
            ThresholdEstimate::Crossing(c) => (Some(c.value), Some(c.std_err), c.pairwise.len()),
            ThresholdEstimate::NoCrossing => (None, None, 0),
        };
        rows.push(ThresholdRow { p_qubit: q, p_link: k, threshold, std_err, crossings });
    }
    emit(&rows, &a.output)
}

#[derive(Deserialize)]
struct FitInput {
    p_fab: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct FitRow {
    alpha: f64,
    beta: f64,
    beta_std_err: f64,
    residuals: String,
}

fn fit(a: FitArgs) -> Result<()> {
    let pts: Vec<(f64, f64)> = match &a.input {
        Some(path) => {
            let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
            r.deserialize::<FitInput>()
                .map(|row| row.map(|r| (r.p_fab, r.threshold)))
                .collect::<std::result::Result<_, _>>()?
        }
        None => a
            .point
            .iter()
            .map(|s| {
                let (x, y) = s.split_once(':').with_context(|| format!("expected p_fab:threshold, got `{s}`"))?;
                Ok((x.trim().parse()?, y.trim().parse()?))
            })
            .collect::<Result<_>>()?,
    };
    let f = fit_exponential(&pts)?;
    let residuals = f.residuals.iter().map(|r| format!("{r:.6e}")).collect::<Vec<_>>().join(" ");
    emit(&[FitRow { alpha: f.alpha, beta: f.beta, beta_std_err: f.beta_std_err, residuals }], &a.output)
}

#[derive(Serialize)]
struct NativeRow {
    arm: &'static str,
    #[serde(rename = "L")]
    distance: usize,
    p_comp: f64,
    p_qubit: f64,
    p_link: f64,
    trials: usize,
    logical_errors: usize,
    p_log: f64,
    std_err: f64,
    draws: usize,
    z_score: f64,
}

impl NativeRow {
    // The csv writer cannot flatten nested structs.
    fn new(arm: &'static str, p: CampaignPoint, draws: usize, z_score: f64) -> Self {
        NativeRow {
            arm,
            distance: p.distance,
            p_comp: p.p_comp,
            p_qubit: p.p_qubit,
            p_link: p.p_link,
            trials: p.trials,
            logical_errors: p.logical_errors,
            p_log: p.p_log,
            std_err: p.std_err,
            draws,
            z_score,
        }
    }
}

fn native(a: NativeArgs) -> Result<()> {
    let c = native_vs_effective(a.distance, a.target, a.p_qubit, a.p_link, a.p_comp, a.trials, a.seed)?;
    if c.fabricated.logical_errors + c.native.logical_errors < 20 {
        eprintln!("warning: fewer than 20 logical errors in total; the comparison has little power");
    }
    let rows = [
        NativeRow::new("native", c.native, 0, c.z_score),
        NativeRow::new("fabricated", c.fabricated, c.draws, c.z_score),
    ];
    emit(&rows, &a.output)
}
