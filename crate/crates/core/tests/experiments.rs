use fabsim::effective_code::FabricationSpec;
use fabsim::experiments::output::{write_rows, Format};
use fabsim::experiments::{
    distance_study, native_vs_effective, percolation_rate, run_campaign, run_trial, supercheck_study, CampaignPoint,
    TrialConfig, TrialOutcome,
};
use fabsim::geometry::{CodeLayout, Coord};

fn csv(points: &[CampaignPoint]) -> Vec<u8> {
    let mut out = Vec::new();
    write_rows(points, Format::Csv, &mut out).unwrap();
    out
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn noiseless_intact_trial_keeps_full_distance() {
    let layout = CodeLayout::new(5).unwrap();
    let cfg = TrialConfig::new(5, 0.0);
    for i in 0..5 {
        let outcome = run_trial(&cfg, &layout, i).unwrap();
        assert_eq!(outcome, TrialOutcome::Completed { logical_error: false, effective_distance: 5, defects: 0 });
    }
}

#[test]
fn every_qubit_faulty_percolates() {
    let layout = CodeLayout::new(4).unwrap();
    let cfg = TrialConfig::new(4, 0.01).with_fabrication(1.0, 0.0);
    assert_eq!(run_trial(&cfg, &layout, 0).unwrap(), TrialOutcome::Percolated);
    let point = run_campaign(&cfg, 10, None).unwrap();
    assert_eq!(point.percolated, 10);
    assert!(point.p_log.is_nan());
}

#[test]
fn damaged_lattices_without_noise_never_fail() {
    let layout = CodeLayout::new(7).unwrap();
    let cfg = TrialConfig::new(7, 0.0).with_fabrication(0.0, 0.05).with_seed(3);
    let mut completed = 0;
    for i in 0..60 {
        match run_trial(&cfg, &layout, i).unwrap() {
            TrialOutcome::Percolated => {}
            TrialOutcome::Completed { logical_error, defects, .. } => {
                assert!(!logical_error, "trial {i}");
                assert_eq!(defects, 0, "trial {i}");
                completed += 1;
            }
        }
    }
    assert!(completed > 40);
}

#[test]
fn campaigns_do_not_depend_on_thread_count() {
    let configs =
        [TrialConfig::new(5, 0.006).with_seed(9), TrialConfig::new(5, 0.004).with_fabrication(0.04, 0.04).with_seed(9)];
    for cfg in configs {
        let one = in_pool(1, || run_campaign(&cfg, 300, None).unwrap());
        let four = in_pool(4, || run_campaign(&cfg, 300, None).unwrap());
        assert_eq!(csv(std::slice::from_ref(&one)), csv(&[four]));
        assert!(one.logical_errors > 0);
    }
    let studies = |threads| {
        in_pool(threads, || {
            (
                percolation_rate(12, 0.05, 0.1, 200, 4).unwrap(),
                distance_study(7, 0.05, 0.05, 200, 4).unwrap(),
                supercheck_study(7, 0.0, 0.1, 200, 4).unwrap(),
            )
        })
    };
    assert_eq!(studies(1), studies(3));
}

#[test]
fn percolated_trials_are_excluded_from_the_rate() {
    let cfg = TrialConfig::new(3, 0.01).with_fabrication(0.15, 0.15).with_seed(5);
    let p = run_campaign(&cfg, 400, None).unwrap();
    assert!(p.percolated > 0 && p.percolated < p.trials);
    let survivors = (p.trials - p.percolated) as f64;
    assert_eq!(p.p_log, p.logical_errors as f64 / survivors);
}

#[test]
fn fixed_fabrication_is_shared_by_every_trial() {
    let layout = CodeLayout::new(5).unwrap();
    let spec = FabricationSpec::parse("Q 4 4\n", &layout, std::path::Path::new("-")).unwrap();
    assert!(spec.faulty_qubits.contains(&Coord { r: 4, c: 4 }));
    let cfg = TrialConfig::new(5, 0.0);
    let p = run_campaign(&cfg, 20, Some(&spec)).unwrap();
    assert_eq!((p.percolated, p.logical_errors), (0, 0));
}

#[test]
fn logical_error_rate_grows_with_noise() {
    let rates: Vec<f64> = [0.002, 0.006, 0.012]
        .iter()
        .map(|&p| run_campaign(&TrialConfig::new(5, p).with_seed(1), 600, None).unwrap().p_log)
        .collect();
    assert!(rates.windows(2).all(|w| w[0] < w[1]), "{rates:?}");
}

#[test]
fn supercheck_weight_is_four_without_faults() {
    let s = supercheck_study(9, 0.0, 0.0, 20, 0).unwrap();
    assert_eq!(s.mean_max_weight, 4.0);
    assert_eq!(s.histogram[4], 20);
}

#[test]
fn native_comparison_without_faults_is_statistically_identical() {
    // The arms are seeded independently, so only their rates agree.
    let c = native_vs_effective(5, 5, 0.0, 0.0, 0.006, 400, 2).unwrap();
    assert_eq!(c.draws, 400);
    assert!(c.native.logical_errors > 10);
    assert!(c.z_score.abs() < 3.5, "{c:?}");
    let quiet = native_vs_effective(5, 3, 0.0, 0.08, 0.0, 50, 2).unwrap();
    assert_eq!(quiet.native.logical_errors + quiet.fabricated.logical_errors, 0);
}

#[test]
fn invalid_configurations_are_rejected() {
    assert!(run_campaign(&TrialConfig::new(1, 0.01), 10, None).is_err());
    assert!(run_campaign(&TrialConfig::new(5, -0.1), 10, None).is_err());
    assert!(run_campaign(&TrialConfig::new(5, 0.01).with_fabrication(1.5, 0.0), 10, None).is_err());
    assert!(native_vs_effective(5, 7, 0.0, 0.05, 0.01, 10, 0).is_err());
}
