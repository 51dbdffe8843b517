mod common;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{chi_square, exact_distribution, random_circuit, run_on_tableau, Op};

#[test]
fn measurement_statistics_match_state_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e);
    let shots = 3000;
    for circuit in 0..20 {
        let n = 1 + circuit % 5;
        let ops = random_circuit(n, 30, 4, &mut rng);
        let exact = exact_distribution(n, &ops);
        let total: f64 = exact.values().sum();
        assert!((total - 1.0).abs() < 1e-9, "reference distribution sums to {total}");
        let mut observed = BTreeMap::new();
        for _ in 0..shots {
            *observed.entry(run_on_tableau(n, &ops, &mut rng)).or_insert(0usize) += 1;
        }
        let chi = chi_square(&observed, &exact, shots);
        assert!(chi.passes(), "circuit {circuit}: {chi:?} for {ops:?}");
    }
}

#[test]
fn deterministic_outcomes_agree_exactly() {
    // A circuit without any superposition at readout has a single outcome.
    let ops = [Op::X(0), Op::Cnot(0, 2), Op::H(1), Op::H(1), Op::Y(1), Op::MeasureZ(1)];
    let exact = exact_distribution(3, &ops);
    assert_eq!(exact.len(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (want, _) = exact.into_iter().next().unwrap();
    for _ in 0..10 {
        assert_eq!(run_on_tableau(3, &ops, &mut rng), want);
    }
}

#[test]
fn ghz_state_has_two_outcomes() {
    let ops = [Op::H(0), Op::Cnot(0, 1), Op::Cnot(1, 2), Op::Cnot(2, 3)];
    let exact = exact_distribution(4, &ops);
    assert_eq!(exact.len(), 2);
    for p in exact.values() {
        assert!((p - 0.5).abs() < 1e-12);
    }
}
