mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use fabsim::effective_code::{build_effective_code, effective_distance, is_percolated, EffectiveCode, LogicalKind};
use fabsim::geometry::{overlap_is_even, CheckKind, CodeLayout, Coord};

use common::{brute_force_distance, overlap};

fn lattice() -> impl Strategy<Value = (usize, Vec<bool>)> {
    (3usize..=5, 0.0f64..0.3).prop_flat_map(|(l, p)| {
        let n = l * l + (l - 1) * (l - 1);
        (Just(l), prop::collection::vec(prop::bool::weighted(p), n))
    })
}

fn build(l: usize, picks: &[bool]) -> (CodeLayout, BTreeSet<Coord>, EffectiveCode) {
    let layout = CodeLayout::new(l).unwrap();
    let disabled: BTreeSet<Coord> =
        layout.data_qubits().iter().zip(picks).filter(|(_, &d)| d).map(|(&q, _)| q).collect();
    let code = build_effective_code(&layout, &disabled).unwrap();
    (layout, disabled, code)
}

fn is_even(a: &[Coord], b: &[Coord]) -> bool {
    overlap(a, b).is_multiple_of(2)
}

/// Restricted support of every measured check of one kind.
fn gauges(layout: &CodeLayout, code: &EffectiveCode, kind: CheckKind) -> Vec<Vec<Coord>> {
    code.sector(kind)
        .groups()
        .iter()
        .flat_map(|g| g.measured.iter())
        .map(|&ci| code.restricted_support(layout, ci).into_iter().map(|(_, q)| q).collect())
        .collect()
}

#[test]
fn intact_checks_pairwise_commute() {
    for l in 2..=8 {
        let layout = CodeLayout::new(l).unwrap();
        for s in layout.checks_of(CheckKind::Star) {
            for p in layout.checks_of(CheckKind::Plaquette) {
                let a: Vec<Coord> = s.1.support.iter().map(|x| x.1).collect();
                let b: Vec<Coord> = p.1.support.iter().map(|x| x.1).collect();
                assert!(overlap_is_even(&a, &b), "L={l}: {} and {}", s.1.site, p.1.site);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn groups_avoid_disabled_qubits_and_commute((l, picks) in lattice()) {
        let (layout, disabled, code) = build(l, &picks);
        let stars = code.sector(CheckKind::Star).groups();
        let plaqs = code.sector(CheckKind::Plaquette).groups();
        for g in stars.iter().chain(plaqs) {
            prop_assert!(g.support.iter().all(|q| !disabled.contains(q)));
            prop_assert!(!g.support.is_empty());
            prop_assert!(g.measured.iter().all(|m| g.members.contains(m)));
        }
        for s in stars {
            for p in plaqs {
                prop_assert!(is_even(&s.support, &p.support));
            }
        }
        // Superchecks also commute with the individual damaged checks of the other type.
        for s in stars {
            for gauge in gauges(&layout, &code, CheckKind::Plaquette) {
                prop_assert!(is_even(&s.support, &gauge));
            }
        }
        for p in plaqs {
            for gauge in gauges(&layout, &code, CheckKind::Star) {
                prop_assert!(is_even(&p.support, &gauge));
            }
        }
    }

    #[test]
    fn percolation_test_agrees_with_full_construction((l, picks) in lattice()) {
        let (layout, _, code) = build(l, &picks);
        prop_assert_eq!(is_percolated(&layout, code.disabled_mask()), code.percolated());
        prop_assert_eq!(code.percolated(), effective_distance(&code, LogicalKind::Z).is_none()
            || effective_distance(&code, LogicalKind::X).is_none());
    }

    #[test]
    fn logicals_are_valid_and_conjugate((l, picks) in lattice()) {
        let (layout, disabled, code) = build(l, &picks);
        prop_assume!(!code.percolated());
        let z_cut = code.logical_z_cut();
        let x_cut = code.logical_x_cut();
        prop_assert!(z_cut.iter().chain(x_cut).all(|q| !disabled.contains(q)));
        prop_assert_eq!(overlap(z_cut, x_cut) % 2, 1);
        // Bare logicals commute with stabilizers and with every gauge operator.
        for g in code.sector(CheckKind::Star).groups() {
            prop_assert!(is_even(z_cut, &g.support));
        }
        for gauge in gauges(&layout, &code, CheckKind::Star) {
            prop_assert!(is_even(z_cut, &gauge));
        }
        for g in code.sector(CheckKind::Plaquette).groups() {
            prop_assert!(is_even(x_cut, &g.support));
        }
        for gauge in gauges(&layout, &code, CheckKind::Plaquette) {
            prop_assert!(is_even(x_cut, &gauge));
        }
        // Dressed logicals commute with stabilizers only.
        let z = &code.logical(LogicalKind::Z).unwrap().qubits;
        let x = &code.logical(LogicalKind::X).unwrap().qubits;
        for g in code.sector(CheckKind::Star).groups() {
            prop_assert!(is_even(z, &g.support));
        }
        for g in code.sector(CheckKind::Plaquette).groups() {
            prop_assert!(is_even(x, &g.support));
        }
        prop_assert_eq!(overlap(z, x_cut) % 2, 1);
        prop_assert_eq!(overlap(x, z_cut) % 2, 1);
    }

    #[test]
    fn effective_distance_matches_exhaustive_search((l, picks) in lattice()) {
        let (layout, _, code) = build(l, &picks);
        prop_assume!(!code.percolated());
        let z = brute_force_distance(&layout, &code, CheckKind::Star, code.logical_x_cut());
        let x = brute_force_distance(&layout, &code, CheckKind::Plaquette, code.logical_z_cut());
        prop_assert_eq!(effective_distance(&code, LogicalKind::Z), z);
        prop_assert_eq!(effective_distance(&code, LogicalKind::X), x);
    }

    #[test]
    fn disabling_more_never_lengthens_logicals((l, picks) in lattice(), extra in any::<prop::sample::Index>()) {
        let (layout, disabled, code) = build(l, &picks);
        let q = layout.data_qubits()[extra.index(layout.data_qubits().len())];
        let mut more = disabled.clone();
        more.insert(q);
        let bigger = build_effective_code(&layout, &more).unwrap();
        if !code.percolated() {
            for kind in [LogicalKind::Z, LogicalKind::X] {
                if let Some(d) = effective_distance(&bigger, kind) {
                    prop_assert!(d <= effective_distance(&code, kind).unwrap());
                }
            }
        } else {
            prop_assert!(bigger.percolated());
        }
    }
}

#[test]
fn intact_lattices_keep_their_distance() {
    for l in 2..=15 {
        let layout = CodeLayout::new(l).unwrap();
        let code = build_effective_code(&layout, &BTreeSet::new()).unwrap();
        assert_eq!(effective_distance(&code, LogicalKind::Z), Some(l));
        assert_eq!(effective_distance(&code, LogicalKind::X), Some(l));
        assert_eq!(code.max_supercheck_weight(), if l == 2 { 3 } else { 4 });
    }
}
