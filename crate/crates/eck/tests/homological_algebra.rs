mod common;

use std::collections::BTreeMap;

use common::{random_complex_strategy, ss_dimensions};
use eck::chaincx::{mapping_cone, spectral_sequence};
use eck::euler::graded_chi;
use eck::f2linalg::{homology_rank, kernel_basis, rank};
use eck::{BitMatrix, ChainComplex, ChainMap, Direction, FiltrationSpec, Grading};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn matrix_strategy(max: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max, 1..=max)
        .prop_flat_map(|(r, c)| {
            (
                Just(r),
                Just(c),
                proptest::collection::vec(any::<bool>(), r * c),
            )
        })
        .prop_map(|(r, c, bits)| {
            let entries = (0..r)
                .flat_map(|i| (0..c).map(move |j| (i, j)))
                .filter(|&(i, j)| bits[i * c + j]);
            BitMatrix::from_entries(r, c, entries).unwrap()
        })
}

fn dense_matrix_rank(m: &BitMatrix) -> usize {
    let cols: Vec<common::Bits> = (0..m.cols())
        .map(|j| {
            let mut v = common::Bits::zeros(m.rows());
            for i in 0..m.rows() {
                if m.get(i, j) {
                    v.flip(i);
                }
            }
            v
        })
        .collect();
    common::dense_rank(&cols)
}

/// Picks a canceling pair `(a, b)`: the first arrow in entry order.
fn first_arrow(c: &ChainComplex) -> Option<(String, String)> {
    c.entry_ids().into_iter().next()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_matches_dense_oracle(m in matrix_strategy(12)) {
        prop_assert_eq!(rank(&m), dense_matrix_rank(&m));
    }

    #[test]
    fn rank_is_transpose_invariant(m in matrix_strategy(12)) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn rank_nullity(m in matrix_strategy(12)) {
        let kernel = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn homology_matches_oracle(rc in random_complex_strategy(20)) {
        let c = rc.build();
        prop_assert!(c.validate().is_empty());
        prop_assert_eq!(c.homology_rank().unwrap(), common::homology_rank(&c));
        let d = c.matrix();
        prop_assert_eq!(homology_rank(&d, &d).unwrap(), common::homology_rank(&c));
    }

    #[test]
    fn homology_is_invariant_under_change_of_basis(rc in random_complex_strategy(16)) {
        let mut plain = rc.clone();
        plain.conjugation.clear();
        prop_assert_eq!(
            rc.build().homology_rank().unwrap(),
            plain.build().homology_rank().unwrap()
        );
    }

    #[test]
    fn gaussian_cancel_preserves_homology(rc in random_complex_strategy(20)) {
        let mut c = rc.build();
        let before = common::homology_rank(&c);
        while let Some((a, b)) = first_arrow(&c) {
            c = c.gaussian_cancel(&a, &b).unwrap();
            prop_assert!(c.validate().d_squared.is_empty());
            prop_assert_eq!(common::homology_rank(&c), before);
        }
        prop_assert_eq!(c.len(), before);
    }

    #[test]
    fn chi_is_invariant_under_cancellation_and_associated_graded(rc in random_complex_strategy(20)) {
        let c = rc.build();
        let chi = graded_chi(&c, &Grading::Alexander).unwrap();
        let same_grading = c.entry_ids().into_iter().find(|(a, b)| {
            c.generator(a).unwrap().alexander == c.generator(b).unwrap().alexander
        });
        if let Some((a, b)) = same_grading {
            let reduced = c.gaussian_cancel(&a, &b).unwrap();
            prop_assert_eq!(graded_chi(&reduced, &Grading::Alexander).unwrap(), chi.clone());
        }
        let f = FiltrationSpec::from_grading(&c, &Grading::Extra("F".into()), Direction::Ascending).unwrap();
        prop_assert_eq!(graded_chi(&c.associated_graded(&f), &Grading::Alexander).unwrap(), chi);
    }

    #[test]
    fn spectral_sequence_matches_brute_force(rc in random_complex_strategy(16)) {
        let c = rc.build();
        let f = FiltrationSpec::from_grading(&c, &Grading::Extra("F".into()), Direction::Ascending).unwrap();
        let pages = spectral_sequence(&c, &f, 5, None).unwrap();
        let levels: Vec<i64> = c.generators().iter().map(|g| g.alexander).collect();
        for page in &pages {
            let oracle = ss_dimensions(&c, &levels, page.r as i64);
            let ours: BTreeMap<(i64, u8), usize> = page
                .ranks
                .iter()
                .filter(|(_, &r)| r > 0)
                .map(|(&(p, aux), &r)| ((p, aux as u8), r))
                .collect();
            prop_assert_eq!(ours, oracle, "page {}", page.r);
        }
        prop_assert_eq!(pages.last().unwrap().total(), common::homology_rank(&c));
    }

    #[test]
    fn descending_filtration_mirrors_ascending(rc in random_complex_strategy(12)) {
        let c = rc.build();
        let flipped = c
            .map_generators(|g| {
                let mut g = g.clone();
                g.extra.insert("G".into(), -g.alexander);
                g
            })
            .unwrap();
        let asc = FiltrationSpec::from_grading(&flipped, &Grading::Extra("F".into()), Direction::Ascending).unwrap();
        let desc = FiltrationSpec::from_grading(&flipped, &Grading::Extra("G".into()), Direction::Descending).unwrap();
        let a = spectral_sequence(&flipped, &asc, 4, None).unwrap();
        let d = spectral_sequence(&flipped, &desc, 4, None).unwrap();
        for (pa, pd) in a.iter().zip(&d) {
            let mirrored: BTreeMap<(i64, i64), usize> =
                pd.ranks.iter().map(|(&(p, x), &r)| ((-p, x), r)).collect();
            prop_assert_eq!(&pa.ranks, &mirrored);
        }
    }

    #[test]
    fn json_round_trip(rc in random_complex_strategy(12)) {
        let c = rc.build();
        let text = c.to_json();
        let back = ChainComplex::from_json(&text).unwrap();
        prop_assert!(back.same_up_to_order(&c));
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn cone_of_identity_is_acyclic(rc in random_complex_strategy(12)) {
        let c = rc.build();
        let cone = mapping_cone(&ChainMap::identity(c));
        prop_assert!(cone.validate().d_squared.is_empty());
        prop_assert_eq!(common::homology_rank(&cone), 0);
    }

    #[test]
    fn cone_of_zero_map_adds_homology(a in random_complex_strategy(8), b in random_complex_strategy(8)) {
        let (ca, cb) = (a.build(), b.build());
        let expected = common::homology_rank(&ca) + common::homology_rank(&cb);
        let cone = mapping_cone(&ChainMap::zero(ca, cb));
        prop_assert_eq!(cone.homology_rank().unwrap(), expected);
    }
}

#[test]
fn homology_representatives_are_independent_classes() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = random_complex_strategy(16);
    for _ in 0..64 {
        let c = strategy.new_tree(&mut runner).unwrap().current().build();
        let h = c.total_homology().unwrap();
        let reps: Vec<common::Bits> = h
            .representatives
            .iter()
            .map(|r| {
                let ids: Vec<&str> = r.iter().map(String::as_str).collect();
                common::vector_of(&c, &ids)
            })
            .collect();
        assert!(common::classes_independent(&c, &reps));
        assert_eq!(reps.len(), common::homology_rank(&c));
    }
}
