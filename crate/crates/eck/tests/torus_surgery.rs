mod common;

use std::collections::BTreeMap;

use eck::euler::graded_chi;
use eck::orbits::{admissible, Orbit, OrbitSet, Rules};
use eck::surgery::{
    a_complex, b_complex, d_f1_chain, padded_a_complex, padding, surgery_eck_hat, tower_row,
    two_tower_complex, two_tower_e1, u_power_cone, u_power_kernel, u_power_map, InteriorModel,
    SurgerySpec,
};
use eck::torusknot::{render_diagram, shifted_quotient};
use eck::{ChainComplex, F2Vector, Grading, TorusKnot};
use proptest::prelude::*;

const KNOTS: [i64; 4] = [3, 5, 7, 9];

/// The hat table: `e₂^k` in grading `2k`, `e₂^k·h₋` in grading `2k+1`.
fn table_generator(a: i64) -> String {
    let k = a / 2;
    let e = match k {
        0 => String::new(),
        1 => "e2".to_string(),
        _ => format!("e2^{k}"),
    };
    match (a % 2, e.is_empty()) {
        (0, true) => "1".to_string(),
        (0, false) => e,
        (_, true) => "h-".to_string(),
        (_, false) => format!("{e}·h-"),
    }
}

#[test]
fn zeroth_column_and_hat_groups() {
    for n in KNOTS {
        let k = TorusKnot::new(n).unwrap();
        let col = k.zeroth_column();
        assert_eq!(common::homology_rank(&col), 1);
        assert!(common::is_nonzero_class(
            &col,
            &common::vector_of(&col, &["1"])
        ));

        let graded = col.retain_entries(|s, t| s.alexander == t.alexander);
        let oracle = common::homology_by(&graded, |g| g.alexander);
        let hat = k.eck_hat();
        for a in 0..=2 * k.genus() + 3 {
            let expected = usize::from(a <= 2 * k.genus());
            assert_eq!(oracle.get(&a).copied().unwrap_or(0), expected);
            assert_eq!(hat.rank(a), expected, "T(2,{n}) grading {a}");
            if expected == 1 {
                assert_eq!(hat.generator(a).unwrap(), table_generator(a));
            }
        }
    }
}

#[test]
fn hat_euler_characteristic_is_alexander_polynomial() {
    for n in KNOTS {
        let k = TorusKnot::new(n).unwrap();
        let chi = graded_chi(&k.eck_hat_complex(), &Grading::Alexander).unwrap();
        let delta = common::torus_alexander(2, n as usize);
        let ours: Vec<i64> = (0..delta.len() as i64).map(|d| chi.coeff(d)).collect();
        assert_eq!(ours, delta);
        assert_eq!(chi.max_degree(), Some(delta.len() as i64 - 1));
    }
}

#[test]
fn full_complexes_are_valid_and_admissible() {
    for n in KNOTS {
        let k = TorusKnot::new(n).unwrap();
        let alphabet = k.alphabet();
        for imax in 0..=6 {
            let c = k.full_complex(imax);
            assert!(c.validate().is_empty());
            assert!(common::d_squared_zero(&c));
            for (s, t) in c.entry_ids() {
                let (s, t) = (
                    OrbitSet::parse(&s, &alphabet).unwrap(),
                    OrbitSet::parse(&t, &alphabet).unwrap(),
                );
                assert!(
                    admissible(&s, &t, &Rules::default()).admissible,
                    "{s} -> {t}"
                );
            }
        }
    }
}

#[test]
fn translational_symmetry() {
    for n in KNOTS {
        let k = TorusKnot::new(n).unwrap();
        let imax = 6;
        let c = k.full_complex(imax);
        for shift in 0..imax {
            let q = shifted_quotient(&k, &c, shift);
            assert!(
                q.same_up_to_order(&k.full_complex(imax - shift)),
                "T(2,{n}) shift {shift}"
            );
        }
    }
}

#[test]
fn diagram_is_deterministic() {
    let k = TorusKnot::new(5).unwrap();
    let a = render_diagram(&k.full_complex(4));
    let b = render_diagram(&k.full_complex(4));
    assert_eq!(a, b);
    assert_eq!(
        a.lines()
            .filter(|l| l.contains(" | ") && l.contains('o'))
            .count(),
        9
    );
}

fn b_oracle(m: i64, i: i64) -> usize {
    // Row 2g: column generators e₂^g, e₊h₋e₂^{g−1}, e₊²e₂^{g−1}, …; cancel
    // the horizontal arrows by hand from the full complex.
    let k = TorusKnot::new(m).unwrap();
    let two_g = 2 * k.genus();
    let full = k.full_complex(u32::try_from(two_g).unwrap());
    let row = full
        .retain_entries(|s, t| s.alexander == t.alexander)
        .subcomplex(|g| g.alexander == two_g && g.eplus < i)
        .unwrap();
    common::homology_rank(&row)
}

#[test]
fn a_and_b_complexes_match_oracles() {
    for m in [3, 5, 7] {
        let k = TorusKnot::new(m).unwrap();
        for j in 0..=2 * k.genus() + 2 {
            let a = a_complex(&k, j);
            assert_eq!(a.homology_rank().unwrap(), common::homology_rank(&a));
        }
        for i in 0..=2 * k.genus() + 1 {
            assert_eq!(b_complex(&k, i).homology_rank().unwrap(), b_oracle(m, i));
        }
    }
}

#[test]
fn surgery_support_pattern() {
    for m in [3, 5, 7] {
        let k = TorusKnot::new(m).unwrap();
        let two_g = 2 * k.genus();
        for n in two_g + 1..=two_g + 6 {
            let r = surgery_eck_hat(&SurgerySpec::new(k, n).unwrap());
            assert_eq!(r.classes.len() as i64, n);
            for class in &r.classes {
                let j = class.class;
                for piece in &class.pieces {
                    assert!(piece.grading == j || (j < two_g && piece.grading == j + n));
                    assert!(piece.grading < n + two_g);
                    assert_eq!(piece.representatives.len(), piece.rank);
                }
                if j >= two_g {
                    assert_eq!(class.rank_at(j), 1);
                    assert_eq!(class.total_rank(), 1);
                } else {
                    let a = a_complex(&k, j);
                    let b = b_complex(&k, two_g - j);
                    assert_eq!(class.rank_at(j), common::homology_rank(&a));
                    assert_eq!(class.rank_at(j + n), common::homology_rank(&b));
                }
            }
        }
    }
}

#[test]
fn framing_must_exceed_twice_the_genus() {
    let k = TorusKnot::new(7).unwrap();
    assert!(SurgerySpec::new(k, 6).is_err());
    assert!(SurgerySpec::new(k, 7).is_ok());
}

#[test]
fn padding_is_a_grading_bijection() {
    for m in [3, 5] {
        let k = TorusKnot::new(m).unwrap();
        for j in 0..8 {
            let plain = a_complex(&k, j);
            let padded = padded_a_complex(&k, j);
            assert_eq!(plain.len(), padded.len());
            assert_eq!(plain.entry_count(), padded.entry_count());
            assert!(padded.generators().iter().all(|g| g.alexander == j));
            for (a, b) in plain.generators().iter().zip(padded.generators()) {
                assert_eq!(a.z2, b.z2);
            }
            assert_eq!(
                padded.homology_rank().unwrap(),
                plain.homology_rank().unwrap()
            );
            let pairs = padding(&k, j);
            let mut targets: Vec<&String> = pairs.iter().map(|p| &p.1).collect();
            targets.sort();
            targets.dedup();
            assert_eq!(targets.len(), pairs.len());
        }
    }
}

#[test]
fn cone_matches_kernel_subcomplex() {
    for m in [3, 5, 7] {
        let k = TorusKnot::new(m).unwrap();
        let two_g = 2 * k.genus();
        for j in two_g + 1..=two_g + 6 {
            for n in 1..=j {
                let cone = u_power_cone(&k, n, j).unwrap();
                assert!(common::d_squared_zero(&cone));
                let kernel = u_power_kernel(&k, n, j).unwrap();
                assert_eq!(
                    common::homology_rank(&cone),
                    common::homology_rank(&kernel),
                    "m={m} n={n} j={j}"
                );
                // The quotient map is onto and kills exactly the kernel.
                let f = u_power_map(&k, n, j).unwrap();
                let hit: std::collections::BTreeSet<usize> =
                    f.entries().into_iter().map(|(_, t)| t).collect();
                assert_eq!(hit.len(), f.target.len());
                let killed = f.source.len() - f.entries().len();
                assert_eq!(killed, kernel.len());
            }
        }
    }
}

#[test]
fn d_f1_cone_reproduces_second_tower() {
    for m in [3, 5, 7] {
        let k = TorusKnot::new(m).unwrap();
        let two_g = 2 * k.genus();
        for n in two_g + 1..=two_g + 4 {
            let r = surgery_eck_hat(&SurgerySpec::new(k, n).unwrap());
            for j in n..=n + two_g + 2 {
                let s = d_f1_chain(&k, n, j).unwrap();
                let class = r.class(j % n).unwrap();
                assert_eq!(s.cone_rank, class.rank_at(j), "m={m} n={n} j={j}");
                let two_tower = two_tower_complex(&k, n, j);
                assert_eq!(common::homology_rank(&two_tower), class.rank_at(j));
            }
        }
        for j in two_g + 1..two_g + 6 {
            let s = d_f1_chain(&k, 1, j).unwrap();
            assert_eq!((s.map_rank, s.cone_rank), (1, 0));
        }
    }
}

#[test]
fn two_tower_first_page() {
    let k = TorusKnot::new(5).unwrap();
    let e = two_tower_e1(&k, 8, 9);
    assert_eq!(e.e0, BTreeMap::from([(0, 5), (1, 2)]));
    assert_eq!(e.e0[&0], a_complex(&k, 9).len());
    assert_eq!(e.e0[&1], tower_row(&k, 1).len());
    assert_eq!(e.e1, BTreeMap::from([(0, 1), (1, 0)]));
    let single = two_tower_e1(&k, 8, 6);
    assert_eq!(single.e0.keys().copied().collect::<Vec<_>>(), vec![0]);
    assert_eq!(single.e1[&0], 1);
}

#[test]
fn two_tower_entries_are_admissible_after_padding() {
    let k = TorusKnot::new(5).unwrap();
    let n = 8;
    let mut alphabet = k.alphabet();
    let h = Orbit::positive_hyperbolic("h_{1/8}", 8).with_winding(1);
    alphabet.insert(h);
    let e_minus = alphabet.get("e-").unwrap().clone();
    for j in 0..=14 {
        let c = two_tower_complex(&k, n, j);
        let padded = |id: &str| {
            let set = OrbitSet::parse(id, &alphabet).unwrap();
            let pad = u32::try_from(j - set.alexander()).unwrap();
            OrbitSet::power(e_minus.clone(), pad)
                .unwrap()
                .multiply(&set)
                .unwrap()
        };
        for (s, t) in c.entry_ids() {
            let verdict = admissible(&padded(&s), &padded(&t), &Rules::default());
            assert!(
                verdict.admissible,
                "j={j} {s} -> {t}: {:?}",
                verdict.violations
            );
        }
    }
}

fn unit(c: &ChainComplex, id: &str) -> F2Vector {
    F2Vector::unit(c.len(), c.index_of(id).unwrap())
}

fn check_phi(model: &InteriorModel, k: i64) {
    let phi = model.phi(k).unwrap();
    let level = model.level(k).len();
    assert_eq!(
        phi.homology_rank(),
        level,
        "Φ is a quasi-isomorphism at level {k}"
    );
    assert_eq!(common::homology_rank(&model.tower(k)), level);
    if k >= 1 {
        let u = model.u_map(k).unwrap();
        let phi_below = model.phi(k - 1).unwrap();
        for x in model.level(k) {
            let lhs = u.apply(&phi.apply(&unit(&phi.source, x)));
            let mut rhs = F2Vector::zeros(phi_below.target.len());
            for y in model.dprime_of(x) {
                rhs.xor_assign(&phi_below.apply(&unit(&phi_below.source, &y)));
            }
            assert_eq!(lhs, rhs, "Φ(Γ)/e₊ = Φ(d′Γ) at {x}");
        }
    }
}

#[test]
fn phi_on_the_torus_interior() {
    for m in [3, 5, 7] {
        let model = InteriorModel::torus(m, 2 * m - 1);
        for k in 0..2 * m {
            check_phi(&model, k);
        }
    }
}

fn model_strategy() -> impl Strategy<Value = InteriorModel> {
    proptest::collection::vec(1usize..=3, 2..=5)
        .prop_flat_map(|sizes| {
            let total: usize = sizes.iter().sum();
            (
                Just(sizes),
                proptest::collection::vec(any::<bool>(), total * total),
            )
        })
        .prop_map(|(sizes, bits)| {
            let levels: Vec<Vec<String>> = sizes
                .iter()
                .enumerate()
                .map(|(k, &s)| (0..s).map(|i| format!("x{k}_{i}")).collect())
                .collect();
            let mut dprime = Vec::new();
            let total: usize = sizes.iter().sum();
            let mut flat = 0;
            for k in 1..levels.len() {
                for (i, x) in levels[k].iter().enumerate() {
                    for (j, y) in levels[k - 1].iter().enumerate() {
                        if bits[((flat + i) * total + j) % bits.len()] {
                            dprime.push((x.clone(), y.clone()));
                        }
                    }
                }
                flat += levels[k].len();
            }
            InteriorModel::new(levels, dprime).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phi_commutes_with_u_on_synthetic_models(model in model_strategy()) {
        for k in 0..6 {
            check_phi(&model, k);
        }
    }

    #[test]
    fn hat_rank_is_one_through_twice_the_genus(n in (1i64..6).prop_map(|k| 2 * k + 1)) {
        let k = TorusKnot::new(n).unwrap();
        let hat = k.eck_hat();
        prop_assert_eq!(hat.groups.len() as i64, 2 * k.genus() + 1);
        prop_assert!(hat.groups.values().all(|g| g.rank == 1));
    }
}
