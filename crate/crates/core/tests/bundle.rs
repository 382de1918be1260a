mod common;

use ctxkit_core::fixtures::{sparable_base, sparable_model};
use ctxkit_core::rational::ratio;
use ctxkit_core::{
    check_no_disturbance, deterministic_model, enumerate_sections, hollow_triangle_bundle, is_trivializable,
    make_n_cycle, moebius_bundle, nondisturbing_base_polytope, product_bundle, pushforward, twist_report,
    DecideOptions, Distribution, Gauge,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_bundle, random_scenario, random_weights};

const OPTS: DecideOptions = DecideOptions { limit: ctxkit_core::DEFAULT_LIMIT };

fn abc() -> Vec<String> {
    vec!["a".into(), "b".into(), "c".into()]
}

#[test]
fn sparable_pushforward_matches_table() {
    let b = hollow_triangle_bundle();
    let m = pushforward(&b, &sparable_base()).unwrap();
    assert_eq!(m, sparable_model());
    assert!(check_no_disturbance(&m).is_empty());
}

#[test]
fn point_state_disturbs_at_b() {
    let b = hollow_triangle_bundle();
    // local (up, 1, g)
    let base = Distribution::point_mass(abc(), vec![2, 2, 2], &[0, 1, 0]).unwrap();
    let m = pushforward(&b, &base).unwrap();
    let s = m.scenario();
    let cell = |ctx: &str, labels: [&str; 2]| {
        let c = s.cover().iter().find(|c| c.key() == ctx).unwrap();
        let t: Vec<usize> =
            c.members().iter().zip(labels).map(|(id, l)| s.measurement(id).unwrap().outcome_index(l).unwrap()).collect();
        m.table(c).unwrap().weight(&t).clone()
    };
    assert_eq!(cell("a,b", ["up", "0"]), ratio(1, 1));
    assert_eq!(cell("b,c", ["1", "r"]), ratio(1, 1));
    // context ca reads (g, down); stored as (a, c)
    assert_eq!(cell("a,c", ["down", "g"]), ratio(1, 1));
    let v = check_no_disturbance(&m);
    let at_b = v.iter().find(|v| v.overlap == vec!["b".to_string()]).expect("disturbance at b");
    assert_eq!(at_b.left.key(), "a,b");
    assert_eq!(at_b.right.key(), "b,c");
    assert_eq!(at_b.left_marginal.weights(), &[ratio(1, 1), ratio(0, 1)]);
    assert_eq!(at_b.right_marginal.weights(), &[ratio(0, 1), ratio(1, 1)]);
    // every measurement reads opposite outcomes in its two contexts
    assert_eq!(v.len(), 3);
}

#[test]
fn base_polytope_examples() {
    let b = hollow_triangle_bundle();
    let r = nondisturbing_base_polytope(&b, OPTS).unwrap();
    let base = r.base.unwrap();
    assert!(check_no_disturbance(&pushforward(&b, &base).unwrap()).is_empty());
    // the half-half pair is a point of the same polytope
    assert!(ctxkit_core::bundle::base_polytope_system(&b, OPTS).unwrap().is_solution(sparable_base().weights()));

    let p = product_bundle(&make_n_cycle(4, &["0", "1"]).unwrap());
    let uniform = Distribution::new(
        (0..4).map(|i| format!("M{i}")).collect(),
        vec![2; 4],
        vec![ratio(1, 16); 16],
    )
    .unwrap();
    assert!(ctxkit_core::bundle::base_polytope_system(&p, OPTS).unwrap().is_solution(uniform.weights()));
    assert!(nondisturbing_base_polytope(&p, OPTS).unwrap().base.is_some());

    // computed: the uniform base always works, so the Möbius triangle is feasible
    let mb = moebius_bundle(3, &[0]).unwrap();
    let r = nondisturbing_base_polytope(&mb, OPTS).unwrap();
    assert!(check_no_disturbance(&pushforward(&mb, &r.base.unwrap()).unwrap()).is_empty());
}

#[test]
fn moebius_parity_table() {
    for n in 3..=8 {
        for k in 0..=3usize {
            let flips: Vec<usize> = (0..k).map(|i| (2 * i) % n).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            if flips.len() != k {
                continue;
            }
            let b = moebius_bundle(n, &flips).unwrap();
            let r = twist_report(&b).unwrap();
            assert_eq!(r.twist_count(), k);
            assert_eq!(r.cycles.len(), 1);
            assert_eq!(r.cycles[0].odd, k % 2 == 1);
            let (ok, gauge) = is_trivializable(&b).unwrap();
            assert_eq!(ok, k % 2 == 0, "n={n} k={k}");
            if let Some(g) = gauge {
                assert_eq!(g.apply(&b).unwrap(), product_bundle(b.scenario()));
            }
        }
    }
}

#[test]
fn product_sections_are_all_assignments() {
    for n in 3..=6 {
        let b = product_bundle(&make_n_cycle(n, &["0", "1"]).unwrap());
        let secs = enumerate_sections(&b, OPTS).unwrap();
        assert_eq!(secs.len(), 1 << n);
    }
    let s = ctxkit_core::Scenario::new(
        vec![
            ctxkit_core::Measurement::new("t", ["x", "y", "z"]).unwrap(),
            ctxkit_core::Measurement::new("u", ["0", "1"]).unwrap(),
        ],
        vec![ctxkit_core::Context::new(["t", "u"]).unwrap()],
    )
    .unwrap();
    assert_eq!(enumerate_sections(&product_bundle(&s), OPTS).unwrap().len(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_is_gauge_invariant(seed in any::<u64>(), n in 3usize..=6, k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, n, k);
        let b = random_bundle(&mut rng, &s);
        let mut g = Gauge::identity();
        for m in s.measurements() {
            if rng.gen_bool(0.5) {
                g.permutations.insert(m.id().to_string(), vec![1, 0]);
            }
        }
        for c in s.cover() {
            if rng.gen_bool(0.5) {
                g.context_flips.insert(c.clone());
            }
        }
        let before = twist_report(&b).unwrap();
        let after = twist_report(&g.apply(&b).unwrap()).unwrap();
        prop_assert_eq!(before.parities(), after.parities());
        prop_assert_eq!(is_trivializable(&b).unwrap().0, is_trivializable(&g.apply(&b).unwrap()).unwrap().0);
    }

    #[test]
    fn trivializable_iff_even_and_gauge_restores(seed in any::<u64>(), n in 2usize..=6, k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, n, k);
        let b = random_bundle(&mut rng, &s);
        let r = twist_report(&b).unwrap();
        let (ok, g) = is_trivializable(&b).unwrap();
        prop_assert_eq!(ok, r.all_even());
        prop_assert_eq!(ok, g.is_some());
        if let Some(g) = g {
            let fixed = g.apply(&b).unwrap();
            prop_assert_eq!(twist_report(&fixed).unwrap().twist_count(), 0);
            prop_assert_eq!(fixed, product_bundle(&s));
        }
    }

    #[test]
    fn sections_are_deterministic_points(seed in any::<u64>(), n in 2usize..=6, k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, n, k);
        let b = random_bundle(&mut rng, &s);
        for sec in enumerate_sections(&b, OPTS).unwrap() {
            let det = deterministic_model(&s, &sec.assignment).unwrap();
            prop_assert!(check_no_disturbance(&det).is_empty());
            let idx: Vec<usize> = s
                .measurements()
                .iter()
                .map(|m| b.local_space(m.id()).unwrap().index_of(&sec.local[m.id()]).unwrap())
                .collect();
            let point = Distribution::point_mass(s.ids().map(String::from).collect(), b.base_shape(), &idx).unwrap();
            prop_assert_eq!(pushforward(&b, &point).unwrap(), det);
        }
    }

    #[test]
    fn product_pushforward_never_disturbs(seed in any::<u64>(), n in 2usize..=5, k in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, n, k);
        let b = product_bundle(&s);
        let shape = b.base_shape();
        let total: usize = shape.iter().product();
        let base = Distribution::new(s.ids().map(String::from).collect(), shape, random_weights(&mut rng, total)).unwrap();
        let m = pushforward(&b, &base).unwrap();
        prop_assert!(check_no_disturbance(&m).is_empty());
        prop_assert_eq!(m, ctxkit_core::EmpiricalModel::from_joint(s.clone(), &base).unwrap());
    }
}
