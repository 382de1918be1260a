mod common;

use ctxkit_core::{
    betti_numbers, cyclic_cover, is_acyclic, make_classical, make_n_cycle, make_path, validate_scenario, Context,
    Measurement, Scenario, ScenarioComplex, Violation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_scenario;

/// Components of the 1-skeleton by union-find.
fn components(c: &ScenarioComplex) -> usize {
    let mut parent: Vec<usize> = (0..c.vertices.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for [a, b] in &c.edges {
        let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
        parent[ra] = rb;
    }
    (0..parent.len()).filter(|&x| find(&mut parent, x) == x).count()
}

fn relabel(s: &Scenario, f: impl Fn(&str) -> String) -> Scenario {
    let ms = s.measurements().iter().map(|m| Measurement::new(f(m.id()), m.outcomes().iter().cloned()).unwrap()).collect();
    let cs = s.cover().iter().map(|c| Context::new(c.members().iter().map(|id| f(id))).unwrap()).collect();
    Scenario::new(ms, cs).unwrap()
}

#[test]
fn cycles_have_one_hole() {
    for n in 3..=10 {
        let s = make_n_cycle(n, &["0", "1"]).unwrap();
        let c = ScenarioComplex::build(&s);
        assert!(c.triangles.is_empty());
        let oracle = c.edges.len() + components(&c) - c.vertices.len();
        let b = betti_numbers(&s);
        assert_eq!((b.b0, b.b1), (1, oracle));
        assert_eq!(b.b1, 1, "n={n}");
        assert!(!is_acyclic(&s));
        assert!(validate_scenario(&s, true).is_empty());
    }
}

#[test]
fn classical_and_paths_are_acyclic() {
    for n in 2..=7 {
        let p = make_path(n, &["0", "1"]).unwrap();
        assert!(is_acyclic(&p));
        let k = make_classical(&make_n_cycle(n.max(3), &["0", "1"]).unwrap());
        assert_eq!(k.cover().len(), 1);
        assert!(is_acyclic(&k));
    }
}

#[test]
fn cyclic_covers_of_five() {
    let b = |w| betti_numbers(&cyclic_cover(5, w, &["0", "1"]).unwrap());
    assert_eq!((b(2).b0, b(2).b1), (1, 1));
    assert_eq!((b(3).b0, b(3).b1), (1, 1));
    // truncated at dimension two, every pair and triple is a face
    assert_eq!((b(4).b0, b(4).b1), (1, 0));
    assert_eq!((b(5).b0, b(5).b1), (1, 0));
}

#[test]
fn strict_validation_reports_nested_contexts() {
    let ms = ["a", "b", "c"].iter().map(|i| Measurement::new(*i, ["0", "1"]).unwrap()).collect();
    let cs = vec![Context::new(["a", "b"]).unwrap(), Context::new(["a"]).unwrap()];
    let s = Scenario::new(ms, cs).unwrap();
    let v = validate_scenario(&s, false);
    assert_eq!(v, vec![Violation::Uncovered("c".into())]);
    let v = validate_scenario(&s, true);
    assert_eq!(v.len(), 2);
    assert!(v.iter().any(|x| matches!(x, Violation::NonMaximal { .. })));
}

#[test]
fn disconnected_scenarios_count_components() {
    let ms = ["a", "b", "c", "d"].iter().map(|i| Measurement::new(*i, ["0", "1"]).unwrap()).collect();
    let cs = vec![Context::new(["a", "b"]).unwrap(), Context::new(["c", "d"]).unwrap()];
    let b = betti_numbers(&Scenario::new(ms, cs).unwrap());
    assert_eq!((b.b0, b.b1), (2, 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn betti_is_relabel_invariant(seed in any::<u64>(), n in 1usize..=7, k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&mut rng, n, k);
        let r = relabel(&s, |id| format!("q{}", 100 - id[1..].parse::<i64>().unwrap()));
        prop_assert_eq!(betti_numbers(&s), betti_numbers(&r));
        let b = betti_numbers(&s);
        prop_assert!(b.b0 >= 1);
        let c = ScenarioComplex::build(&s);
        prop_assert_eq!(b.b0, components(&c));
        // Euler characteristic bounds the first Betti number from below
        let chi = c.euler_characteristic();
        prop_assert!(b.b0 as i64 - b.b1 as i64 <= chi);
        prop_assert!(is_acyclic(&make_classical(&s)));
    }
}
