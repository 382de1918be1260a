#![allow(dead_code)]

use ctxkit_core::rational::ratio;
use ctxkit_core::{
    make_path, Context, DeterministicAssignment, Distribution, EmpiricalModel, HiddenVariableModel, Measurement,
    Rational, SampleBundle, Scenario,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Positive integer weights normalized to sum to one.
pub fn random_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| ratio(w, total)).collect()
}

pub fn random_assignment<R: Rng>(rng: &mut R, s: &Scenario) -> DeterministicAssignment {
    let idx: Vec<usize> = s.measurements().iter().map(|m| rng.gen_range(0..m.arity())).collect();
    DeterministicAssignment::from_indices(s, &idx)
}

pub fn random_hv_model<R: Rng>(rng: &mut R, s: &Scenario) -> HiddenVariableModel {
    let k = rng.gen_range(1..=5);
    HiddenVariableModel {
        assignments: (0..k).map(|_| random_assignment(rng, s)).collect(),
        weights: random_weights(rng, k),
    }
}

/// No-disturbance model on a binary path: a random marginal for `M0` and a
/// random conditional table for each step, multiplied out edge by edge.
pub fn random_chain_model<R: Rng>(rng: &mut R, n: usize) -> EmpiricalModel {
    let s = make_path(n, &["0", "1"]).unwrap();
    let mut marginal = random_weights(rng, 2);
    let mut tables = Vec::new();
    for i in 0..n - 1 {
        let cond: Vec<Vec<Rational>> = (0..2).map(|_| random_weights(rng, 2)).collect();
        let mut joint = Vec::with_capacity(4);
        for (mx, row) in marginal.iter().zip(&cond) {
            for c in row {
                joint.push(mx * c);
            }
        }
        marginal = (0..2).map(|y| &joint[y] + &joint[2 + y]).collect();
        tables.push(
            Distribution::new(vec![format!("M{i}"), format!("M{}", i + 1)], vec![2, 2], joint).unwrap(),
        );
    }
    EmpiricalModel::new(s, tables).unwrap()
}

/// Scenario on `n` binary measurements with a random cover: random contexts
/// of size 1..=3, then every uncovered measurement joined to a random context.
pub fn random_scenario<R: Rng>(rng: &mut R, n: usize, contexts: usize) -> Scenario {
    let ids: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let ms = ids.iter().map(|i| Measurement::new(i.clone(), ["0", "1"]).unwrap()).collect();
    let mut cover: Vec<Vec<String>> = (0..contexts)
        .map(|_| {
            let k = rng.gen_range(1..=3.min(n));
            ids.choose_multiple(rng, k).cloned().collect()
        })
        .collect();
    for id in &ids {
        if !cover.iter().any(|c| c.contains(id)) {
            let c = cover.choose_mut(rng).unwrap();
            c.push(id.clone());
        }
    }
    let mut cs: Vec<Context> = cover.into_iter().map(|c| Context::new(c).unwrap()).collect();
    cs.sort();
    cs.dedup();
    Scenario::new(ms, cs).unwrap()
}

/// Random labelings on a dichotomic scenario: each incidence independently
/// identity or swap.
pub fn random_bundle<R: Rng>(rng: &mut R, s: &Scenario) -> SampleBundle {
    let p = ctxkit_core::product_bundle(s);
    let labelings = s
        .cover()
        .iter()
        .map(|c| c.members().iter().map(|_| if rng.gen_bool(0.5) { vec![1, 0] } else { vec![0, 1] }).collect())
        .collect();
    SampleBundle::new(s.clone(), p.local_spaces().to_vec(), labelings).unwrap()
}

/// Every deterministic assignment of a scenario, by explicit odometer.
pub fn all_assignments(s: &Scenario) -> Vec<Vec<usize>> {
    let arity: Vec<usize> = s.measurements().iter().map(|m| m.arity()).collect();
    let mut out = vec![vec![]];
    for a in arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..a).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Assignments whose every context restriction has positive probability.
/// None existing proves the model is not a mixture of assignments.
pub fn support_compatible(m: &EmpiricalModel) -> Vec<Vec<usize>> {
    let s = m.scenario();
    all_assignments(s)
        .into_iter()
        .filter(|g| {
            m.contexts().all(|(c, t)| {
                let tuple: Vec<usize> = c.members().iter().map(|id| g[s.index_of(id).unwrap()]).collect();
                *t.weight(&tuple) > ratio(0, 1)
            })
        })
        .collect()
}
