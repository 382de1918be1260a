//! Exact probability tables per context and the operations on them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{input, Error, Result};
use crate::rational::{is_negative, Rational};
use crate::scenario::{Context, Scenario};

/// Mixed-radix index of `tuple` (last coordinate fastest).
pub(crate) fn encode(tuple: &[usize], shape: &[usize]) -> usize {
    tuple.iter().zip(shape).fold(0, |acc, (&t, &n)| acc * n + t)
}

pub(crate) fn decode(mut index: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for (slot, &n) in out.iter_mut().zip(shape).rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// Iterates every tuple of a mixed-radix shape in lexicographic order.
pub(crate) fn tuples(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = shape.iter().product();
    (0..total).map(move |i| decode(i, shape))
}

/// Dense probability table over the outcome tuples of an ordered member list.
///
/// Tuples are outcome indices in member order; weights are exact, nonnegative
/// and sum to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    members: Vec<String>,
    shape: Vec<usize>,
    weights: Vec<Rational>,
}

impl Distribution {
    pub fn new(members: Vec<String>, shape: Vec<usize>, weights: Vec<Rational>) -> Result<Self> {
        if members.len() != shape.len() {
            return input("distribution members and shape differ in length");
        }
        if shape.contains(&0) {
            return input("distribution has an empty outcome set");
        }
        let total: usize = shape.iter().product();
        if weights.len() != total {
            return input(format!("distribution expects {total} weights, got {}", weights.len()));
        }
        if let Some(w) = weights.iter().find(|w| is_negative(w)) {
            return input(format!("negative probability {w}"));
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return input(format!("probabilities over [{}] sum to {sum}, not 1", members.join(",")));
        }
        Ok(Distribution { members, shape, weights })
    }

    /// Builds a table from sparse entries; absent tuples weigh zero.
    pub fn from_entries(
        members: Vec<String>,
        shape: Vec<usize>,
        entries: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let total: usize = shape.iter().product();
        let mut weights = vec![Rational::zero(); total];
        for (t, w) in entries {
            if t.len() != shape.len() || t.iter().zip(&shape).any(|(a, n)| a >= n) {
                return input(format!("tuple {t:?} does not fit shape {shape:?}"));
            }
            weights[encode(&t, &shape)] += w;
        }
        Distribution::new(members, shape, weights)
    }

    pub fn point_mass(members: Vec<String>, shape: Vec<usize>, tuple: &[usize]) -> Result<Self> {
        Distribution::from_entries(members, shape, [(tuple.to_vec(), Rational::one())])
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, tuple: &[usize]) -> &Rational {
        &self.weights[encode(tuple, &self.shape)]
    }

    /// Tuples with nonzero weight, in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (decode(i, &self.shape), w))
    }

    /// Marginal on `keep`, a nonempty subset of the members. The result lists
    /// the kept members in this table's member order.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<Distribution> {
        if keep.is_empty() {
            return input("marginalize needs a nonempty keep set");
        }
        let mut positions = Vec::with_capacity(keep.len());
        for k in keep {
            let k = k.as_ref();
            match self.members.iter().position(|m| m == k) {
                Some(p) if !positions.contains(&p) => positions.push(p),
                Some(_) => return input(format!("keep repeats `{k}`")),
                None => return Err(Error::UnknownMeasurement(k.to_string())),
            }
        }
        positions.sort_unstable();
        Ok(self.marginalize_positions(&positions))
    }

    pub(crate) fn marginalize_positions(&self, positions: &[usize]) -> Distribution {
        let members: Vec<String> = positions.iter().map(|&p| self.members[p].clone()).collect();
        let shape: Vec<usize> = positions.iter().map(|&p| self.shape[p]).collect();
        let mut weights = vec![Rational::zero(); shape.iter().product()];
        for (i, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let t = decode(i, &self.shape);
            let reduced: Vec<usize> = positions.iter().map(|&p| t[p]).collect();
            weights[encode(&reduced, &shape)] += w;
        }
        Distribution { members, shape, weights }
    }
}

/// One table per cover context, aligned with [`Scenario::cover`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    tables: Vec<Distribution>,
}

impl EmpiricalModel {
    pub fn new(scenario: Scenario, tables: Vec<Distribution>) -> Result<Self> {
        if tables.len() != scenario.cover().len() {
            return input(format!(
                "model has {} tables for {} contexts",
                tables.len(),
                scenario.cover().len()
            ));
        }
        for (c, t) in scenario.cover().iter().zip(&tables) {
            if t.members() != c.members() {
                return input(format!("table over [{}] does not match context {c}", t.members().join(",")));
            }
            if t.shape() != scenario.shape(c)?.as_slice() {
                return input(format!("table for context {c} has the wrong outcome shape"));
            }
        }
        Ok(EmpiricalModel { scenario, tables })
    }

    /// Context marginals of one joint table over all measurements.
    pub fn from_joint(scenario: Scenario, joint: &Distribution) -> Result<Self> {
        let ids: Vec<&str> = scenario.ids().collect();
        if joint.members().iter().map(String::as_str).ne(ids.iter().copied()) {
            return input("joint table must range over every measurement in canonical order");
        }
        let tables = scenario
            .cover()
            .iter()
            .map(|c| joint.marginalize(c.members()))
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(scenario, tables)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tables(&self) -> &[Distribution] {
        &self.tables
    }

    pub fn table(&self, ctx: &Context) -> Option<&Distribution> {
        self.scenario.context_index(ctx).map(|i| &self.tables[i])
    }

    pub fn contexts(&self) -> impl Iterator<Item = (&Context, &Distribution)> {
        self.scenario.cover().iter().zip(&self.tables)
    }

    /// Outcome labels of a tuple in context `ctx`.
    pub fn labels(&self, ctx: &Context, tuple: &[usize]) -> Vec<String> {
        ctx.members()
            .iter()
            .zip(tuple)
            .map(|(m, &t)| self.scenario.measurement(m).expect("context member").outcomes()[t].clone())
            .collect()
    }
}

/// Two overlapping contexts whose marginals on the overlap differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisturbanceViolation {
    pub left: Context,
    pub right: Context,
    pub overlap: Vec<String>,
    pub left_marginal: Distribution,
    pub right_marginal: Distribution,
}

impl fmt::Display for DisturbanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "marginals of {} and {} differ on [{}]", self.left, self.right, self.overlap.join(","))
    }
}

/// Checks the marginal condition for every pair of overlapping contexts.
pub fn check_no_disturbance(m: &EmpiricalModel) -> Vec<DisturbanceViolation> {
    let cover = m.scenario.cover();
    let mut out = Vec::new();
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let overlap = cover[i].overlap(&cover[j]);
            if overlap.is_empty() {
                continue;
            }
            let l = m.tables[i].marginalize(&overlap).expect("overlap ⊆ context");
            let r = m.tables[j].marginalize(&overlap).expect("overlap ⊆ context");
            if l != r {
                out.push(DisturbanceViolation {
                    left: cover[i].clone(),
                    right: cover[j].clone(),
                    overlap,
                    left_marginal: l,
                    right_marginal: r,
                });
            }
        }
    }
    out
}

/// A single outcome for every measurement of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicAssignment {
    values: BTreeMap<String, String>,
}

impl DeterministicAssignment {
    pub fn new<K: Into<String>, V: Into<String>>(values: impl IntoIterator<Item = (K, V)>) -> Self {
        DeterministicAssignment { values: values.into_iter().map(|(k, v)| (k.into(), v.into())).collect() }
    }

    /// From outcome indices in the scenario's measurement order.
    pub fn from_indices(s: &Scenario, indices: &[usize]) -> Self {
        DeterministicAssignment {
            values: s
                .measurements()
                .iter()
                .zip(indices)
                .map(|(m, &i)| (m.id().to_string(), m.outcomes()[i].clone()))
                .collect(),
        }
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.values.get(id).map(String::as_str)
    }

    /// Outcome indices in measurement order; fails on a missing measurement
    /// or an unknown outcome.
    pub fn indices(&self, s: &Scenario) -> Result<Vec<usize>> {
        if let Some(extra) = self.values.keys().find(|k| s.index_of(k).is_none()) {
            return Err(Error::UnknownMeasurement(extra.clone()));
        }
        s.measurements()
            .iter()
            .map(|m| {
                let v = self
                    .values
                    .get(m.id())
                    .ok_or_else(|| Error::Input(format!("assignment misses measurement `{}`", m.id())))?;
                m.outcome_index(v).ok_or_else(|| Error::UnknownOutcome {
                    measurement: m.id().to_string(),
                    outcome: v.clone(),
                })
            })
            .collect()
    }
}

/// Point-mass tables obtained by restricting a total assignment to each context.
pub fn deterministic_model(s: &Scenario, a: &DeterministicAssignment) -> Result<EmpiricalModel> {
    let idx = a.indices(s)?;
    deterministic_model_indexed(s, &idx)
}

pub(crate) fn deterministic_model_indexed(s: &Scenario, idx: &[usize]) -> Result<EmpiricalModel> {
    let tables = s
        .cover()
        .iter()
        .map(|c| {
            let pos = s.positions(c)?;
            let tuple: Vec<usize> = pos.iter().map(|&p| idx[p]).collect();
            Distribution::point_mass(c.members().to_vec(), s.shape(c)?, &tuple)
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(s.clone(), tables)
}

/// Exact convex combination of models on one scenario.
pub fn mix(models: &[(Rational, EmpiricalModel)]) -> Result<EmpiricalModel> {
    let Some((_, first)) = models.first() else {
        return input("mix needs at least one model");
    };
    let s = first.scenario();
    if let Some((_, m)) = models.iter().find(|(_, m)| m.scenario() != s) {
        return input(format!(
            "mix: scenario mismatch ({} contexts vs {})",
            m.scenario().cover().len(),
            s.cover().len()
        ));
    }
    if let Some((w, _)) = models.iter().find(|(w, _)| is_negative(w)) {
        return input(format!("mix: negative weight {w}"));
    }
    let total: Rational = models.iter().map(|(w, _)| w).sum();
    if !total.is_one() {
        return input(format!("mix: weights sum to {total}, not 1"));
    }
    let tables = (0..s.cover().len())
        .map(|k| {
            let t0 = &first.tables[k];
            let mut acc = vec![Rational::zero(); t0.weights.len()];
            for (w, m) in models {
                for (a, x) in acc.iter_mut().zip(&m.tables[k].weights) {
                    *a += w * x;
                }
            }
            Distribution::new(t0.members.clone(), t0.shape.clone(), acc)
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(s.clone(), tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::scenario::{make_classical, make_n_cycle, Measurement};

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn marginalize_uniform_pair() {
        let d = Distribution::new(ids(&["x", "y"]), vec![2, 2], vec![ratio(1, 4); 4]).unwrap();
        let m = d.marginalize(&["x"]).unwrap();
        assert_eq!(m.weights(), &[ratio(1, 2), ratio(1, 2)]);
        assert!(matches!(d.marginalize(&["z"]), Err(Error::UnknownMeasurement(_))));
        assert!(d.marginalize::<&str>(&[]).is_err());
    }

    #[test]
    fn marginalize_point_projection() {
        let d = Distribution::point_mass(ids(&["a", "b", "c"]), vec![2, 2, 2], &[0, 1, 0]).unwrap();
        let m = d.marginalize(&["c", "a"]).unwrap();
        assert_eq!(m.members(), &ids(&["a", "c"]));
        assert_eq!(m, Distribution::point_mass(ids(&["a", "c"]), vec![2, 2], &[0, 0]).unwrap());
    }

    #[test]
    fn table_validation() {
        assert!(Distribution::new(ids(&["x"]), vec![2], vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Distribution::new(ids(&["x"]), vec![2], vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(Distribution::new(ids(&["x"]), vec![2], vec![ratio(1, 1)]).is_err());
    }

    #[test]
    fn deterministic_on_cycle() {
        let s = make_n_cycle(5, &["0", "1"]).unwrap();
        let a = DeterministicAssignment::new((0..5).map(|i| (format!("M{i}"), "0")));
        let m = deterministic_model(&s, &a).unwrap();
        assert!(m.tables().iter().all(|t| t.weight(&[0, 0]).is_one()));
        assert!(check_no_disturbance(&m).is_empty());
        let partial = DeterministicAssignment::new([("M0", "0")]);
        assert!(deterministic_model(&s, &partial).is_err());
        let bad = DeterministicAssignment::new((0..5).map(|i| (format!("M{i}"), "7")));
        assert!(matches!(deterministic_model(&s, &bad), Err(Error::UnknownOutcome { .. })));
    }

    #[test]
    fn deterministic_classical_single_table() {
        let s = make_classical(&make_n_cycle(3, &["0", "1"]).unwrap());
        let a = DeterministicAssignment::new([("M0", "1"), ("M1", "0"), ("M2", "1")]);
        let m = deterministic_model(&s, &a).unwrap();
        assert_eq!(m.tables().len(), 1);
        assert!(m.tables()[0].weight(&[1, 0, 1]).is_one());
    }

    #[test]
    fn mix_rules() {
        let s = make_n_cycle(3, &["0", "1"]).unwrap();
        let a = deterministic_model(&s, &DeterministicAssignment::from_indices(&s, &[0, 0, 0])).unwrap();
        let b = deterministic_model(&s, &DeterministicAssignment::from_indices(&s, &[1, 1, 1])).unwrap();
        assert_eq!(mix(&[(ratio(1, 1), a.clone())]).unwrap(), a);
        assert_eq!(mix(&[(ratio(1, 2), a.clone()), (ratio(1, 2), a.clone())]).unwrap(), a);
        let corr = mix(&[(ratio(1, 2), a.clone()), (ratio(1, 2), b.clone())]).unwrap();
        for t in corr.tables() {
            assert_eq!(t.weights(), &[ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(1, 2)]);
        }
        assert!(mix(&[(ratio(1, 3), a.clone()), (ratio(1, 3), b.clone())]).is_err());
        assert!(mix(&[(ratio(3, 2), a.clone()), (ratio(-1, 2), b)]).is_err());
        let other = make_n_cycle(4, &["0", "1"]).unwrap();
        let c = deterministic_model(&other, &DeterministicAssignment::from_indices(&other, &[0; 4])).unwrap();
        assert!(mix(&[(ratio(1, 2), a), (ratio(1, 2), c)]).is_err());
    }

    #[test]
    fn model_shape_mismatch_rejected() {
        let s = Scenario::new(
            vec![Measurement::new("a", ["0", "1"]).unwrap(), Measurement::new("b", ["0", "1", "2"]).unwrap()],
            vec![Context::new(["a", "b"]).unwrap()],
        )
        .unwrap();
        let wrong = Distribution::point_mass(ids(&["a", "b"]), vec![2, 2], &[0, 0]).unwrap();
        assert!(EmpiricalModel::new(s.clone(), vec![wrong]).is_err());
        assert!(EmpiricalModel::new(s, vec![]).is_err());
    }
}
