//! Discrete sample bundles over a scenario.
//!
//! Every measurement carries a local value space with a reference bijection
//! onto its outcomes. Each (context, member) incidence carries its own
//! labeling bijection; an incidence whose labeling differs from the reference
//! is a twist. For dichotomic bundles the twists define a cochain on the
//! context/measurement incidence graph, whose cycle parities are the
//! holonomy.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use crate::decide::{check_size, DecideOptions};
use crate::error::{input, Error, Result};
use crate::lp::{Feasibility, LinearSystem};
use crate::model::{decode, encode, DeterministicAssignment, Distribution, EmpiricalModel};
use crate::rational::Rational;
use crate::scenario::{Context, Measurement, Scenario};

fn is_bijection(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}

/// Local values of one measurement and their reference outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalSpace {
    values: Vec<String>,
    reference: Vec<usize>,
}

impl LocalSpace {
    /// `reference[v]` is the outcome index carried by local value `v`.
    pub fn new(values: Vec<String>, reference: Vec<usize>) -> Result<Self> {
        let distinct: BTreeSet<&String> = values.iter().collect();
        if distinct.len() != values.len() || values.is_empty() {
            return input("local values must be nonempty and distinct");
        }
        if !is_bijection(&reference, values.len()) {
            return input("reference map is not a bijection");
        }
        Ok(LocalSpace { values, reference })
    }

    /// Local values named after the outcomes, mapped identically.
    pub fn identity(m: &Measurement) -> Self {
        LocalSpace { values: m.outcomes().to_vec(), reference: (0..m.arity()).collect() }
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn reference(&self) -> &[usize] {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SampleBundle {
    scenario: Scenario,
    local_spaces: Vec<LocalSpace>,
    /// `labelings[k][p][v]`: outcome index of local value `v` of the `p`-th
    /// member of context `k`.
    labelings: Vec<Vec<Vec<usize>>>,
}

impl SampleBundle {
    pub fn new(scenario: Scenario, local_spaces: Vec<LocalSpace>, labelings: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if local_spaces.len() != scenario.measurements().len() {
            return input("one local space per measurement is required");
        }
        for (m, l) in scenario.measurements().iter().zip(&local_spaces) {
            if l.len() != m.arity() {
                return input(format!("local space of `{}` has {} values for {} outcomes", m.id(), l.len(), m.arity()));
            }
        }
        if labelings.len() != scenario.cover().len() {
            return input("one labeling family per context is required");
        }
        for (c, fam) in scenario.cover().iter().zip(&labelings) {
            if fam.len() != c.len() {
                return input(format!("context {c} needs {} labelings", c.len()));
            }
            for (id, lab) in c.members().iter().zip(fam) {
                let n = scenario.measurement(id).expect("member").arity();
                if !is_bijection(lab, n) {
                    return input(format!("labeling `{}|{id}` is not a bijection", c.key()));
                }
            }
        }
        Ok(SampleBundle { scenario, local_spaces, labelings })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn local_spaces(&self) -> &[LocalSpace] {
        &self.local_spaces
    }

    pub fn local_space(&self, id: &str) -> Option<&LocalSpace> {
        self.scenario.index_of(id).map(|i| &self.local_spaces[i])
    }

    pub fn labelings(&self) -> &[Vec<Vec<usize>>] {
        &self.labelings
    }

    /// Labeling of measurement `id` inside context `ctx`.
    pub fn labeling(&self, ctx: &Context, id: &str) -> Option<&[usize]> {
        let k = self.scenario.context_index(ctx)?;
        let p = ctx.position(id)?;
        Some(&self.labelings[k][p])
    }

    fn incidences(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.scenario.cover().iter().enumerate().flat_map(move |(k, c)| {
            c.members().iter().enumerate().map(move |(p, id)| (k, p, self.scenario.index_of(id).expect("member")))
        })
    }

    fn is_twisted(&self, k: usize, p: usize, m: usize) -> bool {
        self.labelings[k][p] != self.local_spaces[m].reference
    }

    fn require_dichotomic(&self) -> Result<()> {
        match self.scenario.measurements().iter().find(|m| m.arity() != 2) {
            Some(m) => Err(Error::Unsupported(format!(
                "holonomy parity needs dichotomic measurements; `{}` has {} outcomes",
                m.id(),
                m.arity()
            ))),
            None => Ok(()),
        }
    }

    /// Local value tuple shape, in measurement order.
    pub fn base_shape(&self) -> Vec<usize> {
        self.local_spaces.iter().map(LocalSpace::len).collect()
    }
}

/// Every labeling equals its reference.
pub fn product_bundle(s: &Scenario) -> SampleBundle {
    let local_spaces = s.measurements().iter().map(LocalSpace::identity).collect();
    let labelings = s
        .cover()
        .iter()
        .map(|c| c.members().iter().map(|id| (0..s.measurement(id).expect("member").arity()).collect()).collect())
        .collect();
    SampleBundle { scenario: s.clone(), local_spaces, labelings }
}

fn swap_in(b: &mut SampleBundle, ctx: usize, member: &str) {
    let p = b.scenario.cover()[ctx].position(member).expect("member");
    b.labelings[ctx][p].reverse();
}

/// Three binary measurements `a ∈ {up, down}`, `b ∈ {0, 1}`, `c ∈ {g, r}` on
/// the triangle; in each of the contexts ab, bc, ca the first measurement
/// keeps its natural labeling and the second is inverted.
pub fn hollow_triangle_bundle() -> SampleBundle {
    let ms = vec![
        Measurement::new("a", ["up", "down"]).expect("labels"),
        Measurement::new("b", ["0", "1"]).expect("labels"),
        Measurement::new("c", ["g", "r"]).expect("labels"),
    ];
    let cover = [["a", "b"], ["b", "c"], ["c", "a"]].iter().map(|c| Context::new(*c).expect("context")).collect();
    let s = Scenario::new(ms, cover).expect("triangle");
    let mut b = product_bundle(&s);
    for (first, second) in [("a", "b"), ("b", "c"), ("c", "a")] {
        let k = s.context_index(&Context::new([first, second]).expect("context")).expect("cover");
        swap_in(&mut b, k, second);
    }
    b
}

/// Binary n-cycle (outcomes `0`, `1`) where each flipped `M_i` has the swap
/// labeling in its context `{M_{i-1}, M_i}` and the reference labeling in
/// `{M_i, M_{i+1}}`.
pub fn moebius_bundle(n: usize, flipped: &[usize]) -> Result<SampleBundle> {
    let s = crate::scenario::make_n_cycle(n, &["0", "1"])?;
    let mut b = product_bundle(&s);
    let flips: BTreeSet<usize> = flipped.iter().copied().collect();
    for &i in &flips {
        if i >= n {
            return input(format!("flip index {i} out of range for the {n}-cycle"));
        }
        let prev = format!("M{}", (i + n - 1) % n);
        let me = format!("M{i}");
        let k = s.context_index(&Context::new([prev, me.clone()])?).expect("cycle context");
        swap_in(&mut b, k, &me);
    }
    Ok(b)
}

/// Per-measurement local-value permutations, applied in every context
/// containing the measurement, plus whole-fibre flips of individual contexts
/// (dichotomic bundles only). Measurements without an entry are untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gauge {
    pub permutations: BTreeMap<String, Vec<usize>>,
    pub context_flips: BTreeSet<Context>,
}

impl Gauge {
    pub fn identity() -> Self {
        Gauge::default()
    }

    /// Swaps the two local values of one dichotomic measurement.
    pub fn flip(id: impl Into<String>) -> Self {
        Gauge { permutations: [(id.into(), vec![1, 0])].into(), context_flips: BTreeSet::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.context_flips.is_empty() && self.permutations.values().all(|p| p.iter().enumerate().all(|(i, &v)| i == v))
    }

    /// Pre-composes labelings: `L'(v) = L(π(v))`, with `π` further composed
    /// with the swap in flipped contexts.
    pub fn apply(&self, b: &SampleBundle) -> Result<SampleBundle> {
        let s = &b.scenario;
        for (id, p) in &self.permutations {
            let m = s.measurement(id).ok_or_else(|| Error::UnknownMeasurement(id.clone()))?;
            if !is_bijection(p, m.arity()) {
                return input(format!("gauge permutation for `{id}` is not a bijection"));
            }
        }
        for c in &self.context_flips {
            if s.context_index(c).is_none() {
                return input(format!("gauge flips unknown context {c}"));
            }
        }
        if !self.context_flips.is_empty() {
            b.require_dichotomic()?;
        }
        let mut out = b.clone();
        for (k, c) in s.cover().iter().enumerate() {
            let flip = self.context_flips.contains(c);
            for (p, id) in c.members().iter().enumerate() {
                let old = &b.labelings[k][p];
                let n = old.len();
                out.labelings[k][p] = (0..n)
                    .map(|v| {
                        let v = self.permutations.get(id).map_or(v, |perm| perm[v]);
                        old[if flip { n - 1 - v } else { v }]
                    })
                    .collect();
            }
        }
        Ok(out)
    }
}

/// One edge of the context-overlap multigraph: contexts `left < right` (cover
/// indices) sharing `measurement`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OverlapEdge {
    pub left: Context,
    pub right: Context,
    pub measurement: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisCycle {
    pub edges: Vec<OverlapEdge>,
    pub odd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistReport {
    pub twisted: Vec<(Context, String)>,
    pub cycles: Vec<BasisCycle>,
}

impl TwistReport {
    pub fn twist_count(&self) -> usize {
        self.twisted.len()
    }

    pub fn parities(&self) -> Vec<bool> {
        self.cycles.iter().map(|c| c.odd).collect()
    }

    pub fn all_even(&self) -> bool {
        self.cycles.iter().all(|c| !c.odd)
    }
}

/// Overlap multigraph edges `(i, j, measurement index)` in canonical order.
fn overlap_edges(s: &Scenario) -> Vec<(usize, usize, usize)> {
    let cover = s.cover();
    let mut out = Vec::new();
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            for id in cover[i].overlap(&cover[j]) {
                out.push((i, j, s.index_of(&id).expect("member")));
            }
        }
    }
    out
}

/// Fundamental cycles of the spanning forest obtained by scanning edges in
/// canonical order. Each cycle is a list of edge indices.
fn fundamental_cycles(vertices: usize, edges: &[(usize, usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut tree = vec![false; edges.len()];
    for (e, &(i, j, _)) in edges.iter().enumerate() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
            tree[e] = true;
        }
    }
    // root each tree at its smallest vertex
    let mut adj = vec![Vec::new(); vertices];
    for (e, &(i, j, _)) in edges.iter().enumerate() {
        if tree[e] {
            adj[i].push((j, e));
            adj[j].push((i, e));
        }
    }
    let mut up: Vec<Option<(usize, usize)>> = vec![None; vertices];
    let mut depth = vec![usize::MAX; vertices];
    for root in 0..vertices {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    up[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for (e, &(i, j, _)) in edges.iter().enumerate() {
        if tree[e] {
            continue;
        }
        let (mut a, mut b) = (i, j);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        while a != b {
            if depth[a] >= depth[b] {
                let (p, pe) = up[a].expect("non-root");
                left.push(pe);
                a = p;
            } else {
                let (p, pe) = up[b].expect("non-root");
                right.push(pe);
                b = p;
            }
        }
        let mut cycle = vec![e];
        cycle.extend(right.into_iter().rev());
        cycle.extend(left);
        // walk i -> ... -> j is left reversed; order is cosmetic, keep it stable
        cycles.push(cycle);
    }
    cycles
}

/// Lists twisted incidences and the twist parity of every fundamental cycle
/// of the context-overlap multigraph. Dichotomic bundles only.
pub fn twist_report(b: &SampleBundle) -> Result<TwistReport> {
    b.require_dichotomic()?;
    let s = &b.scenario;
    let cover = s.cover();
    let twisted = b
        .incidences()
        .filter(|&(k, p, m)| b.is_twisted(k, p, m))
        .map(|(k, p, _)| (cover[k].clone(), cover[k].members()[p].clone()))
        .collect();
    let edges = overlap_edges(s);
    let twist_at = |k: usize, m: usize| {
        let p = cover[k].position(s.measurements()[m].id()).expect("member");
        b.is_twisted(k, p, m)
    };
    let cycles = fundamental_cycles(cover.len(), &edges)
        .into_iter()
        .map(|cyc| {
            let odd = cyc.iter().fold(false, |acc, &e| {
                let (i, j, m) = edges[e];
                acc ^ twist_at(i, m) ^ twist_at(j, m)
            });
            let edges = cyc
                .iter()
                .map(|&e| {
                    let (i, j, m) = edges[e];
                    OverlapEdge {
                        left: cover[i].clone(),
                        right: cover[j].clone(),
                        measurement: s.measurements()[m].id().to_string(),
                    }
                })
                .collect();
            BasisCycle { edges, odd }
        })
        .collect();
    Ok(TwistReport { twisted, cycles })
}

/// Decides whether a gauge turns every labeling into its reference, and
/// returns one when it exists. Dichotomic bundles only.
///
/// Writing the twist of incidence (C, M) as `t ∈ Z2`, a gauge exists iff
/// `t(C, M) = g(M) + h(C)` for some per-measurement flips `g` and per-context
/// flips `h`; these are found by propagation along a spanning forest of the
/// incidence graph, contexts visited in canonical order.
pub fn is_trivializable(b: &SampleBundle) -> Result<(bool, Option<Gauge>)> {
    b.require_dichotomic()?;
    let s = &b.scenario;
    let cover = s.cover();
    let nm = s.measurements().len();
    let mut twist = BTreeMap::new();
    let mut members_of: Vec<Vec<usize>> = vec![Vec::new(); cover.len()];
    let mut contexts_of: Vec<Vec<usize>> = vec![Vec::new(); nm];
    for (k, p, m) in b.incidences() {
        twist.insert((k, m), b.is_twisted(k, p, m));
        members_of[k].push(m);
        contexts_of[m].push(k);
    }
    let mut g: Vec<Option<bool>> = vec![None; nm];
    let mut h: Vec<Option<bool>> = vec![None; cover.len()];
    enum Node {
        Ctx(usize),
        Meas(usize),
    }
    for root in 0..cover.len() {
        if h[root].is_some() {
            continue;
        }
        h[root] = Some(false);
        let mut queue = VecDeque::from([Node::Ctx(root)]);
        while let Some(node) = queue.pop_front() {
            match node {
                Node::Ctx(k) => {
                    for &m in &members_of[k] {
                        if g[m].is_none() {
                            g[m] = Some(twist[&(k, m)] ^ h[k].unwrap());
                            queue.push_back(Node::Meas(m));
                        }
                    }
                }
                Node::Meas(m) => {
                    for &k in &contexts_of[m] {
                        if h[k].is_none() {
                            h[k] = Some(twist[&(k, m)] ^ g[m].unwrap());
                            queue.push_back(Node::Ctx(k));
                        }
                    }
                }
            }
        }
    }
    let consistent = twist.iter().all(|(&(k, m), &t)| t == (g[m].unwrap_or(false) ^ h[k].unwrap_or(false)));
    if !consistent {
        return Ok((false, None));
    }
    let gauge = Gauge {
        permutations: (0..nm)
            .filter(|&m| g[m] == Some(true))
            .map(|m| (s.measurements()[m].id().to_string(), vec![1, 0]))
            .collect(),
        context_flips: (0..cover.len()).filter(|&k| h[k] == Some(true)).map(|k| cover[k].clone()).collect(),
    };
    // the gauge must make every labeling the reference: L ∘ s^(g+h) = R ∘ s^(t+g+h)
    debug_assert!({
        let fixed = gauge.apply(b).expect("valid gauge");
        let ok = fixed.incidences().all(|(k, p, m)| !fixed.is_twisted(k, p, m));
        ok
    });
    Ok((true, Some(gauge)))
}

/// A choice of local value per measurement whose labels agree across all
/// contexts containing the measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    /// Local value per measurement id.
    pub local: BTreeMap<String, String>,
    /// The induced global outcome assignment.
    pub assignment: DeterministicAssignment,
}

pub fn enumerate_sections(b: &SampleBundle, opts: DecideOptions) -> Result<Vec<Section>> {
    let s = &b.scenario;
    check_size(&b.base_shape(), opts.limit)?;
    // Constraints are per measurement: admissible values and their label.
    let admissible: Vec<Vec<(usize, usize)>> = s
        .measurements()
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let labs: Vec<&[usize]> =
                s.contexts_of(m.id()).into_iter().map(|k| b.labeling(&s.cover()[k], m.id()).expect("member")).collect();
            (0..m.arity())
                .filter_map(|v| match labs.split_first() {
                    None => Some((v, b.local_spaces[mi].reference[v])),
                    Some((first, rest)) => rest.iter().all(|l| l[v] == first[v]).then_some((v, first[v])),
                })
                .collect()
        })
        .collect();
    let shape: Vec<usize> = admissible.iter().map(Vec::len).collect();
    if shape.contains(&0) {
        return Ok(Vec::new());
    }
    let total: usize = shape.iter().product();
    let out = (0..total)
        .map(|i| {
            let pick = decode(i, &shape);
            let mut local = BTreeMap::new();
            let mut outcomes = Vec::with_capacity(pick.len());
            for (mi, (&c, adm)) in pick.iter().zip(&admissible).enumerate() {
                let (v, o) = adm[c];
                let m = &s.measurements()[mi];
                local.insert(m.id().to_string(), b.local_spaces[mi].values[v].clone());
                outcomes.push(o);
            }
            Section { local, assignment: DeterministicAssignment::from_indices(s, &outcomes) }
        })
        .collect();
    Ok(out)
}

/// Transports a base distribution over local value tuples (members = all
/// measurement ids, shape = local space sizes) through each context's
/// labelings. The result may be disturbing.
pub fn pushforward(b: &SampleBundle, base: &Distribution) -> Result<EmpiricalModel> {
    let s = &b.scenario;
    if base.members().iter().map(String::as_str).ne(s.ids()) || base.shape() != b.base_shape().as_slice() {
        return input("base distribution must range over all local spaces in measurement order");
    }
    let mut tables = Vec::with_capacity(s.cover().len());
    for (k, c) in s.cover().iter().enumerate() {
        let pos = s.positions(c)?;
        let shape = s.shape(c)?;
        let entries = base.support().map(|(v, w)| {
            let t: Vec<usize> = pos.iter().enumerate().map(|(p, &mi)| b.labelings[k][p][v[mi]]).collect();
            (t, w.clone())
        });
        tables.push(Distribution::from_entries(c.members().to_vec(), shape, entries)?);
    }
    EmpiricalModel::new(s.clone(), tables)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePolytopeResult {
    /// A base whose pushforward satisfies the marginal condition.
    pub base: Option<Distribution>,
    /// Farkas vector when no such base exists.
    pub dual: Option<Vec<Rational>>,
}

/// Linear system for bases whose pushforward is nondisturbing: one column per
/// local value tuple, a normalization row, and one agreement row per
/// (overlapping context pair, overlap outcome tuple).
pub fn base_polytope_system(b: &SampleBundle, opts: DecideOptions) -> Result<LinearSystem> {
    let s = &b.scenario;
    let shape = b.base_shape();
    let total = check_size(&shape, opts.limit)?;
    let one = Rational::from_integer(1.into());
    let mut sys = LinearSystem::new(total);
    sys.push_sparse((0..total).map(|c| (c, one.clone())), one.clone());
    let cover = s.cover();
    let tuples: Vec<Vec<usize>> = (0..total).map(|i| decode(i, &shape)).collect();
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let overlap = cover[i].overlap(&cover[j]);
            if overlap.is_empty() {
                continue;
            }
            let ov_shape: Vec<usize> = overlap.iter().map(|id| s.measurement(id).expect("member").arity()).collect();
            let size: usize = ov_shape.iter().product();
            let mut rows = vec![vec![Rational::zero(); total]; size];
            for (col, v) in tuples.iter().enumerate() {
                let label = |k: usize| -> Vec<usize> {
                    overlap
                        .iter()
                        .map(|id| {
                            let p = cover[k].position(id).expect("member");
                            b.labelings[k][p][v[s.index_of(id).expect("measurement")]]
                        })
                        .collect()
                };
                rows[encode(&label(i), &ov_shape)][col] += &one;
                rows[encode(&label(j), &ov_shape)][col] -= &one;
            }
            for r in rows {
                sys.push_row(r, Rational::zero());
            }
        }
    }
    Ok(sys)
}

pub fn nondisturbing_base_polytope(b: &SampleBundle, opts: DecideOptions) -> Result<BasePolytopeResult> {
    let sys = base_polytope_system(b, opts)?;
    Ok(match sys.solve() {
        Feasibility::Feasible(x) => BasePolytopeResult {
            base: Some(Distribution::new(b.scenario.ids().map(str::to_string).collect(), b.base_shape(), x)?),
            dual: None,
        },
        Feasibility::Infeasible(y) => BasePolytopeResult { base: None, dual: Some(y) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hollow_triangle_labelings() {
        let b = hollow_triangle_bundle();
        let ab = Context::new(["a", "b"]).unwrap();
        let bc = Context::new(["b", "c"]).unwrap();
        // local 1 of b carries outcome 0 in context ab, local 0 carries 0 in bc
        assert_eq!(b.labeling(&ab, "b").unwrap()[1], 0);
        assert_eq!(b.labeling(&bc, "b").unwrap()[0], 0);
        let r = twist_report(&b).unwrap();
        let twisted: Vec<(String, String)> = r.twisted.iter().map(|(c, m)| (c.key(), m.clone())).collect();
        assert_eq!(
            twisted,
            vec![("a,b".into(), "b".into()), ("a,c".into(), "a".into()), ("b,c".into(), "c".into())]
        );
        assert_eq!(r.parities(), vec![true]);
        assert_eq!(is_trivializable(&b).unwrap(), (false, None));
    }

    #[test]
    fn product_bundle_is_untwisted() {
        let s = crate::scenario::make_n_cycle(5, &["0", "1"]).unwrap();
        let b = product_bundle(&s);
        assert_eq!(b.labelings().iter().map(Vec::len).sum::<usize>(), 10);
        let r = twist_report(&b).unwrap();
        assert_eq!(r.twist_count(), 0);
        assert!(r.all_even());
        let (ok, g) = is_trivializable(&b).unwrap();
        assert!(ok && g.unwrap().is_identity());
    }

    #[test]
    fn flipped_variable_is_removable() {
        let t = hollow_triangle_bundle();
        let p = product_bundle(t.scenario());
        let flipped = Gauge::flip("b").apply(&p).unwrap();
        let r = twist_report(&flipped).unwrap();
        assert_eq!(r.twist_count(), 2);
        assert!(r.all_even());
        let (ok, g) = is_trivializable(&flipped).unwrap();
        assert!(ok);
        let g = g.unwrap();
        assert_eq!(g, Gauge::flip("b"));
        assert_eq!(g.apply(&flipped).unwrap(), p);
    }

    #[test]
    fn flipping_a_triangle_variable_keeps_it_nontrivial() {
        let t = hollow_triangle_bundle();
        let f = Gauge::flip("a").apply(&t).unwrap();
        let r = twist_report(&f).unwrap();
        assert_eq!(r.twist_count(), 3);
        assert_eq!(r.parities(), vec![true]);
        assert!(!is_trivializable(&f).unwrap().0);
    }

    #[test]
    fn moebius_examples() {
        let m = moebius_bundle(5, &[0]).unwrap();
        let r = twist_report(&m).unwrap();
        assert_eq!((r.twist_count(), r.parities()), (1, vec![true]));
        assert_eq!(moebius_bundle(5, &[]).unwrap(), product_bundle(m.scenario()));
        let r = twist_report(&moebius_bundle(4, &[0, 2]).unwrap()).unwrap();
        assert_eq!((r.twist_count(), r.parities()), (2, vec![false]));
        assert!(moebius_bundle(4, &[4]).is_err());
    }

    #[test]
    fn non_dichotomic_is_unsupported() {
        let s = Scenario::new(
            vec![Measurement::new("x", ["0", "1", "2"]).unwrap(), Measurement::new("y", ["0", "1"]).unwrap()],
            vec![Context::new(["x", "y"]).unwrap()],
        )
        .unwrap();
        let b = product_bundle(&s);
        assert!(matches!(twist_report(&b), Err(Error::Unsupported(_))));
        assert!(matches!(is_trivializable(&b), Err(Error::Unsupported(_))));
        let mut g = Gauge::identity();
        g.context_flips.insert(s.cover()[0].clone());
        assert!(g.apply(&b).is_err());
        assert_eq!(enumerate_sections(&b, DecideOptions::default()).unwrap().len(), 6);
    }

    #[test]
    fn sections_examples() {
        let opts = DecideOptions::default();
        assert!(enumerate_sections(&hollow_triangle_bundle(), opts).unwrap().is_empty());
        assert!(enumerate_sections(&moebius_bundle(4, &[2]).unwrap(), opts).unwrap().is_empty());
        let p = product_bundle(&crate::scenario::make_n_cycle(4, &["0", "1"]).unwrap());
        assert_eq!(enumerate_sections(&p, opts).unwrap().len(), 16);
        assert!(matches!(enumerate_sections(&p, DecideOptions { limit: 8 }), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn pushforward_rejects_wrong_arity() {
        let b = hollow_triangle_bundle();
        let bad = Distribution::point_mass(vec!["a".into(), "b".into()], vec![2, 2], &[0, 0]).unwrap();
        assert!(pushforward(&b, &bad).is_err());
    }
}
