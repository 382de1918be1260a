//! Measurements, contexts and scenarios, plus the scenario's simplicial
//! complex and its first Betti numbers over GF(2).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{input, Error, Result};

/// Characters reserved by the JSON key encodings (`"a,b|up,0"`).
const RESERVED: [char; 2] = [',', '|'];

fn check_label(kind: &str, label: &str) -> Result<()> {
    if label.is_empty() {
        return input(format!("empty {kind}"));
    }
    if label.contains(RESERVED) {
        return input(format!("{kind} `{label}` contains a reserved character (',' or '|')"));
    }
    Ok(())
}

/// A measurement: an identifier and its ordered, distinct outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Measurement {
    id: String,
    outcomes: Vec<String>,
}

impl Measurement {
    pub fn new<S: Into<String>>(id: impl Into<String>, outcomes: impl IntoIterator<Item = S>) -> Result<Self> {
        let id = id.into();
        check_label("measurement id", &id)?;
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        if outcomes.is_empty() {
            return input(format!("measurement `{id}` has no outcomes"));
        }
        let mut seen = BTreeSet::new();
        for o in &outcomes {
            check_label("outcome label", o)?;
            if !seen.insert(o.as_str()) {
                return input(format!("measurement `{id}` repeats outcome `{o}`"));
            }
        }
        Ok(Measurement { id, outcomes })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn arity(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }
}

/// A nonempty set of measurement ids kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    members: Vec<String>,
}

impl Context {
    pub fn new<S: Into<String>>(members: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut members: Vec<String> = members.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return input("empty context");
        }
        members.sort();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return input(format!("context repeats measurement `{}`", w[0]));
        }
        Ok(Context { members })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.binary_search_by(|m| m.as_str().cmp(id)).is_ok()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.members.binary_search_by(|m| m.as_str().cmp(id)).ok()
    }

    pub fn is_subset_of(&self, other: &Context) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }

    /// Members shared with `other`, in canonical order.
    pub fn overlap(&self, other: &Context) -> Vec<String> {
        self.members.iter().filter(|m| other.contains(m)).cloned().collect()
    }

    /// Canonical key: member ids joined by commas.
    pub fn key(&self) -> String {
        self.members.join(",")
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// A finite measurement set together with a cover of contexts.
///
/// Measurements are stored sorted by id and the cover is sorted
/// lexicographically, so structural equality is equality of canonical forms.
/// Any cover is accepted at construction; maximality is checked by
/// [`validate_scenario`] in strict mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    measurements: Vec<Measurement>,
    cover: Vec<Context>,
}

impl Scenario {
    pub fn new(mut measurements: Vec<Measurement>, mut cover: Vec<Context>) -> Result<Self> {
        measurements.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = measurements.windows(2).find(|w| w[0].id == w[1].id) {
            return input(format!("duplicate measurement id `{}`", w[0].id));
        }
        for c in &cover {
            for m in c.members() {
                if measurements.binary_search_by(|x| x.id.as_str().cmp(m)).is_err() {
                    return Err(Error::UnknownMeasurement(m.clone()));
                }
            }
        }
        cover.sort();
        if let Some(w) = cover.windows(2).find(|w| w[0] == w[1]) {
            return input(format!("duplicate context {}", w[0]));
        }
        Ok(Scenario { measurements, cover })
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn cover(&self) -> &[Context] {
        &self.cover
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.measurements.binary_search_by(|m| m.id.as_str().cmp(id)).ok()
    }

    pub fn measurement(&self, id: &str) -> Option<&Measurement> {
        self.index_of(id).map(|i| &self.measurements[i])
    }

    pub fn context_index(&self, ctx: &Context) -> Option<usize> {
        self.cover.binary_search(ctx).ok()
    }

    /// Indices into [`Scenario::measurements`] of a context's members.
    pub fn positions(&self, ctx: &Context) -> Result<Vec<usize>> {
        ctx.members()
            .iter()
            .map(|m| self.index_of(m).ok_or_else(|| Error::UnknownMeasurement(m.clone())))
            .collect()
    }

    /// Outcome counts of a context's members, in member order.
    pub fn shape(&self, ctx: &Context) -> Result<Vec<usize>> {
        Ok(self.positions(ctx)?.into_iter().map(|i| self.measurements[i].arity()).collect())
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.measurements.iter().map(|m| m.id.as_str())
    }

    /// Contexts of the cover containing measurement `id`, as cover indices.
    pub fn contexts_of(&self, id: &str) -> Vec<usize> {
        self.cover.iter().enumerate().filter(|(_, c)| c.contains(id)).map(|(i, _)| i).collect()
    }
}

/// A structural problem found by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Uncovered(String),
    NonMaximal { context: Context, within: Context },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncovered(m) => write!(f, "uncovered: {m}"),
            Violation::NonMaximal { context, within } => write!(f, "non-maximal: {context} ⊆ {within}"),
        }
    }
}

/// Reports every uncovered measurement and, when `strict`, every context
/// contained in another context of the cover.
pub fn validate_scenario(s: &Scenario, strict: bool) -> Vec<Violation> {
    let mut out: Vec<Violation> = s
        .measurements
        .iter()
        .filter(|m| !s.cover.iter().any(|c| c.contains(&m.id)))
        .map(|m| Violation::Uncovered(m.id.clone()))
        .collect();
    if strict {
        for (i, c) in s.cover.iter().enumerate() {
            if let Some(d) = s.cover.iter().enumerate().find(|(j, d)| *j != i && c.is_subset_of(d)) {
                out.push(Violation::NonMaximal { context: c.clone(), within: d.1.clone() });
            }
        }
    }
    out
}

fn indexed_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("M{i}")).collect()
}

fn binary_like(ids: &[String], outcomes: &[String]) -> Result<Vec<Measurement>> {
    ids.iter().map(|id| Measurement::new(id.clone(), outcomes.iter().cloned())).collect()
}

/// The n-cycle: measurements `M0..M{n-1}` and contexts `{M_i, M_{i+1 mod n}}`.
pub fn make_n_cycle<S: AsRef<str>>(n: usize, outcomes: &[S]) -> Result<Scenario> {
    if n < 3 {
        return input(format!("n-cycle needs n >= 3, got {n}"));
    }
    cyclic_cover(n, 2, outcomes)
}

/// Cyclic neighbourhood cover: contexts `{M_i, ..., M_{i+width-1}}` (indices
/// mod n). Width 2 is the n-cycle; width n is the classical scenario.
pub fn cyclic_cover<S: AsRef<str>>(n: usize, width: usize, outcomes: &[S]) -> Result<Scenario> {
    if n == 0 || width == 0 || width > n {
        return input(format!("cyclic cover needs 1 <= width <= n, got n={n}, width={width}"));
    }
    let outcomes: Vec<String> = outcomes.iter().map(|o| o.as_ref().to_string()).collect();
    let ids = indexed_ids(n);
    let measurements = binary_like(&ids, &outcomes)?;
    let mut cover = BTreeSet::new();
    for i in 0..n {
        cover.insert(Context::new((0..width).map(|k| ids[(i + k) % n].clone()))?);
    }
    Scenario::new(measurements, cover.into_iter().collect())
}

/// Path scenario: measurements `M0..M{n-1}` and contexts `{M_i, M_{i+1}}`.
pub fn make_path<S: AsRef<str>>(n: usize, outcomes: &[S]) -> Result<Scenario> {
    if n == 0 {
        return input("path needs at least one measurement");
    }
    let outcomes: Vec<String> = outcomes.iter().map(|o| o.as_ref().to_string()).collect();
    let ids = indexed_ids(n);
    let measurements = binary_like(&ids, &outcomes)?;
    let cover = if n == 1 {
        vec![Context::new([ids[0].clone()])?]
    } else {
        (0..n - 1).map(|i| Context::new([ids[i].clone(), ids[i + 1].clone()])).collect::<Result<_>>()?
    };
    Scenario::new(measurements, cover)
}

/// The classical scenario over the same measurements: a single context.
pub fn make_classical(s: &Scenario) -> Scenario {
    let all = Context { members: s.measurements.iter().map(|m| m.id.clone()).collect() };
    Scenario { measurements: s.measurements.clone(), cover: if all.is_empty() { vec![] } else { vec![all] } }
}

/// Down-closure of the cover truncated at dimension 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioComplex {
    pub vertices: Vec<String>,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl ScenarioComplex {
    pub fn build(s: &Scenario) -> Self {
        let mut edges = BTreeSet::new();
        let mut triangles = BTreeSet::new();
        for c in &s.cover {
            // members are sorted, and so are measurement indices
            let idx: Vec<usize> = c.members().iter().filter_map(|m| s.index_of(m)).collect();
            for a in 0..idx.len() {
                for b in a + 1..idx.len() {
                    edges.insert([idx[a], idx[b]]);
                    for c in b + 1..idx.len() {
                        triangles.insert([idx[a], idx[b], idx[c]]);
                    }
                }
            }
        }
        ScenarioComplex {
            vertices: s.measurements.iter().map(|m| m.id.clone()).collect(),
            edges: edges.into_iter().collect(),
            triangles: triangles.into_iter().collect(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Boundary of edges: one row per edge over the vertex columns.
    pub fn boundary_1(&self) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(self.edges.len(), self.vertices.len());
        for (r, e) in self.edges.iter().enumerate() {
            m.set(r, e[0]);
            m.set(r, e[1]);
        }
        m
    }

    /// Boundary of triangles: one row per triangle over the edge columns.
    pub fn boundary_2(&self) -> Gf2Matrix {
        let edge_index: BTreeMap<[usize; 2], usize> = self.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut m = Gf2Matrix::zeros(self.triangles.len(), self.edges.len());
        for (r, t) in self.triangles.iter().enumerate() {
            for e in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                m.set(r, edge_index[&e]);
            }
        }
        m
    }
}

/// Dense bit matrix over the two-element field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix { cols, rows: vec![vec![0; cols.div_ceil(64)]; rows] }
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] |= 1 << (c % 64);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            rank += 1;
        }
        rank
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
}

pub fn betti_numbers(s: &Scenario) -> Betti {
    let k = ScenarioComplex::build(s);
    let r1 = k.boundary_1().rank();
    let r2 = k.boundary_2().rank();
    Betti { b0: k.vertices.len() - r1, b1: k.edges.len() - r1 - r2 }
}

pub fn is_acyclic(s: &Scenario) -> bool {
    betti_numbers(s).b1 == 0
}
