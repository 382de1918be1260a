//! Noncontextuality and extendability decisions by exact LP feasibility.
//!
//! Noncontextuality is decided in vertex form: one variable per deterministic
//! global assignment, one equality per (context, outcome tuple). A feasible
//! point is a hidden-variable model; an infeasible system yields a Farkas
//! vector, which is exactly a noncontextuality inequality violated by the
//! model.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lp::{Feasibility, LinearSystem};
use crate::model::{
    check_no_disturbance, decode, deterministic_model_indexed, encode, mix, DeterministicAssignment, Distribution,
    EmpiricalModel,
};
use crate::rational::Rational;
use crate::scenario::{Context, Scenario};
use crate::subscenario::is_subscenario;

/// Default cap on enumerated assignments (and on any single joint table).
pub const DEFAULT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub limit: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { limit: DEFAULT_LIMIT }
    }
}

pub(crate) fn check_size(shape: &[usize], limit: u64) -> Result<usize> {
    let card: BigUint = shape.iter().map(|&n| BigUint::from(n)).product();
    match card.to_u64() {
        Some(c) if c <= limit => Ok(c as usize),
        _ => Err(Error::TooLarge { cardinality: card, limit }),
    }
}

fn scenario_shape(s: &Scenario) -> Vec<usize> {
    s.measurements().iter().map(|m| m.arity()).collect()
}

/// All global assignments in lexicographic order (measurements by id, then
/// outcome order; the last measurement varies fastest).
pub fn enumerate_assignments(
    s: &Scenario,
    limit: u64,
) -> Result<impl Iterator<Item = DeterministicAssignment> + '_> {
    let shape = scenario_shape(s);
    let total = check_size(&shape, limit)?;
    Ok((0..total).map(move |i| DeterministicAssignment::from_indices(s, &decode(i, &shape))))
}

/// Weights over deterministic assignments reproducing a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenVariableModel {
    pub assignments: Vec<DeterministicAssignment>,
    pub weights: Vec<Rational>,
}

impl HiddenVariableModel {
    /// Mixes the deterministic models of the stored assignments.
    pub fn realize(&self, s: &Scenario) -> Result<EmpiricalModel> {
        if self.assignments.len() != self.weights.len() {
            return Err(Error::Input("hidden-variable model: weight count mismatch".into()));
        }
        let parts = self
            .assignments
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| Ok((w.clone(), deterministic_model_indexed(s, &a.indices(s)?)?)))
            .collect::<Result<Vec<_>>>()?;
        mix(&parts)
    }
}

/// A linear inequality `Σ coeff·p_C(t) <= bound` over model tables.
///
/// Keys are (context, outcome labels in the context's member order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityWitness {
    pub coefficients: BTreeMap<(Context, Vec<String>), Rational>,
    pub bound: Rational,
}

impl InfeasibilityWitness {
    fn lookup<'a>(m: &'a EmpiricalModel, ctx: &Context, labels: &[String]) -> Option<&'a Rational> {
        let table = m.table(ctx)?;
        let s = m.scenario();
        let tuple = ctx
            .members()
            .iter()
            .zip(labels)
            .map(|(id, l)| s.measurement(id)?.outcome_index(l))
            .collect::<Option<Vec<_>>>()?;
        (tuple.len() == table.shape().len()).then(|| table.weight(&tuple))
    }

    /// Left-hand side evaluated on a model; `None` if a key does not exist
    /// in the model's scenario.
    pub fn evaluate(&self, m: &EmpiricalModel) -> Option<Rational> {
        let mut acc = Rational::zero();
        for ((ctx, labels), c) in &self.coefficients {
            acc += c * Self::lookup(m, ctx, labels)?;
        }
        Some(acc)
    }

    /// Left-hand side evaluated on a deterministic assignment.
    pub fn evaluate_assignment(&self, a: &DeterministicAssignment) -> Rational {
        self.coefficients
            .iter()
            .filter(|((ctx, labels), _)| ctx.members().iter().zip(labels).all(|(id, l)| a.get(id) == Some(l)))
            .map(|(_, c)| c.clone())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Noncontextual,
    Contextual,
    Disturbing,
    TooLarge,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Noncontextual => "noncontextual",
            Status::Contextual => "contextual",
            Status::Disturbing => "disturbing",
            Status::TooLarge => "too-large",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    HiddenVariable(HiddenVariableModel),
    Witness(InfeasibilityWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Option<Certificate>,
}

impl Verdict {
    pub fn hv_model(&self) -> Option<&HiddenVariableModel> {
        match &self.certificate {
            Some(Certificate::HiddenVariable(h)) => Some(h),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&InfeasibilityWitness> {
        match &self.certificate {
            Some(Certificate::Witness(w)) => Some(w),
            _ => None,
        }
    }
}

/// Rows indexed by (context, tuple) over a model's tables, in cover order.
fn table_rows(m: &EmpiricalModel) -> Vec<(usize, Vec<usize>)> {
    m.tables()
        .iter()
        .enumerate()
        .flat_map(|(k, t)| crate::model::tuples(t.shape()).map(move |tuple| (k, tuple)))
        .collect()
}

fn witness_from_rows(
    m: &EmpiricalModel,
    rows: &[(usize, Vec<usize>)],
    y: &[Rational],
    bound: Rational,
) -> InfeasibilityWitness {
    let cover = m.scenario().cover();
    let coefficients = rows
        .iter()
        .zip(y)
        .filter(|(_, c)| !c.is_zero())
        .map(|((k, tuple), c)| ((cover[*k].clone(), m.labels(&cover[*k], tuple)), c.clone()))
        .collect();
    InfeasibilityWitness { coefficients, bound }
}

/// Decides whether a model is a mixture of deterministic assignments.
///
/// Disturbing models are reported without running the LP.
pub fn is_noncontextual(m: &EmpiricalModel, opts: DecideOptions) -> Result<Verdict> {
    if !check_no_disturbance(m).is_empty() {
        return Ok(Verdict { status: Status::Disturbing, certificate: None });
    }
    let s = m.scenario();
    let shape = scenario_shape(s);
    let total = check_size(&shape, opts.limit)?;
    let rows = table_rows(m);
    let positions: Vec<Vec<usize>> = s.cover().iter().map(|c| s.positions(c)).collect::<Result<_>>()?;

    let mut system = LinearSystem::new(total);
    let mut row_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (r, (k, tuple)) in rows.iter().enumerate() {
        row_of.insert((*k, encode(tuple, m.tables()[*k].shape())), r);
        system.push_row(vec![Rational::zero(); total], m.tables()[*k].weight(tuple).clone());
    }
    for col in 0..total {
        let g = decode(col, &shape);
        for (k, pos) in positions.iter().enumerate() {
            let t: Vec<usize> = pos.iter().map(|&p| g[p]).collect();
            let r = row_of[&(k, encode(&t, m.tables()[k].shape()))];
            system.set(r, col, Rational::one());
        }
    }

    match system.solve() {
        Feasibility::Feasible(x) => {
            let (assignments, weights) = x
                .into_iter()
                .enumerate()
                .filter(|(_, w)| w.is_positive())
                .map(|(col, w)| (DeterministicAssignment::from_indices(s, &decode(col, &shape)), w))
                .unzip();
            Ok(Verdict {
                status: Status::Noncontextual,
                certificate: Some(Certificate::HiddenVariable(HiddenVariableModel { assignments, weights })),
            })
        }
        Feasibility::Infeasible(y) => Ok(Verdict {
            status: Status::Contextual,
            // yᵀA <= 0 on every vertex and yᵀb = 1 on the model
            certificate: Some(Certificate::Witness(witness_from_rows(m, &rows, &y, Rational::zero()))),
        }),
    }
}

/// Re-checks a verdict's certificate against a model in exact arithmetic,
/// without solving any LP.
pub fn verify_certificate(m: &EmpiricalModel, v: &Verdict) -> bool {
    verify_certificate_with(m, v, DecideOptions::default())
}

pub fn verify_certificate_with(m: &EmpiricalModel, v: &Verdict, opts: DecideOptions) -> bool {
    match (&v.status, &v.certificate) {
        (Status::Noncontextual, Some(Certificate::HiddenVariable(h))) => {
            h.weights.iter().all(|w| !w.is_negative())
                && h.realize(m.scenario()).map(|r| r == *m).unwrap_or(false)
        }
        (Status::Contextual, Some(Certificate::Witness(w))) => {
            let Some(value) = w.evaluate(m) else {
                return false;
            };
            if value <= w.bound {
                return false;
            }
            match enumerate_assignments(m.scenario(), opts.limit) {
                Ok(mut all) => all.all(|a| w.evaluate_assignment(&a) <= w.bound),
                Err(_) => false,
            }
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtensionStatus {
    Extends,
    DoesNotExtend,
    Disturbing,
}

impl ExtensionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtensionStatus::Extends => "extends",
            ExtensionStatus::DoesNotExtend => "does-not-extend",
            ExtensionStatus::Disturbing => "disturbing",
        }
    }
}

/// Outcome of an extension check.
///
/// When the model extends, `extension` is a no-disturbance model on the
/// larger scenario that marginalizes to the input. Otherwise `witness` is an
/// inequality on the input tables satisfied by every extendable model and
/// violated (by margin one) by the input, and `dual` is the raw Farkas vector
/// over the rows of [`extension_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionResult {
    pub status: ExtensionStatus,
    pub extension: Option<EmpiricalModel>,
    pub witness: Option<InfeasibilityWitness>,
    pub dual: Option<Vec<Rational>>,
}

/// Row kinds of the extension LP, in emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionRow {
    Normalization { context: usize },
    Agreement { left: usize, right: usize, overlap: Vec<String>, tuple: Vec<usize> },
    Marginal { sub_context: usize, tuple: Vec<usize> },
}

/// The extension LP: one joint table per context of `sup` (columns laid out
/// context after context), normalization, pairwise no-disturbance, and
/// agreement with every table of `m` via the subscenario witness context.
pub fn extension_system(
    m: &EmpiricalModel,
    sup: &Scenario,
    opts: DecideOptions,
) -> Result<(LinearSystem, Vec<ExtensionRow>, Vec<usize>)> {
    let order = is_subscenario(m.scenario(), sup).map_err(|r| Error::NotSubscenario(r.to_string()))?;
    let cover = sup.cover();
    let shapes: Vec<Vec<usize>> = cover.iter().map(|c| sup.shape(c)).collect::<Result<_>>()?;
    let mut offsets = Vec::with_capacity(cover.len());
    let mut total = 0usize;
    for sh in &shapes {
        offsets.push(total);
        total = total
            .checked_add(check_size(sh, opts.limit)?)
            .ok_or_else(|| Error::Input("extension LP too wide".into()))?;
    }
    if total as u64 > opts.limit {
        return Err(Error::TooLarge { cardinality: BigUint::from(total), limit: opts.limit });
    }

    let mut sys = LinearSystem::new(total);
    let mut labels = Vec::new();
    let one = Rational::one;

    for k in 0..cover.len() {
        let size: usize = shapes[k].iter().product();
        sys.push_sparse((0..size).map(|i| (offsets[k] + i, one())), one());
        labels.push(ExtensionRow::Normalization { context: k });
    }

    // columns of context k whose restriction to `keep` equals each tuple
    let grouped = |k: usize, keep: &[String]| -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
        let pos: Vec<usize> = keep.iter().map(|id| cover[k].position(id).expect("member")).collect();
        let sub_shape: Vec<usize> = pos.iter().map(|&p| shapes[k][p]).collect();
        let mut groups = vec![Vec::new(); sub_shape.iter().product()];
        let size: usize = shapes[k].iter().product();
        for i in 0..size {
            let t = decode(i, &shapes[k]);
            let r: Vec<usize> = pos.iter().map(|&p| t[p]).collect();
            groups[encode(&r, &sub_shape)].push(offsets[k] + i);
        }
        Ok((sub_shape, groups))
    };

    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let overlap = cover[i].overlap(&cover[j]);
            if overlap.is_empty() {
                continue;
            }
            let (sub_shape, gi) = grouped(i, &overlap)?;
            let (_, gj) = grouped(j, &overlap)?;
            for (t, (ci, cj)) in gi.iter().zip(&gj).enumerate() {
                let entries = ci.iter().map(|&c| (c, one())).chain(cj.iter().map(|&c| (c, -one())));
                sys.push_sparse(entries, Rational::zero());
                labels.push(ExtensionRow::Agreement {
                    left: i,
                    right: j,
                    overlap: overlap.clone(),
                    tuple: decode(t, &sub_shape),
                });
            }
        }
    }

    for (q, (ctx, table)) in m.contexts().enumerate() {
        let k = order.witness[q];
        let (sub_shape, groups) = grouped(k, ctx.members())?;
        for (t, cols) in groups.iter().enumerate() {
            let tuple = decode(t, &sub_shape);
            sys.push_sparse(cols.iter().map(|&c| (c, one())), table.weight(&tuple).clone());
            labels.push(ExtensionRow::Marginal { sub_context: q, tuple });
        }
    }
    Ok((sys, labels, offsets))
}

/// Decides whether `m` extends to the larger scenario `sup`.
pub fn check_extends(m: &EmpiricalModel, sup: &Scenario, opts: DecideOptions) -> Result<ExtensionResult> {
    let (sys, rows, offsets) = extension_system(m, sup, opts)?;
    if !check_no_disturbance(m).is_empty() {
        return Ok(ExtensionResult { status: ExtensionStatus::Disturbing, extension: None, witness: None, dual: None });
    }
    match sys.solve() {
        Feasibility::Feasible(x) => {
            let tables = sup
                .cover()
                .iter()
                .zip(&offsets)
                .map(|(c, &off)| {
                    let shape = sup.shape(c)?;
                    let size: usize = shape.iter().product();
                    Distribution::new(c.members().to_vec(), shape, x[off..off + size].to_vec())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ExtensionResult {
                status: ExtensionStatus::Extends,
                extension: Some(EmpiricalModel::new(sup.clone(), tables)?),
                witness: None,
                dual: None,
            })
        }
        Feasibility::Infeasible(y) => {
            let mut bound = Rational::zero();
            let mut coefficients = BTreeMap::new();
            let cover = m.scenario().cover();
            for (row, c) in rows.iter().zip(&y) {
                match row {
                    ExtensionRow::Normalization { .. } => bound -= c,
                    ExtensionRow::Agreement { .. } => {}
                    ExtensionRow::Marginal { sub_context, tuple } if !c.is_zero() => {
                        let ctx = &cover[*sub_context];
                        coefficients.insert((ctx.clone(), m.labels(ctx, tuple)), c.clone());
                    }
                    ExtensionRow::Marginal { .. } => {}
                }
            }
            Ok(ExtensionResult {
                status: ExtensionStatus::DoesNotExtend,
                extension: None,
                witness: Some(InfeasibilityWitness { coefficients, bound }),
                dual: Some(y),
            })
        }
    }
}

/// Independent check of an extension result: the extension must be a
/// no-disturbance model on `sup` reproducing `m`; a refusal must carry a
/// Farkas vector for the extension system whose induced inequality separates
/// `m`.
pub fn verify_extension(m: &EmpiricalModel, sup: &Scenario, r: &ExtensionResult, opts: DecideOptions) -> bool {
    match r.status {
        ExtensionStatus::Extends => {
            let Some(ext) = &r.extension else {
                return false;
            };
            ext.scenario() == sup
                && check_no_disturbance(ext).is_empty()
                && m.contexts().all(|(ctx, table)| {
                    sup.cover()
                        .iter()
                        .zip(ext.tables())
                        .filter(|(c, _)| ctx.is_subset_of(c))
                        .all(|(_, t)| t.marginalize(ctx.members()).map(|d| d == *table).unwrap_or(false))
                })
        }
        ExtensionStatus::DoesNotExtend => {
            let (Some(y), Some(w)) = (&r.dual, &r.witness) else {
                return false;
            };
            let Ok((sys, _, _)) = extension_system(m, sup, opts) else {
                return false;
            };
            sys.is_farkas_certificate(y) && w.evaluate(m).is_some_and(|v| v > w.bound)
        }
        ExtensionStatus::Disturbing => !check_no_disturbance(m).is_empty(),
    }
}
