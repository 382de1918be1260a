//! The subscenario order, induced and context-restricted subscenarios, and
//! extension checks along chains of scenarios.

use std::collections::BTreeSet;
use std::fmt;

use crate::decide::{check_extends, DecideOptions, ExtensionResult, ExtensionStatus};
use crate::error::{input, Error, Result};
use crate::model::EmpiricalModel;
use crate::scenario::{validate_scenario, Context, Scenario, Violation};

/// Proof that `sub ⪯ sup`: for each context of `sub`, the index of the first
/// context of `sup` (in canonical order) containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioOrder {
    pub sub: Scenario,
    pub sup: Scenario,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refusal {
    MissingMeasurement(String),
    OutcomeMismatch(String),
    UncontainedContext(Context),
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refusal::MissingMeasurement(m) => write!(f, "measurement `{m}` is absent from the larger scenario"),
            Refusal::OutcomeMismatch(m) => write!(f, "measurement `{m}` has different outcomes in the two scenarios"),
            Refusal::UncontainedContext(c) => write!(f, "context {c} is contained in no context of the larger scenario"),
        }
    }
}

pub fn is_subscenario(sub: &Scenario, sup: &Scenario) -> Result<ScenarioOrder, Refusal> {
    for m in sub.measurements() {
        match sup.measurement(m.id()) {
            None => return Err(Refusal::MissingMeasurement(m.id().to_string())),
            Some(n) if n != m => return Err(Refusal::OutcomeMismatch(m.id().to_string())),
            Some(_) => {}
        }
    }
    let witness = sub
        .cover()
        .iter()
        .map(|c| sup.cover().iter().position(|d| c.is_subset_of(d)).ok_or_else(|| Refusal::UncontainedContext(c.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScenarioOrder { sub: sub.clone(), sup: sup.clone(), witness })
}

/// An induced subscenario together with the restricted contexts dropped
/// because another restriction contains them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubscenario {
    pub scenario: Scenario,
    pub pruned: Vec<Context>,
}

/// Restricts every context of `sup` to `keep`, drops empty restrictions and
/// prunes restrictions contained in another so the cover is an antichain.
pub fn induced_subscenario<S: AsRef<str>>(sup: &Scenario, keep: &[S]) -> Result<InducedSubscenario> {
    if keep.is_empty() {
        return input("induced subscenario needs a nonempty measurement set");
    }
    let keep: BTreeSet<&str> = keep.iter().map(AsRef::as_ref).collect();
    let mut measurements = Vec::new();
    for id in &keep {
        measurements.push(sup.measurement(id).ok_or_else(|| Error::UnknownMeasurement(id.to_string()))?.clone());
    }
    let restricted: BTreeSet<Context> = sup
        .cover()
        .iter()
        .filter_map(|c| {
            let members: Vec<&String> = c.members().iter().filter(|m| keep.contains(m.as_str())).collect();
            (!members.is_empty()).then(|| Context::new(members.into_iter().cloned()).expect("nonempty, distinct"))
        })
        .collect();
    let (kept, pruned): (Vec<Context>, Vec<Context>) = restricted
        .iter()
        .cloned()
        .partition(|c| !restricted.iter().any(|d| d != c && c.is_subset_of(d)));
    Ok(InducedSubscenario { scenario: Scenario::new(measurements, kept)?, pruned })
}

/// Same measurements with a new cover, which must cover every measurement.
pub fn restrict_contexts(s: &Scenario, cover: Vec<Context>) -> Result<Scenario> {
    let out = Scenario::new(s.measurements().to_vec(), cover)?;
    let uncovered: Vec<String> = validate_scenario(&out, false)
        .into_iter()
        .filter_map(|v| match v {
            Violation::Uncovered(m) => Some(m),
            Violation::NonMaximal { .. } => None,
        })
        .collect();
    if !uncovered.is_empty() {
        return input(format!("restricted cover leaves measurements uncovered: {}", uncovered.join(", ")));
    }
    Ok(out)
}

/// Per-step extension results along a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceReport {
    pub steps: Vec<ExtensionResult>,
    /// Index of the first step where the model does not extend.
    pub failing_step: Option<usize>,
}

/// Checks extension of `m` to every scenario of `chain`.
///
/// The chain must start at a scenario above (or equal to) the model's own
/// and increase strictly from there on.
pub fn check_sequence(m: &EmpiricalModel, chain: &[Scenario], opts: DecideOptions) -> Result<SequenceReport> {
    let Some(first) = chain.first() else {
        return input("empty chain");
    };
    is_subscenario(m.scenario(), first).map_err(|r| Error::Input(format!("chain step 0: {r}")))?;
    for (k, w) in chain.windows(2).enumerate() {
        if w[0] == w[1] {
            return input(format!("chain steps {k} and {} are equal", k + 1));
        }
        is_subscenario(&w[0], &w[1]).map_err(|r| Error::Input(format!("chain step {}: {r}", k + 1)))?;
    }
    let steps = chain.iter().map(|s| check_extends(m, s, opts)).collect::<Result<Vec<_>>>()?;
    let failing_step = steps.iter().position(|r| r.status != ExtensionStatus::Extends);
    Ok(SequenceReport { steps, failing_step })
}
