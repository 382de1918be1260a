//! JSON documents: scenarios, models, bundles, base distributions, and the
//! reports emitted by the command-line tool.
//!
//! Output is canonical: object keys sorted, rationals as lowest-terms
//! strings, measurements and contexts in canonical order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bundle::{BasePolytopeResult, LocalSpace, SampleBundle, Section, TwistReport};
use crate::decide::{ExtensionResult, HiddenVariableModel, InfeasibilityWitness, Verdict};
use crate::error::{Error, Result};
use crate::model::{DisturbanceViolation, Distribution, EmpiricalModel};
use crate::rational::{format_rational, parse_rational};
use crate::scenario::{Betti, Context, Measurement, Scenario, Violation};
use crate::subscenario::SequenceReport;

fn err(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

/// Pretty-printed canonical text with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn incidence_key(ctx: &Context, id: &str) -> String {
    format!("{}|{id}", ctx.key())
}

pub fn cell_key(ctx: &Context, labels: &[String]) -> String {
    format!("{}|{}", ctx.key(), labels.join(","))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurementDoc {
    id: String,
    outcomes: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    measurements: Vec<MeasurementDoc>,
    contexts: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScenarioRef {
    Inline(ScenarioDoc),
    File(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    scenario: ScenarioRef,
    tables: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalSpaceDoc {
    values: Vec<String>,
    reference: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleDoc {
    scenario: ScenarioRef,
    #[serde(default)]
    local_spaces: BTreeMap<String, LocalSpaceDoc>,
    #[serde(default)]
    labelings: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseDoc {
    weights: BTreeMap<String, String>,
}

fn scenario_from_doc(doc: ScenarioDoc) -> Result<Scenario> {
    let ms = doc
        .measurements
        .into_iter()
        .map(|m| Measurement::new(m.id, m.outcomes))
        .collect::<Result<Vec<_>>>()?;
    let cs = doc.contexts.into_iter().map(Context::new).collect::<Result<Vec<_>>>()?;
    Scenario::new(ms, cs)
}

fn resolve(r: ScenarioRef, base_dir: Option<&Path>) -> Result<Scenario> {
    match r {
        ScenarioRef::Inline(doc) => scenario_from_doc(doc),
        ScenarioRef::File(p) => {
            let path = base_dir.map_or_else(|| PathBuf::from(&p), |d| d.join(&p));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| err(format!("cannot read scenario file `{}`: {e}", path.display())))?;
            parse_scenario(&text)
        }
    }
}

/// Parses a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    scenario_from_doc(serde_json::from_str(text)?)
}

/// Accepts a scenario document or any document with a `scenario` member.
pub fn parse_any_scenario(text: &str, base_dir: Option<&Path>) -> Result<Scenario> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("scenario") {
        Some(inner) => resolve(ScenarioRef::deserialize(inner.clone())?, base_dir),
        None => scenario_from_doc(ScenarioDoc::deserialize(v)?),
    }
}

pub fn scenario_to_json(s: &Scenario) -> Value {
    json!({
        "measurements": s.measurements().iter().map(|m| json!({"id": m.id(), "outcomes": m.outcomes()})).collect::<Vec<_>>(),
        "contexts": s.cover().iter().map(|c| c.members().to_vec()).collect::<Vec<_>>(),
    })
}

fn tuple_from_key(s: &Scenario, members: &[String], key: &str, what: &str) -> Result<Vec<usize>> {
    let labels: Vec<&str> = key.split(',').collect();
    if labels.len() != members.len() {
        return Err(err(format!("{what}: key `{key}` needs {} labels", members.len())));
    }
    members
        .iter()
        .zip(labels)
        .map(|(id, l)| {
            s.measurement(id)
                .and_then(|m| m.outcome_index(l))
                .ok_or_else(|| err(format!("{what}: key `{key}`: `{l}` is not an outcome of `{id}`")))
        })
        .collect()
}

/// Parses a model document; a string `scenario` is a path relative to
/// `base_dir`. Every context needs a table; absent tuples weigh zero.
pub fn parse_model(text: &str, base_dir: Option<&Path>) -> Result<EmpiricalModel> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    let s = resolve(doc.scenario, base_dir)?;
    let mut tables = doc.tables;
    let mut out = Vec::with_capacity(s.cover().len());
    for c in s.cover() {
        let key = c.key();
        let entries = tables
            .remove(&key)
            .ok_or_else(|| err(format!("incomplete model: no table for context `{key}`")))?;
        let parsed = entries
            .iter()
            .map(|(k, w)| {
                let what = format!("table `{key}`");
                let w = parse_rational(w).map_err(|e| err(format!("{what}, entry `{k}`: {e}")))?;
                Ok((tuple_from_key(&s, c.members(), k, &what)?, w))
            })
            .collect::<Result<Vec<_>>>()?;
        let d = Distribution::from_entries(c.members().to_vec(), s.shape(c)?, parsed)
            .map_err(|e| err(format!("table `{key}`: {e}")))?;
        out.push(d);
    }
    if let Some(extra) = tables.keys().next() {
        return Err(err(format!("table `{extra}` does not name a context in canonical order")));
    }
    EmpiricalModel::new(s, out)
}

fn table_to_json(m: &EmpiricalModel, ctx: &Context, d: &Distribution) -> Value {
    let obj: Map<String, Value> = d
        .support()
        .map(|(t, w)| (m.labels(ctx, &t).join(","), Value::String(format_rational(w))))
        .collect();
    Value::Object(obj)
}

/// Model document with the scenario inline; zero entries are omitted.
pub fn model_to_json(m: &EmpiricalModel) -> Value {
    let tables: Map<String, Value> = m.contexts().map(|(c, d)| (c.key(), table_to_json(m, c, d))).collect();
    json!({"scenario": scenario_to_json(m.scenario()), "tables": tables})
}

pub fn parse_bundle(text: &str, base_dir: Option<&Path>) -> Result<SampleBundle> {
    let doc: BundleDoc = serde_json::from_str(text)?;
    let s = resolve(doc.scenario, base_dir)?;
    let mut spaces_doc = doc.local_spaces;
    let mut spaces = Vec::with_capacity(s.measurements().len());
    for m in s.measurements() {
        let space = match spaces_doc.remove(m.id()) {
            None => LocalSpace::identity(m),
            Some(ls) => {
                let mut reference = Vec::with_capacity(ls.values.len());
                for v in &ls.values {
                    let o = ls
                        .reference
                        .get(v)
                        .ok_or_else(|| err(format!("local space `{}`: no reference for `{v}`", m.id())))?;
                    reference.push(m.outcome_index(o).ok_or_else(|| {
                        err(format!("local space `{}`: `{o}` is not an outcome", m.id()))
                    })?);
                }
                if ls.reference.len() != ls.values.len() {
                    return Err(err(format!("local space `{}`: reference names unknown values", m.id())));
                }
                LocalSpace::new(ls.values, reference).map_err(|e| err(format!("local space `{}`: {e}", m.id())))?
            }
        };
        spaces.push(space);
    }
    if let Some(extra) = spaces_doc.keys().next() {
        return Err(Error::UnknownMeasurement(extra.clone()));
    }
    let mut lab_doc = doc.labelings;
    let mut labelings = Vec::with_capacity(s.cover().len());
    for c in s.cover() {
        let mut fam = Vec::with_capacity(c.len());
        for id in c.members() {
            let key = incidence_key(c, id);
            let space = &spaces[s.index_of(id).expect("member")];
            let m = s.measurement(id).expect("member");
            let lab = match lab_doc.remove(&key) {
                None => space.reference().to_vec(),
                Some(map) => {
                    if map.len() != space.len() {
                        return Err(err(format!("labeling `{key}` must map every local value")));
                    }
                    space
                        .values()
                        .iter()
                        .map(|v| {
                            let o = map.get(v).ok_or_else(|| err(format!("labeling `{key}`: no entry for `{v}`")))?;
                            m.outcome_index(o)
                                .ok_or_else(|| err(format!("labeling `{key}`: `{o}` is not an outcome of `{id}`")))
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            fam.push(lab);
        }
        labelings.push(fam);
    }
    if let Some(extra) = lab_doc.keys().next() {
        return Err(err(format!("labeling `{extra}` does not name a (context, member) incidence")));
    }
    SampleBundle::new(s, spaces, labelings)
}

pub fn bundle_to_json(b: &SampleBundle) -> Value {
    let s = b.scenario();
    let spaces: Map<String, Value> = s
        .measurements()
        .iter()
        .zip(b.local_spaces())
        .map(|(m, l)| {
            let reference: Map<String, Value> = l
                .values()
                .iter()
                .zip(l.reference())
                .map(|(v, &o)| (v.clone(), Value::String(m.outcomes()[o].clone())))
                .collect();
            (m.id().to_string(), json!({"values": l.values(), "reference": reference}))
        })
        .collect();
    let mut labelings = Map::new();
    for (c, fam) in s.cover().iter().zip(b.labelings()) {
        for (id, lab) in c.members().iter().zip(fam) {
            let m = s.measurement(id).expect("member");
            let l = b.local_space(id).expect("member");
            let map: Map<String, Value> = l
                .values()
                .iter()
                .zip(lab)
                .map(|(v, &o)| (v.clone(), Value::String(m.outcomes()[o].clone())))
                .collect();
            labelings.insert(incidence_key(c, id), Value::Object(map));
        }
    }
    json!({"scenario": scenario_to_json(s), "local_spaces": spaces, "labelings": labelings})
}

/// Base distribution keyed by local values in measurement order.
pub fn parse_base(text: &str, b: &SampleBundle) -> Result<Distribution> {
    let doc: BaseDoc = serde_json::from_str(text)?;
    let s = b.scenario();
    let entries = doc
        .weights
        .iter()
        .map(|(k, w)| {
            let values: Vec<&str> = k.split(',').collect();
            if values.len() != s.measurements().len() {
                return Err(err(format!("base key `{k}` needs {} local values", s.measurements().len())));
            }
            let tuple = values
                .iter()
                .zip(b.local_spaces())
                .zip(s.ids())
                .map(|((v, l), id)| l.index_of(v).ok_or_else(|| err(format!("base key `{k}`: `{v}` is not a local value of `{id}`"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((tuple, parse_rational(w).map_err(|e| err(format!("base entry `{k}`: {e}")))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::from_entries(s.ids().map(str::to_string).collect(), b.base_shape(), entries)
}

pub fn base_to_json(b: &SampleBundle, base: &Distribution) -> Value {
    let weights: Map<String, Value> = base
        .support()
        .map(|(t, w)| {
            let key: Vec<&str> = t.iter().zip(b.local_spaces()).map(|(&v, l)| l.values()[v].as_str()).collect();
            (key.join(","), Value::String(format_rational(w)))
        })
        .collect();
    json!({"weights": weights})
}

pub fn hv_model_to_json(h: &HiddenVariableModel) -> Value {
    json!({
        "assignments": h.assignments.iter().map(|a| json!(a.values())).collect::<Vec<_>>(),
        "weights": h.weights.iter().map(format_rational).collect::<Vec<_>>(),
    })
}

pub fn witness_to_json(w: &InfeasibilityWitness) -> Value {
    let coefficients: Map<String, Value> = w
        .coefficients
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((ctx, labels), c)| (cell_key(ctx, labels), Value::String(format_rational(c))))
        .collect();
    json!({"coefficients": coefficients, "bound": format_rational(&w.bound)})
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    let mut obj = Map::new();
    obj.insert("status".into(), Value::String(v.status.as_str().into()));
    if let Some(h) = v.hv_model() {
        obj.insert("hv_model".into(), hv_model_to_json(h));
    }
    if let Some(w) = v.witness() {
        obj.insert("witness".into(), witness_to_json(w));
    }
    Value::Object(obj)
}

fn marginal_to_json(s: &Scenario, d: &Distribution) -> Value {
    let obj: Map<String, Value> = d
        .support()
        .map(|(t, w)| {
            let labels: Vec<&str> = d
                .members()
                .iter()
                .zip(&t)
                .map(|(id, &o)| s.measurement(id).expect("member").outcomes()[o].as_str())
                .collect();
            (labels.join(","), Value::String(format_rational(w)))
        })
        .collect();
    Value::Object(obj)
}

pub fn disturbance_to_json(s: &Scenario, vs: &[DisturbanceViolation]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| {
                json!({
                    "contexts": [v.left.key(), v.right.key()],
                    "overlap": v.overlap,
                    "left": marginal_to_json(s, &v.left_marginal),
                    "right": marginal_to_json(s, &v.right_marginal),
                })
            })
            .collect(),
    )
}

pub fn violations_to_json(vs: &[Violation]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| match v {
                Violation::Uncovered(m) => json!({"kind": "uncovered", "measurement": m}),
                Violation::NonMaximal { context, within } => {
                    json!({"kind": "non-maximal", "context": context.key(), "within": within.key()})
                }
            })
            .collect(),
    )
}

pub fn betti_to_json(b: Betti) -> Value {
    json!({"b0": b.b0, "b1": b.b1})
}

pub fn twist_report_to_json(r: &TwistReport) -> Value {
    json!({
        "twisted": r.twisted.iter().map(|(c, m)| incidence_key(c, m)).collect::<Vec<_>>(),
        "twist_count": r.twist_count(),
        "cycles": r.cycles.iter().map(|c| json!({
            "edges": c.edges.iter().map(|e| json!({"left": e.left.key(), "right": e.right.key(), "measurement": e.measurement})).collect::<Vec<_>>(),
            "parity": if c.odd { "odd" } else { "even" },
        })).collect::<Vec<_>>(),
        "all_even": r.all_even(),
    })
}

pub fn gauge_to_json(g: &crate::bundle::Gauge, b: &SampleBundle) -> Value {
    let perms: Map<String, Value> = g
        .permutations
        .iter()
        .map(|(id, p)| {
            let l = b.local_space(id).expect("gauge validated against bundle");
            let map: Map<String, Value> =
                p.iter().enumerate().map(|(v, &w)| (l.values()[v].clone(), Value::String(l.values()[w].clone()))).collect();
            (id.clone(), Value::Object(map))
        })
        .collect();
    json!({
        "permutations": perms,
        "context_flips": g.context_flips.iter().map(Context::key).collect::<Vec<_>>(),
    })
}

pub fn sections_to_json(sections: &[Section]) -> Value {
    json!({
        "count": sections.len(),
        "sections": sections.iter().map(|s| json!({"local": s.local, "assignment": s.assignment.values()})).collect::<Vec<_>>(),
    })
}

pub fn extension_to_json(r: &ExtensionResult) -> Value {
    let mut obj = Map::new();
    obj.insert("status".into(), Value::String(r.status.as_str().into()));
    if let Some(e) = &r.extension {
        obj.insert("extension".into(), model_to_json(e));
    }
    if let Some(w) = &r.witness {
        obj.insert("witness".into(), witness_to_json(w));
    }
    Value::Object(obj)
}

pub fn sequence_to_json(r: &SequenceReport) -> Value {
    json!({
        "steps": r.steps.iter().enumerate().map(|(i, s)| json!({"index": i, "status": s.status.as_str()})).collect::<Vec<_>>(),
        "failing_step": r.failing_step,
    })
}

pub fn base_polytope_to_json(b: &SampleBundle, r: &BasePolytopeResult) -> Value {
    match &r.base {
        Some(base) => json!({"status": "feasible", "base": base_to_json(b, base)}),
        None => json!({"status": "infeasible"}),
    }
}
