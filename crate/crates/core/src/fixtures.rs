//! Built-in scenarios, models and bundles.

use serde_json::Value;

use crate::bundle::{hollow_triangle_bundle, moebius_bundle};
use crate::error::{input, Result};
use crate::json::{bundle_to_json, model_to_json, scenario_to_json};
use crate::model::{Distribution, EmpiricalModel};
use crate::rational::ratio;
use crate::scenario::{cyclic_cover, make_classical, make_n_cycle, make_path, Context};

pub const FIXTURE_NAMES: [&str; 8] = [
    "hollow-triangle",
    "sparable-model",
    "n-cycle",
    "moebius",
    "classical",
    "path",
    "odd-cycle-model",
    "cyclic-cover",
];

/// The anti-correlated model on the hollow triangle: in each context the
/// first measurement's natural outcome pairs with the second's inverted one.
///
/// `p_ab(up,1) = p_ab(down,0) = p_bc(0,r) = p_bc(1,g) = p_ca(g,down) =
/// p_ca(r,up) = 1/2`, all other entries zero.
pub fn sparable_model() -> EmpiricalModel {
    let s = hollow_triangle_bundle().scenario().clone();
    let half = ratio(1, 2);
    let table = |members: [&str; 2], cells: [[usize; 2]; 2]| {
        let ctx = Context::new(members).expect("context");
        Distribution::from_entries(
            ctx.members().to_vec(),
            vec![2, 2],
            cells.iter().map(|c| (c.to_vec(), half.clone())),
        )
        .expect("table")
    };
    // outcome indices: a = [up, down], b = [0, 1], c = [g, r]
    let tables = vec![
        table(["a", "b"], [[0, 1], [1, 0]]),
        // context ca stored as (a, c): (g, down) and (r, up)
        table(["a", "c"], [[1, 0], [0, 1]]),
        table(["b", "c"], [[0, 1], [1, 0]]),
    ];
    EmpiricalModel::new(s, tables).expect("model")
}

/// Base distribution with weight 1/2 on local tuples (up, 0, g) and
/// (down, 1, r) of the hollow triangle bundle.
pub fn sparable_base() -> Distribution {
    Distribution::from_entries(
        vec!["a".into(), "b".into(), "c".into()],
        vec![2, 2, 2],
        [(vec![0, 0, 0], ratio(1, 2)), (vec![1, 1, 1], ratio(1, 2))],
    )
    .expect("base")
}

/// Binary n-cycle model with uniform marginals: every edge `{M_i, M_{i+1}}`
/// perfectly correlated except the closing edge `{M_0, M_{n-1}}`, which is
/// perfectly anti-correlated.
pub fn odd_cycle_model(n: usize) -> Result<EmpiricalModel> {
    let s = make_n_cycle(n, &["0", "1"])?;
    let closing = Context::new(["M0".to_string(), format!("M{}", n - 1)])?;
    let half = ratio(1, 2);
    let tables = s
        .cover()
        .iter()
        .map(|c| {
            let cells = if *c == closing { [[0, 1], [1, 0]] } else { [[0, 0], [1, 1]] };
            Distribution::from_entries(c.members().to_vec(), vec![2, 2], cells.iter().map(|t| (t.to_vec(), half.clone())))
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalModel::new(s, tables)
}

/// Parameters for [`gen_fixture`]; unused fields are ignored per family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureParams {
    pub n: usize,
    pub outcomes: Vec<String>,
    pub flips: Vec<usize>,
    pub width: usize,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { n: 5, outcomes: vec!["0".into(), "1".into()], flips: Vec::new(), width: 3 }
    }
}

/// Builds a named fixture as a canonical JSON document.
pub fn gen_fixture(name: &str, p: &FixtureParams) -> Result<Value> {
    Ok(match name {
        "hollow-triangle" => bundle_to_json(&hollow_triangle_bundle()),
        "sparable-model" => model_to_json(&sparable_model()),
        "n-cycle" => scenario_to_json(&make_n_cycle(p.n, &p.outcomes)?),
        "moebius" => bundle_to_json(&moebius_bundle(p.n, &p.flips)?),
        "classical" => scenario_to_json(&make_classical(&make_path(p.n, &p.outcomes)?)),
        "path" => scenario_to_json(&make_path(p.n, &p.outcomes)?),
        "odd-cycle-model" => {
            if p.n < 3 {
                return input("odd-cycle-model needs n >= 3");
            }
            model_to_json(&odd_cycle_model(p.n)?)
        }
        "cyclic-cover" => scenario_to_json(&cyclic_cover(p.n, p.width, &p.outcomes)?),
        other => return input(format!("unknown fixture `{other}` (known: {})", FIXTURE_NAMES.join(", "))),
    })
}
