use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand};
use ctxkit_core::fixtures::{gen_fixture, FixtureParams, FIXTURE_NAMES};
use ctxkit_core::json::{self, to_canonical_string};
use ctxkit_core::{
    betti_numbers, check_extends, check_no_disturbance, check_sequence, enumerate_sections, is_noncontextual,
    is_trivializable, nondisturbing_base_polytope, pushforward, twist_report, validate_scenario, DecideOptions,
    EmpiricalModel, Error, ExtensionStatus, SampleBundle, Scenario, Status, DEFAULT_LIMIT,
};
use serde_json::{json, Value};

/// Contextuality toolkit: scenarios, empirical models, exact decisions and
/// sample bundles.
///
/// Exit codes: 0 valid/feasible/noncontextual, 1 violation/infeasible/
/// contextual/disturbing, 2 malformed input, unsupported or too large.
#[derive(Parser, Debug)]
#[command(name = "ctxkit", version)]
struct Cli {
    /// Cap on enumerated assignments, sections and LP sizes.
    #[arg(long, global = true, env = "CTXKIT_LIMIT", default_value_t = DEFAULT_LIMIT)]
    limit: u64,

    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the cover covers every measurement (and, with --strict,
    /// that every context is maximal).
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Check that overlapping contexts agree on their shared marginals.
    Nodisturbance {
        #[arg(long)]
        model: PathBuf,
    },
    /// Decide whether a model is a mixture of deterministic assignments.
    Noncontextual {
        #[arg(long)]
        model: PathBuf,
    },
    /// GF(2) Betti numbers b0 and b1 of the scenario complex.
    Homology {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Twisted incidences and basis-cycle parities of a bundle.
    BundleTwists {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Find a gauge that removes every twist, if one exists.
    BundleTrivialize {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Enumerate the global sections of a bundle.
    BundleSections {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Push a base distribution through a bundle; without --base, search for
    /// a base whose pushforward is nondisturbing.
    Pushforward {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Decide whether a model extends to a larger scenario.
    Extend {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "super")]
        sup: PathBuf,
    },
    /// Check extension along an increasing chain of scenarios.
    Sequence {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        chain: Vec<PathBuf>,
    },
    /// Emit a built-in fixture as canonical JSON.
    Gen {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIXTURE_NAMES))]
        name: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Comma-separated outcome labels.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        outcomes: Vec<String>,
        /// Comma-separated indices of flipped measurements (moebius).
        #[arg(long, value_delimiter = ',')]
        flips: Vec<usize>,
        /// Context width (cyclic-cover).
        #[arg(long, default_value_t = 3)]
        width: usize,
    },
}

struct Report {
    json: Value,
    code: u8,
    summary: String,
}

impl Report {
    fn new(json: Value, ok: bool, summary: impl Into<String>) -> Self {
        Report { json, code: if ok { 0 } else { 1 }, summary: summary.into() }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))
}

fn in_file<T>(path: &Path, r: ctxkit_core::Result<T>) -> anyhow::Result<T> {
    r.with_context(|| format!("in `{}`", path.display()))
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    in_file(path, json::parse_any_scenario(&read(path)?, path.parent()))
}

fn load_model(path: &Path) -> anyhow::Result<EmpiricalModel> {
    in_file(path, json::parse_model(&read(path)?, path.parent()))
}

fn load_bundle(path: &Path) -> anyhow::Result<SampleBundle> {
    in_file(path, json::parse_bundle(&read(path)?, path.parent()))
}

fn run(command: Command, opts: DecideOptions) -> anyhow::Result<Report> {
    Ok(match command {
        Command::Validate { scenario, strict } => {
            let s = load_scenario(&scenario)?;
            let vs = validate_scenario(&s, strict);
            let summary = if vs.is_empty() { "valid".to_string() } else { format!("{} violation(s)", vs.len()) };
            Report::new(json!({"valid": vs.is_empty(), "violations": json::violations_to_json(&vs)}), vs.is_empty(), summary)
        }
        Command::Nodisturbance { model } => {
            let m = load_model(&model)?;
            let vs = check_no_disturbance(&m);
            let summary = match vs.first() {
                None => "no disturbance".to_string(),
                Some(v) => format!("disturbing: {} and {} disagree on {}", v.left, v.right, v.overlap.join(",")),
            };
            let body = json!({
                "nondisturbing": vs.is_empty(),
                "violations": json::disturbance_to_json(m.scenario(), &vs),
            });
            Report::new(body, vs.is_empty(), summary)
        }
        Command::Noncontextual { model } => {
            let m = load_model(&model)?;
            let v = is_noncontextual(&m, opts)?;
            let ok = v.status == Status::Noncontextual;
            Report::new(json::verdict_to_json(&v), ok, v.status.as_str())
        }
        Command::Homology { scenario } => {
            let b = betti_numbers(&load_scenario(&scenario)?);
            Report::new(json::betti_to_json(b), true, format!("b0 = {}, b1 = {}", b.b0, b.b1))
        }
        Command::BundleTwists { bundle } => {
            let r = twist_report(&load_bundle(&bundle)?)?;
            let odd = r.cycles.iter().filter(|c| c.odd).count();
            let summary = format!("{} twist(s), {} of {} basis cycle(s) odd", r.twist_count(), odd, r.cycles.len());
            Report::new(json::twist_report_to_json(&r), true, summary)
        }
        Command::BundleTrivialize { bundle } => {
            let b = load_bundle(&bundle)?;
            let (ok, g) = is_trivializable(&b)?;
            let mut body = json!({"trivializable": ok});
            if let Some(g) = g {
                body["gauge"] = json::gauge_to_json(&g, &b);
            }
            Report::new(body, ok, if ok { "trivializable" } else { "not trivializable: odd holonomy" })
        }
        Command::BundleSections { bundle } => {
            let secs = enumerate_sections(&load_bundle(&bundle)?, opts)?;
            let n = secs.len();
            Report::new(json::sections_to_json(&secs), n > 0, format!("{n} section(s)"))
        }
        Command::Pushforward { bundle, base: Some(base) } => {
            let b = load_bundle(&bundle)?;
            let d = in_file(&base, json::parse_base(&read(&base)?, &b))?;
            let m = pushforward(&b, &d)?;
            let vs = check_no_disturbance(&m);
            let body = json!({
                "model": json::model_to_json(&m),
                "nondisturbing": vs.is_empty(),
                "violations": json::disturbance_to_json(m.scenario(), &vs),
            });
            Report::new(body, vs.is_empty(), if vs.is_empty() { "nondisturbing" } else { "disturbing" })
        }
        Command::Pushforward { bundle, base: None } => {
            let b = load_bundle(&bundle)?;
            let r = nondisturbing_base_polytope(&b, opts)?;
            let ok = r.base.is_some();
            Report::new(json::base_polytope_to_json(&b, &r), ok, if ok { "feasible" } else { "infeasible" })
        }
        Command::Extend { model, sup } => {
            let m = load_model(&model)?;
            let s = load_scenario(&sup)?;
            let r = check_extends(&m, &s, opts)?;
            Report::new(json::extension_to_json(&r), r.status == ExtensionStatus::Extends, r.status.as_str())
        }
        Command::Sequence { model, chain } => {
            let m = load_model(&model)?;
            let chain = chain.iter().map(|p| load_scenario(p)).collect::<anyhow::Result<Vec<_>>>()?;
            let r = check_sequence(&m, &chain, opts)?;
            let summary = match r.failing_step {
                None => "extends along the whole chain".to_string(),
                Some(k) => format!("fails at step {k} ({})", r.steps[k].status.as_str()),
            };
            Report::new(json::sequence_to_json(&r), r.failing_step.is_none(), summary)
        }
        Command::Gen { name, n, outcomes, flips, width } => {
            let p = FixtureParams { n, outcomes, flips, width };
            Report::new(gen_fixture(&name, &p)?, true, format!("fixture {name}"))
        }
    })
}

fn error_json(e: &anyhow::Error) -> Value {
    let message = format!("{e:#}");
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::TooLarge { cardinality, limit }) => json!({
            "status": "too-large",
            "cardinality": cardinality.to_string(),
            "limit": limit,
            "error": message,
        }),
        Some(Error::Unsupported(_)) => json!({"status": "unsupported", "error": message}),
        _ => json!({"status": "error", "error": message}),
    }
}

fn emit(out: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    let text = to_canonical_string(v);
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write `{}`", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = DecideOptions { limit: cli.limit };
    let (value, code) = match run(cli.command, opts) {
        Ok(r) => {
            eprintln!("{}", r.summary);
            (r.json, r.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            (error_json(&e), 2)
        }
    };
    if let Err(e) = emit(cli.out.as_deref(), &value) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
