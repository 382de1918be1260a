//! Measurement scenarios, empirical models and their contextuality.
//!
//! The crate decides noncontextuality and subscenario extendability by exact
//! rational linear programming, and models contextuality geometrically with
//! discrete sample bundles over a scenario: twisted labelings, holonomy
//! parity, sections and pushforwards of base distributions.

pub mod bundle;
pub mod decide;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod lp;
pub mod model;
pub mod rational;
pub mod scenario;
pub mod subscenario;

pub use bundle::{
    base_polytope_system, enumerate_sections, hollow_triangle_bundle, is_trivializable, moebius_bundle,
    nondisturbing_base_polytope, product_bundle, pushforward, twist_report, BasePolytopeResult, BasisCycle, Gauge,
    LocalSpace, OverlapEdge, SampleBundle, Section, TwistReport,
};
pub use decide::{
    check_extends, enumerate_assignments, extension_system, is_noncontextual, verify_certificate,
    verify_certificate_with, verify_extension, Certificate, DecideOptions, ExtensionResult, ExtensionRow,
    ExtensionStatus, HiddenVariableModel, InfeasibilityWitness, Status, Verdict, DEFAULT_LIMIT,
};
pub use error::{Error, Result};
pub use model::{
    check_no_disturbance, deterministic_model, mix, DeterministicAssignment, DisturbanceViolation, Distribution,
    EmpiricalModel,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use scenario::{
    betti_numbers, cyclic_cover, is_acyclic, make_classical, make_n_cycle, make_path, validate_scenario, Betti,
    Context, Measurement, Scenario, ScenarioComplex, Violation,
};
pub use subscenario::{
    check_sequence, induced_subscenario, is_subscenario, restrict_contexts, InducedSubscenario, Refusal,
    ScenarioOrder, SequenceReport,
};
