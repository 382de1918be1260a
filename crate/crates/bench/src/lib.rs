//! Benchmark inputs shared by the criterion targets.

use ctxkit_core::fixtures::{odd_cycle_model, sparable_model};
use ctxkit_core::{make_n_cycle, moebius_bundle, product_bundle, EmpiricalModel, SampleBundle, Scenario};

pub fn cycle_models() -> Vec<(usize, EmpiricalModel)> {
    (3..=6).map(|n| (n, odd_cycle_model(n).expect("n >= 3"))).collect()
}

pub fn triangle_model() -> EmpiricalModel {
    sparable_model()
}

pub fn cycle_scenarios() -> Vec<Scenario> {
    [4, 8, 16, 32].iter().map(|&n| make_n_cycle(n, &["0", "1"]).expect("n >= 3")).collect()
}

pub fn bundles() -> Vec<(&'static str, SampleBundle)> {
    vec![
        ("product-8", product_bundle(&make_n_cycle(8, &["0", "1"]).expect("cycle"))),
        ("moebius-8", moebius_bundle(8, &[0, 3]).expect("cycle")),
    ]
}
