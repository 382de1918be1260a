use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ctxkit_bench::{bundles, cycle_models, cycle_scenarios, triangle_model};
use ctxkit_core::{
    betti_numbers, check_extends, cyclic_cover, enumerate_sections, is_noncontextual, is_trivializable, DecideOptions,
};

fn noncontextual(c: &mut Criterion) {
    let opts = DecideOptions::default();
    let mut g = c.benchmark_group("noncontextual");
    g.bench_function("sparable", |b| {
        let m = triangle_model();
        b.iter(|| is_noncontextual(black_box(&m), opts).unwrap())
    });
    for (n, m) in cycle_models() {
        g.bench_with_input(BenchmarkId::new("odd-cycle", n), &m, |b, m| b.iter(|| is_noncontextual(m, opts).unwrap()));
    }
    g.finish();
}

fn extension(c: &mut Criterion) {
    let opts = DecideOptions::default();
    let (_, m) = cycle_models().into_iter().find(|(n, _)| *n == 5).unwrap();
    let mut g = c.benchmark_group("extend-5-cycle");
    for width in 3..=5 {
        let sup = cyclic_cover(5, width, &["0", "1"]).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(width), &sup, |b, sup| {
            b.iter(|| check_extends(&m, sup, opts).unwrap())
        });
    }
    g.finish();
}

fn topology(c: &mut Criterion) {
    let mut g = c.benchmark_group("topology");
    for s in cycle_scenarios() {
        g.bench_with_input(BenchmarkId::new("betti", s.measurements().len()), &s, |b, s| b.iter(|| betti_numbers(s)));
    }
    for (name, bundle) in bundles() {
        g.bench_function(format!("trivialize/{name}"), |b| b.iter(|| is_trivializable(&bundle).unwrap()));
        g.bench_function(format!("sections/{name}"), |b| {
            b.iter(|| enumerate_sections(&bundle, DecideOptions::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, noncontextual, extension, topology);
criterion_main!(benches);
