//! Validators on a single-thread rayon pool against the default pool.
//!
//! Built without the `parallel` feature both arms run the sequential path.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cupi_assembly::assembly::{assemble, validate_comodule};
use cupi_assembly::cupi::validate_symmetric_coalgebra;
use cupi_assembly::examples;
use cupi_assembly::presheaf::{random_presheaf, RandomPresheafParams};
use cupi_assembly::reconstruct::fullness_roundtrip;
use rayon::ThreadPoolBuilder;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn coalgebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("validate_symmetric_coalgebra");
    group.sample_size(10);
    let x = examples::simplex(6);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "Δ^6, i ≤ 7"), |b| {
            b.iter(|| pool.install(|| validate_symmetric_coalgebra(&x, 7)))
        });
    }
    group.finish();
}

fn comodule(c: &mut Criterion) {
    let mut group = c.benchmark_group("validate_comodule");
    group.sample_size(10);
    let x = Arc::new(examples::rp2());
    let params = RandomPresheafParams { max_rank: 12, max_degree: 2, mixing: 8 };
    let n = random_presheaf(x, &params, 7);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "RP², random presheaf"), |b| {
            b.iter(|| {
                pool.install(|| {
                    let a = assemble(&n).unwrap();
                    validate_comodule(&a, 3).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn roundtrip(c: &mut Criterion) {
    let mut group = c.benchmark_group("fullness_roundtrip");
    group.sample_size(10);
    let x = Arc::new(examples::simplex_boundary(3));
    let n = random_presheaf(x, &RandomPresheafParams::default(), 3);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "∂Δ³, 5 trials"), |b| {
            b.iter(|| pool.install(|| fullness_roundtrip(&n, &n, 5, 0).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, coalgebra, comodule, roundtrip);
criterion_main!(benches);
