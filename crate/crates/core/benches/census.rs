//! Census benchmarks: sequential vs data-parallel sweeps, and the
//! exhaustive engine vs the pruned backtracking engine.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use groupoid_census::census::{run_with_jobs, CensusQuery, Engine};
use groupoid_census::{catalog, parse_identity};

fn catalog_identities() -> Vec<groupoid_census::Identity> {
    catalog::main_table().map(|e| e.identity().clone()).collect()
}

/// Full 39-identity order-3 sweep, one worker vs all workers.
fn bench_sweep_parallelism(c: &mut Criterion) {
    let query = CensusQuery::exhaustive(3, catalog_identities());
    let mut group = c.benchmark_group("order3_main_table_sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_with_jobs(&query, 1).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| run_with_jobs(&query, 0).unwrap()));
    group.finish();
}

/// Single-identity order-3 counts across both engines.
fn bench_engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("order3_single_identity");
    group.sample_size(10);
    for (label, formula) in [
        ("semigroups", "x(yz) = (xy)z"),
        ("left_nuclear_square", "((xx)y)z = (xx)(yz)"),
    ] {
        let identity = parse_identity(formula).unwrap();
        for engine in [Engine::Exhaustive, Engine::Backtracking] {
            let query = CensusQuery {
                engine,
                ..CensusQuery::exhaustive(3, vec![identity.clone()])
            };
            group.bench_with_input(
                BenchmarkId::new(label, format!("{engine:?}")),
                &query,
                |b, q| b.iter(|| run_with_jobs(q, 1).unwrap()),
            );
        }
    }
    group.finish();
}

/// Order-4 backtracking on a heavily pruned identity, one worker vs all.
fn bench_order4_backtracking(c: &mut Criterion) {
    let identity = parse_identity("x(yz) = (yx)z").unwrap();
    let query = CensusQuery::backtracking(4, vec![identity]);
    let mut group = c.benchmark_group("order4_backtracking_abelian_group");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_with_jobs(&query, 1).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| run_with_jobs(&query, 0).unwrap()));
    group.finish();
}

criterion_group!(
    benches,
    bench_sweep_parallelism,
    bench_engines,
    bench_order4_backtracking
);
criterion_main!(benches);
