//! Benchmarks for Liouvillian assembly, steady-state factorizations, and
//! current evaluation across chain sizes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinflux::prelude::*;

fn graded_chain(sites: usize) -> ChainConfig {
    ChainConfig::new(
        sites,
        CouplingProfile::ZGraded { alpha: 1.0, anisotropy: 1.0, grade: 0.25 },
        FieldProfile::Uniform { b: 0.1 },
    )
}

fn bath() -> BoundarySpec {
    BoundarySpec::z_target(0.5, 1.0)
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("liouvillian_assembly");
    for sites in 3..=6 {
        let chain = graded_chain(sites);
        group.bench_with_input(BenchmarkId::from_parameter(sites), &chain, |b, chain| {
            b.iter(|| build_liouvillian(chain, &bath()).unwrap())
        });
    }
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("steady_solve");
    group.sample_size(10);
    for sites in 3..=5 {
        let liouv = build_liouvillian(&graded_chain(sites), &bath()).unwrap();
        group.bench_with_input(BenchmarkId::new("dense_lu", sites), &liouv, |b, liouv| {
            b.iter(|| {
                solve_steady(liouv, &SolveOptions::with_method(SolverMethod::DenseLu)).unwrap()
            })
        });
    }
    for sites in 3..=6 {
        let liouv = build_liouvillian(&graded_chain(sites), &bath()).unwrap();
        group.bench_with_input(BenchmarkId::new("sparse_lu", sites), &liouv, |b, liouv| {
            b.iter(|| {
                solve_steady(liouv, &SolveOptions::with_method(SolverMethod::SparseLu)).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_observables(c: &mut Criterion) {
    let mut group = c.benchmark_group("current_report");
    for sites in 3..=6 {
        let chain = graded_chain(sites);
        let liouv = build_liouvillian(&chain, &bath()).unwrap();
        let steady = solve_steady(&liouv, &SolveOptions::default()).unwrap();
        let set = ObservableSet::new(&chain, &bath()).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(sites),
            &(set, steady.rho),
            |b, (set, rho)| b.iter(|| set.report(rho).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_assembly, bench_solvers, bench_observables);
criterion_main!(benches);
