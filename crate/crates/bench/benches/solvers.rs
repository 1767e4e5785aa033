//! Wall-time benchmarks for the pipeline stages: instance generation,
//! candidate-link construction, and the three solvers. Solver iterations
//! dominate, so those groups run with a reduced sample count.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mlsynth_core::{
    candidate_logical_links, generate_instance, solve_exact, solve_full_lsr_baseline,
    solve_multilayer, BuilderParams, ExactLimits, Instance, SearchParams, VariantParams,
};

fn instance(tag: &str, nodes: usize, seed: u64) -> Instance {
    let params = VariantParams::preset(tag, nodes).unwrap();
    generate_instance(nodes, &params, seed).unwrap()
}

fn generation(c: &mut Criterion) {
    let params = VariantParams::preset("dense-costly-thick", 30).unwrap();
    c.bench_function("generate_instance/dense-30", |b| {
        b.iter(|| generate_instance(black_box(30), &params, black_box(1)).unwrap())
    });
}

fn candidate_links(c: &mut Criterion) {
    let builder = BuilderParams::default();
    let sparse = instance("sparse-cheap-thin", 30, 1);
    let dense = instance("dense-costly-thick", 30, 1);
    c.bench_function("candidate_logical_links/sparse-30", |b| {
        b.iter(|| candidate_logical_links(black_box(&sparse), &builder).unwrap())
    });
    c.bench_function("candidate_logical_links/dense-30", |b| {
        b.iter(|| candidate_logical_links(black_box(&dense), &builder).unwrap())
    });
}

fn solvers(c: &mut Criterion) {
    let builder = BuilderParams::default();
    let search = SearchParams::default();
    let mid = instance("dense-costly-thick", 20, 1);

    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("baseline/dense-20", |b| {
        b.iter(|| solve_full_lsr_baseline(black_box(&mid)).unwrap())
    });
    group.bench_function("multilayer/dense-20", |b| {
        b.iter(|| solve_multilayer(black_box(&mid), &builder, &search).unwrap())
    });

    let micro = instance("dense-cheap-thin", 4, 1);
    let limits = ExactLimits::default();
    group.bench_function("exact/dense-4", |b| {
        b.iter(|| solve_exact(black_box(&micro), &limits).unwrap())
    });
    group.finish();
}

criterion_group!(benches, generation, candidate_links, solvers);
criterion_main!(benches);
