use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nhqa_bench::{baseline, default_config, small_chain, weber_points};
use nhqa_core::lz::lz_context;
use nhqa_core::observables::{self, Engine};
use nhqa_core::tdse::{self, Initial};
use nhqa_core::{bloch, oracle, ModeContext};
use std::hint::black_box;

fn weber(c: &mut Criterion) {
    let mut g = c.benchmark_group("weber");
    for (name, a, z) in weber_points() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &(a, z), |b, &(a, z)| {
            b.iter(|| nhqa_core::weber::pcf(black_box(a), black_box(z)).unwrap())
        });
    }
    g.finish();
}

fn single_mode(c: &mut Criterion) {
    let params = baseline(0.5);
    let cfg = default_config();
    let mut g = c.benchmark_group("mode p=64");
    g.sample_size(20);
    let mode = ModeContext::new(64, &params).unwrap();
    g.bench_function("tdse", |b| b.iter(|| tdse::final_state(&mode, &params, &cfg, Initial::Diabatic).unwrap()));
    g.bench_function("lz-exact", |b| {
        b.iter(|| lz_context(&mode, &params).unwrap().exact_amplitudes(params.tau).unwrap())
    });
    g.finish();
}

fn chain(c: &mut Criterion) {
    let cfg = default_config();
    let mut g = c.benchmark_group("kink density N=256");
    g.sample_size(10);
    let params = nhqa_core::ChainParams { n: 256, ..baseline(0.25) };
    for engine in [Engine::LzExact, Engine::Asympt] {
        g.bench_function(engine.name(), |b| b.iter(|| observables::kink_density_exact(&params, engine, &cfg).unwrap()));
    }
    g.finish();
}

fn anneal_time(c: &mut Criterion) {
    c.bench_function("anneal time N=1024 δ=0.5", |b| b.iter(|| observables::anneal_time(black_box(&baseline(0.5)), 0.999).unwrap()));
}

fn checks(c: &mut Criterion) {
    let mut g = c.benchmark_group("checks");
    g.sample_size(10);
    let cfg = nhqa_core::IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-12, ..default_config() };
    let params = small_chain(6, 0.25, 50.0);
    g.bench_function("dense N=6", |b| b.iter(|| oracle::evolve_dense(&params, &cfg, 10).unwrap()));
    let case = bloch::reference_suite()[0];
    g.bench_function(case.name, |b| b.iter(|| case.compare(50, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, weber, single_mode, chain, anneal_time, checks);
criterion_main!(benches);
