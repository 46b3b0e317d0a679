use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use wdistill::montecarlo::{simulate_trials, ProtocolKind, TrialConfig};
use wdistill::protocols::{self, PARTICLE_2, PARTICLE_3};
use wdistill::{cavity, CavityParams, Frame};
use wdistill_bench::{points, sample};

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    let params = CavityParams::default();
    for (name, w) in points() {
        for protocol in ProtocolKind::ALL {
            group.bench_with_input(BenchmarkId::new(protocol.as_str(), name), &w, |b, w| {
                b.iter(|| protocol.run(black_box(w), &params).unwrap())
            });
        }
    }
    group.finish();
}

fn builders(c: &mut Criterion) {
    let w = sample();
    c.bench_function("solve_m", |b| b.iter(|| protocols::solve_m(black_box(&w)).unwrap()));
    c.bench_function("build_all_unitaries", |b| {
        b.iter(|| {
            let w = black_box(&w);
            (
                protocols::build_u1(w).unwrap(),
                protocols::build_u2(w).unwrap(),
                protocols::build_u1_prime(w).unwrap(),
                protocols::build_u2_prime(w).unwrap(),
                protocols::build_u3_prime(w).unwrap(),
            )
        })
    });
}

fn jaynes_cummings(c: &mut Criterion) {
    let mut group = c.benchmark_group("jc_propagator");
    for n_max in [1usize, 4, 16] {
        let p = CavityParams::resonant(1.0, 1.0, n_max, Frame::Lab).unwrap();
        group.bench_with_input(BenchmarkId::new("closed_form", n_max), &p, |b, p| {
            b.iter(|| cavity::jc_propagator(p, black_box(0.7)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dense", n_max), &p, |b, p| {
            b.iter(|| cavity::dense_propagator(p, black_box(0.7)).unwrap())
        });
    }
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let s = protocols::protocol2_state(&sample()).unwrap();
    let pair = protocols::w3();
    c.bench_function("concurrence_23", |b| {
        b.iter(|| {
            pair.partial_trace(&[PARTICLE_2, PARTICLE_3])
                .unwrap()
                .concurrence()
                .unwrap()
        })
    });
    c.bench_function("measure_ancilla", |b| {
        b.iter(|| black_box(&s).measure_subsystem(protocols::ANCILLA).unwrap())
    });
    let tree = protocols::protocol2_tree(&sample()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    c.bench_function("sample_protocol2_trial", |b| b.iter(|| tree.sample(&mut rng).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_trials");
    group.sample_size(10);
    let n = 100_000u64;
    group.throughput(Throughput::Elements(n));
    let w = sample();
    for protocol in ProtocolKind::ALL {
        for workers in [1usize, 4] {
            let config = TrialConfig {
                workers,
                ..TrialConfig::new(n, 7)
            };
            group.bench_with_input(
                BenchmarkId::new(protocol.as_str(), format!("{workers}w")),
                &config,
                |b, config| b.iter(|| simulate_trials(protocol, &w, config).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, enumerate, builders, jaynes_cummings, diagnostics, monte_carlo);
criterion_main!(benches);
