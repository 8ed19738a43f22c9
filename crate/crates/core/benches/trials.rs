//! Sequential vs parallel trial scheduling on two representative workloads.

use std::hint::black_box;
use std::sync::Arc;

use compgap::attackers::{GreedyMajority, UnboundedForgerC1};
use compgap::constructions::C1Problem;
use compgap::crypto::{EccParams, OtsParams};
use compgap::game::{risk_trials, run_games};
use compgap::problems::{majority_hypothesis, MajorityNoise};
use compgap::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn wrapped_risk(c: &mut Criterion) {
    let p = C1Problem::new(MajorityNoise::new(15, 0.05).unwrap(), OtsParams::default(), EccParams::default()).unwrap();
    let h = p.classifier(majority_hypothesis(15));
    let mut group = c.benchmark_group("c1_risk_500");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(risk_trials(&p, &h, 500, 7, exec).unwrap()))
        });
    }
    group.finish();
}

fn forging_games(c: &mut Criterion) {
    // slen = 12 keeps one forgery in the millisecond range.
    let ots = OtsParams::new(16, 12, 2).unwrap();
    let p = C1Problem::new(MajorityNoise::new(15, 0.05).unwrap(), ots, EccParams::default()).unwrap();
    let h = p.classifier(majority_hypothesis(15));
    let attacker = UnboundedForgerC1::new(&p, Arc::new(GreedyMajority::new(2)), 2);
    let budget = 2 + ots.sig_len();
    let mut group = c.benchmark_group("c1_unbounded_games_64");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(run_games(&p, &h, &attacker, budget, 64, 11, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, wrapped_risk, forging_games);
criterion_main!(benches);
