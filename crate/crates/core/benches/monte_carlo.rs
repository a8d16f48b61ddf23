use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qbc5::adam::{simulate_cheat, CheatPlan, SearchOptions, Strategy};
use qbc5::babe::{simulate_entangling_babe, BabeStrategy};
use qbc5::ensemble::{simulate_ensemble, EnsembleParams};
use qbc5::game::{game_simulate, GameParams, Model};
use qbc5::{BellOutcome, Execution, UnitaryFamily};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn protocol_cheat(c: &mut Criterion) {
    let fam = UnitaryFamily::standard();
    let i = BellOutcome::new(1).unwrap();
    let plan = CheatPlan::optimized(Strategy::Discriminate, &fam, i, 0, &SearchOptions::default()).unwrap();
    let mut g = c.benchmark_group("adam_discriminate_20k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_cheat(&plan, &fam, 1, black_box(20_000), 1, exec))
        });
    }
    g.finish();
}

fn babe(c: &mut Criterion) {
    let fam = UnitaryFamily::standard();
    let mut g = c.benchmark_group("babe_single_pair_100k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_entangling_babe(&fam, 4, BabeStrategy::SinglePair, black_box(100_000), 2, exec).unwrap())
        });
    }
    g.finish();
}

fn ensemble(c: &mut Criterion) {
    let p = EnsembleParams::new(1000, 100, 50, 0.5).unwrap();
    let mut g = c.benchmark_group("ensemble_100k");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_ensemble(&p, black_box(100_000), 3, exec).unwrap())
        });
    }
    g.finish();
}

fn game(c: &mut Criterion) {
    let p = GameParams::new(0.1, 0.3, 0.5, 100).unwrap();
    let mut g = c.benchmark_group("game_100k");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| game_simulate(&p, Model::Partitioned, black_box(100_000), 4, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, protocol_cheat, babe, ensemble, game);
criterion_main!(benches);
