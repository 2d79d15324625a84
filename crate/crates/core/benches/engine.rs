use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zdpool::presets;
use zdpool::sim::{run_experiment, Execution, MinerSpec};

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("repetition_sweep");
    group.sample_size(10);
    let cases = [
        (
            "non_memorial",
            MinerSpec::NonMemorial {
                q0: 0.1,
                epsilon: 5.0,
            },
        ),
        ("memorial", MinerSpec::Memorial { p0: 0.1, q0: 0.1 }),
    ];
    for (name, miner) in cases {
        let mut config = presets::long_run(miner, presets::DEFAULT_SEED);
        config.rounds = presets::FIGURE_HORIZON;
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{exec:?}")),
                &config,
                |b, cfg| b.iter(|| run_experiment(cfg, exec, 50).unwrap()),
            );
        }
    }
    group.finish();

    let mut group = c.benchmark_group("fixed_zd");
    group.sample_size(10);
    for s in presets::figure(1, presets::DEFAULT_SEED).unwrap() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(s.label.as_str(), format!("{exec:?}")),
                &s.config,
                |b, cfg| b.iter(|| run_experiment(cfg, exec, 100).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
