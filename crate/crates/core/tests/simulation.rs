mod common;

use common::{stationary_by_iteration, transition, S_M};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zdpool::presets::{self, figure};
use zdpool::sim::{
    long_run_actual_payoffs, play_round, run_experiment, run_fixed_zd, run_memorial_experiment,
    run_nonmemorial_experiment, run_single, Execution, ExperimentResult, MinerSpec,
};
use zdpool::{ClassicalKind, GameState, MixedStrategy};

fn crossings(result: &ExperimentResult) -> Vec<usize> {
    result
        .series
        .iter()
        .map(|s| {
            s.rounds_to_threshold
                .unwrap_or_else(|| panic!("miner {} never converged", s.miner))
        })
        .collect()
}

fn assert_non_increasing(rounds: &[usize], what: &str) {
    for w in rounds.windows(2) {
        assert!(w[1] <= w[0], "{what}: {rounds:?}");
    }
}

#[test]
fn play_round_frequencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(play_round(1.0, 1.0, &mut rng), GameState::CC);
    assert_eq!(play_round(0.0, 1.0, &mut rng), GameState::DC);
    let mut counts = [0usize; 4];
    let n = 100_000;
    for _ in 0..n {
        counts[play_round(0.5, 0.5, &mut rng).index()] += 1;
    }
    for c in counts {
        assert!((c as f64 / n as f64 - 0.25).abs() < 0.01, "{counts:?}");
    }
}

#[test]
fn same_seed_same_trajectory_on_both_paths() {
    for n in 1..=4 {
        let mut config = figure(n, 77).unwrap().remove(0).config;
        config.repetitions = 12;
        let a = run_single(&config, 3, 0).unwrap();
        let b = run_single(&config, 3, 0).unwrap();
        assert_eq!(a, b);
        let seq = run_experiment(&config, Execution::Sequential, 50).unwrap();
        let par = run_experiment(&config, Execution::Parallel, 50).unwrap();
        // Debug output compares NaN placeholders (fixed pools) as equal.
        assert_eq!(format!("{seq:?}"), format!("{par:?}"), "figure {n}");
    }
}

#[test]
fn different_seeds_differ() {
    let a = run_single(&figure(4, 1).unwrap()[1].config, 0, 0).unwrap();
    let b = run_single(&figure(4, 2).unwrap()[1].config, 0, 0).unwrap();
    assert_ne!(a.states, b.states);
}

#[test]
fn fixed_zd_pins_classical_opponents() {
    let p = presets::fixed_zd();
    let oracle = {
        let v = stationary_by_iteration(&transition(presets::FIXED_ZD, [0.0; 4]), 0, 5_000);
        common::dot(&v, &S_M)
    };
    assert!((oracle - 8.0 / 3.0).abs() < 1e-10);
    for (i, kind) in ClassicalKind::ALL.into_iter().enumerate() {
        let t = run_fixed_zd(
            p,
            kind.as_mixed(),
            presets::PAYOFFS,
            100_000,
            GameState::CC,
            i as u64,
        )
        .unwrap();
        let avg = t.average_miner_payoff();
        assert!((avg - 8.0 / 3.0).abs() < 0.02, "{kind}: {avg}");
    }
}

#[test]
fn full_cooperation_is_absorbing() {
    let t = run_fixed_zd(
        MixedStrategy::ALL_COOPERATE,
        ClassicalKind::Allc.as_mixed(),
        presets::PAYOFFS,
        1_000,
        GameState::CC,
        0,
    )
    .unwrap();
    assert_eq!(t.average_miner_payoff(), 3.0);
    assert_eq!(t.average_pool_payoff(), 3.0);
}

#[test]
fn nonmemorial_replication() {
    let mut by_epsilon = Vec::new();
    for n in [2, 3] {
        let mut rows = Vec::new();
        for preset in figure(n, presets::DEFAULT_SEED).unwrap() {
            let result = run_nonmemorial_experiment(&preset.config, Execution::Parallel).unwrap();
            let rounds = crossings(&result);
            assert!(rounds.iter().all(|&r| r + 49 <= preset.config.rounds));
            assert_non_increasing(&rounds, &format!("figure {n} {}", preset.label));
            if matches!(preset.config.miner, MinerSpec::NonMemorial { q0, .. } if q0 == 0.8) {
                for s in &result.series {
                    assert!(s.q.mean.iter().all(|&q| q >= 0.5), "miner {}", s.miner);
                }
            }
            rows.push(rounds);
        }
        by_epsilon.push(rows);
    }
    for (low, high) in by_epsilon[0].iter().zip(&by_epsilon[1]) {
        for (a, b) in low.iter().zip(high) {
            assert!(b <= a, "eps=8 slower: {high:?} vs {low:?}");
        }
    }
}

#[test]
fn memorial_replication() {
    let mut rows = Vec::new();
    for preset in figure(4, presets::DEFAULT_SEED).unwrap() {
        let result = run_memorial_experiment(&preset.config, Execution::Parallel).unwrap();
        let rounds = crossings(&result);
        assert_non_increasing(&rounds, &preset.label);
        for s in &result.series {
            assert_eq!(s.degenerate_updates, 0);
            assert!(s.q.last().unwrap() >= 0.99);
        }
        rows.push(rounds);
    }
    // Higher initial cooperation never converges later, miner by miner.
    for w in rows.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            assert!(b <= a, "{rows:?}");
        }
    }
}

#[test]
fn long_run_payoffs_settle_at_mutual_cooperation() {
    for miner in [
        MinerSpec::NonMemorial {
            q0: 0.01,
            epsilon: 5.0,
        },
        MinerSpec::Memorial { p0: 0.01, q0: 0.01 },
    ] {
        let mut config = presets::long_run(miner, presets::DEFAULT_SEED);
        config.repetitions = 20;
        let window = config.rounds / 10;
        for r in long_run_actual_payoffs(&config, Execution::Parallel, window).unwrap() {
            assert!((r.miner_tail - 3.0).abs() < 0.05, "{miner:?} {r:?}");
            assert!((r.pool_tail - 3.0).abs() < 0.05, "{miner:?} {r:?}");
        }
    }
}

#[test]
fn cooperative_single_miner_earns_three_throughout() {
    let mut config = presets::long_run(MinerSpec::Memorial { p0: 1.0, q0: 1.0 }, 3);
    config.initial_powers = vec![2.0];
    config.rounds = 2_000;
    config.repetitions = 5;
    for r in long_run_actual_payoffs(&config, Execution::Sequential, 200).unwrap() {
        assert!((r.miner_average - 3.0).abs() < 0.02, "{r:?}");
        assert!((r.pool_average - 3.0).abs() < 0.02, "{r:?}");
    }
}

#[test]
fn standard_errors_accompany_means() {
    let mut config = figure(2, 9).unwrap().remove(1).config;
    config.repetitions = 30;
    let result = run_experiment(&config, Execution::Parallel, 50).unwrap();
    for s in &result.series {
        assert_eq!(s.q.repetitions, 30);
        assert_eq!(s.q.se.len(), config.rounds);
        assert!(s.q.se.iter().all(|se| se.is_finite() && *se >= 0.0));
        // Sampled actions make early rounds vary across repetitions.
        assert!(s.q.se[..10].iter().any(|&se| se > 0.0));
    }
}

#[test]
fn wrong_kind_is_rejected() {
    let config = figure(4, 1).unwrap().remove(0).config;
    assert!(run_nonmemorial_experiment(&config, Execution::Sequential).is_err());
    let config = figure(2, 1).unwrap().remove(0).config;
    assert!(run_memorial_experiment(&config, Execution::Sequential).is_err());
}
