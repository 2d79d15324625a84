//! Repetition sweeps and their per-round summaries.

use serde::{Deserialize, Serialize};

use super::stats::{
    cumulative_average, rounds_to_threshold, tail_mean, SeriesAccumulator, SeriesStats,
};
use super::{run_single, Execution, ExperimentConfig, MinerSpec, Trajectory};
use crate::error::{Error, Result};
use crate::tolerance::{CONVERGENCE_HOLD, CONVERGENCE_THRESHOLD};

/// Runs kept in memory at once; reduction order never depends on it.
const CHUNK_RUNS: usize = 64;

/// Per-miner summary over all repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerSeries {
    pub miner: usize,
    /// Full computing power; NaN against a fixed pool.
    pub power: f64,
    pub q: SeriesStats,
    pub expected: SeriesStats,
    /// Cumulative average of the realized miner payoff.
    pub miner_average: SeriesStats,
    /// Cumulative average of the realized pool payoff.
    pub pool_average: SeriesStats,
    /// Mean over repetitions of the tail-window average payoffs.
    pub miner_tail: f64,
    pub pool_tail: f64,
    /// Round at which the mean `q` series reaches the convergence
    /// threshold and holds it.
    pub rounds_to_threshold: Option<usize>,
    pub clamp_events: u64,
    pub degenerate_updates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub tail_window: usize,
    pub series: Vec<MinerSeries>,
    /// Repetition 0 of every miner, for trajectory export.
    pub sample: Vec<Trajectory>,
}

struct MinerAccumulator {
    q: SeriesAccumulator,
    expected: SeriesAccumulator,
    miner_average: SeriesAccumulator,
    pool_average: SeriesAccumulator,
    miner_tail: f64,
    pool_tail: f64,
    clamp_events: u64,
    degenerate_updates: u64,
}

impl MinerAccumulator {
    fn new(rounds: usize) -> Self {
        MinerAccumulator {
            q: SeriesAccumulator::new(rounds),
            expected: SeriesAccumulator::new(rounds),
            miner_average: SeriesAccumulator::new(rounds),
            pool_average: SeriesAccumulator::new(rounds),
            miner_tail: 0.0,
            pool_tail: 0.0,
            clamp_events: 0,
            degenerate_updates: 0,
        }
    }

    fn push(&mut self, t: &Trajectory, tail_window: usize) {
        self.q.push(&t.q_series);
        let expected: Vec<f64> = t.expected.iter().map(|e| e.unwrap_or(f64::NAN)).collect();
        self.expected.push(&expected);
        self.miner_average
            .push(&cumulative_average(&t.miner_payoffs));
        self.pool_average.push(&cumulative_average(&t.pool_payoffs));
        self.miner_tail += tail_mean(&t.miner_payoffs, tail_window);
        self.pool_tail += tail_mean(&t.pool_payoffs, tail_window);
        self.clamp_events += t.clamp_events;
        self.degenerate_updates += t.degenerate_updates;
    }
}

/// Run every `(repetition, miner)` pair and summarize per miner.
pub fn run_experiment(
    config: &ExperimentConfig,
    exec: Execution,
    tail_window: usize,
) -> Result<ExperimentResult> {
    config.validate()?;
    let miners = config.miners();
    let total = config.repetitions * miners;
    let mut acc: Vec<MinerAccumulator> = (0..miners)
        .map(|_| MinerAccumulator::new(config.rounds))
        .collect();
    let mut sample = Vec::with_capacity(miners);

    let mut start = 0;
    while start < total {
        let len = CHUNK_RUNS.min(total - start);
        let runs = exec.map_indices(len, |k| {
            let run = start + k;
            run_single(config, run / miners, run % miners)
        });
        for (k, run) in runs.into_iter().enumerate() {
            let t = run?;
            let index = start + k;
            acc[index % miners].push(&t, tail_window);
            if index < miners {
                sample.push(t);
            }
        }
        start += len;
    }

    let reps = config.repetitions as f64;
    let series = acc
        .into_iter()
        .enumerate()
        .map(|(miner, a)| {
            let q = a.q.finish();
            let rounds_to_threshold =
                rounds_to_threshold(&q.mean, CONVERGENCE_THRESHOLD, CONVERGENCE_HOLD);
            MinerSeries {
                miner,
                power: config
                    .initial_powers
                    .get(miner)
                    .copied()
                    .unwrap_or(f64::NAN),
                q,
                expected: a.expected.finish(),
                miner_average: a.miner_average.finish(),
                pool_average: a.pool_average.finish(),
                miner_tail: a.miner_tail / reps,
                pool_tail: a.pool_tail / reps,
                rounds_to_threshold,
                clamp_events: a.clamp_events,
                degenerate_updates: a.degenerate_updates,
            }
        })
        .collect();
    Ok(ExperimentResult {
        tail_window,
        series,
        sample,
    })
}

fn require(config: &ExperimentConfig, memorial: bool) -> Result<()> {
    let ok = match config.miner {
        MinerSpec::NonMemorial { .. } => !memorial,
        MinerSpec::Memorial { .. } => memorial,
        _ => false,
    };
    if !ok || config.mechanism().is_none() {
        let kind = if memorial { "memorial" } else { "non-memorial" };
        return Err(Error::InvalidExperiment(format!(
            "expected {kind} miners against the incentive mechanism"
        )));
    }
    Ok(())
}

/// Sigmoid-rule miners under the mechanism.
pub fn run_nonmemorial_experiment(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<ExperimentResult> {
    require(config, false)?;
    run_experiment(config, exec, config.rounds / 10)
}

/// Multiplicative-rule miners under the mechanism.
pub fn run_memorial_experiment(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<ExperimentResult> {
    require(config, true)?;
    run_experiment(config, exec, config.rounds / 10)
}

/// Realized long-run payoffs for one miner, averaged over repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongRunPayoffs {
    pub miner: usize,
    pub pool_average: f64,
    pub miner_average: f64,
    pub pool_tail: f64,
    pub miner_tail: f64,
}

pub fn long_run_actual_payoffs(
    config: &ExperimentConfig,
    exec: Execution,
    tail_window: usize,
) -> Result<Vec<LongRunPayoffs>> {
    let result = run_experiment(config, exec, tail_window)?;
    Ok(result
        .series
        .iter()
        .map(|s| LongRunPayoffs {
            miner: s.miner,
            pool_average: s.pool_average.last().unwrap_or(f64::NAN),
            miner_average: s.miner_average.last().unwrap_or(f64::NAN),
            pool_tail: s.pool_tail,
            miner_tail: s.miner_tail,
        })
        .collect())
}
