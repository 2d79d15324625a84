//! Seeded iterated-play executor.
//!
//! A run pairs one pool with one miner for a fixed number of rounds. The
//! pool either plays a fixed memory-one strategy or runs the incentive
//! mechanism; the miner is classical, fixed, or one of the evolutionary
//! agents. Every `(repetition, miner)` pair draws from its own ChaCha8
//! stream, so runs are independent of scheduling and bit-reproducible.

pub mod exec;
mod experiment;
pub mod stats;

pub use exec::Execution;
pub use experiment::{
    long_run_actual_payoffs, run_experiment, run_memorial_experiment, run_nonmemorial_experiment,
    ExperimentResult, LongRunPayoffs, MinerSeries,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::game::{Action, GameState, MixedStrategy, PayoffVectors};
use crate::mechanism::{open_ledgers, MechanismConfig};
use crate::miner::{
    frequency_tracked_w_update, memorial_update, nonmemorial_update, update_w_values,
    ClassicalKind, CoopTally, MemorialState,
};
use crate::zd::recover_coefficients;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoolSpec {
    Fixed { strategy: MixedStrategy },
    Mechanism { low: f64, high: f64, zeta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinerSpec {
    Classical { strategy: ClassicalKind },
    Fixed { strategy: MixedStrategy },
    NonMemorial { q0: f64, epsilon: f64 },
    Memorial { p0: f64, q0: f64 },
}

impl MinerSpec {
    pub fn is_evolutionary(&self) -> bool {
        matches!(
            self,
            MinerSpec::NonMemorial { .. } | MinerSpec::Memorial { .. }
        )
    }

    fn fixed_strategy(&self) -> Option<MixedStrategy> {
        match *self {
            MinerSpec::Classical { strategy } => Some(strategy.as_mixed()),
            MinerSpec::Fixed { strategy } => Some(strategy),
            _ => None,
        }
    }
}

/// How a miner's cooperation maps to the power reading the pool observes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerModel {
    /// Full power when the miner cooperates this round, nothing otherwise.
    #[default]
    Sampled,
    /// The mean reading `q·P`, independent of the sampled action.
    Expected,
}

/// How random streams are assigned to `(repetition, miner)` pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamLayout {
    /// Miners within a repetition share one stream (common random numbers),
    /// so differences between miners come from their parameters alone.
    #[default]
    Common,
    /// Every `(repetition, miner)` pair has its own stream.
    Independent,
}

fn default_initial_state() -> GameState {
    GameState::CC
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub payoffs: PayoffVectors,
    pub rounds: usize,
    pub repetitions: usize,
    pub miner: MinerSpec,
    pub pool: PoolSpec,
    /// One entry per miner. May be empty for a fixed pool, meaning one miner.
    #[serde(default)]
    pub initial_powers: Vec<f64>,
    #[serde(default)]
    pub power_model: PowerModel,
    /// State treated as the previous round before the first round of play
    /// against a fixed pool, and for fixed miners' first move.
    #[serde(default = "default_initial_state")]
    pub initial_state: GameState,
    #[serde(default)]
    pub streams: StreamLayout,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn miners(&self) -> usize {
        self.initial_powers.len().max(1)
    }

    pub fn mechanism(&self) -> Option<MechanismConfig> {
        match self.pool {
            PoolSpec::Mechanism { low, high, zeta } => Some(MechanismConfig {
                rounds: self.rounds,
                miners: self.miners(),
                low,
                high,
                zeta,
                payoffs: self.payoffs,
            }),
            PoolSpec::Fixed { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidExperiment(msg.to_string()));
        if self.rounds == 0 {
            return bad("rounds must be at least 1");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        for &m in &self.initial_powers {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidPower(m));
            }
        }
        match self.miner {
            MinerSpec::NonMemorial { q0, epsilon } => {
                check_probability("q0", q0)?;
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(Error::NonPositiveParameter {
                        name: "epsilon",
                        value: epsilon,
                    });
                }
            }
            MinerSpec::Memorial { p0, q0 } => {
                check_probability("p0", p0)?;
                check_probability("q0", q0)?;
            }
            _ => {}
        }
        if let Some(mechanism) = self.mechanism() {
            if self.initial_powers.is_empty() {
                return bad("the mechanism needs at least one initial power");
            }
            mechanism.validate()?;
        }
        Ok(())
    }

    /// Stream id for a `(repetition, miner)` pair.
    pub fn stream(&self, repetition: usize, miner: usize) -> u64 {
        match self.streams {
            StreamLayout::Common => repetition as u64,
            StreamLayout::Independent => (repetition * self.miners() + miner) as u64,
        }
    }
}

/// Generator for one independent stream under a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw both players' actions independently. Two uniforms are consumed on
/// every call, so streams stay aligned across configurations.
pub fn play_round<R: Rng + ?Sized>(p_coop: f64, q_coop: f64, rng: &mut R) -> GameState {
    let u_pool: f64 = rng.random();
    let u_miner: f64 = rng.random();
    GameState::from_actions(
        Action::from_cooperate(u_pool < p_coop),
        Action::from_cooperate(u_miner < q_coop),
    )
}

/// Round-by-round record of one run. Index `t` is round `t + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub states: Vec<GameState>,
    pub pool_coop: Vec<bool>,
    pub miner_coop: Vec<bool>,
    pub pool_payoffs: Vec<f64>,
    pub miner_payoffs: Vec<f64>,
    /// Miner cooperation probability in force for the round.
    pub q_series: Vec<f64>,
    /// Pool cooperation probability in force for the round.
    pub p_series: Vec<f64>,
    /// Pool memory-one strategy after the round.
    pub strategies: Vec<[f64; 4]>,
    /// Miner payoff promised by the pool's strategy; `None` when a fixed
    /// pool strategy is not an equalizer.
    pub expected: Vec<Option<f64>>,
    /// Power reading observed by the mechanism; `None` against a fixed pool.
    pub powers: Vec<Option<f64>>,
    pub clamp_events: u64,
    pub degenerate_updates: u64,
}

impl Trajectory {
    fn with_capacity(seed: u64, stream: u64, rounds: usize) -> Self {
        Trajectory {
            seed,
            stream,
            states: Vec::with_capacity(rounds),
            pool_coop: Vec::with_capacity(rounds),
            miner_coop: Vec::with_capacity(rounds),
            pool_payoffs: Vec::with_capacity(rounds),
            miner_payoffs: Vec::with_capacity(rounds),
            q_series: Vec::with_capacity(rounds),
            p_series: Vec::with_capacity(rounds),
            strategies: Vec::with_capacity(rounds),
            expected: Vec::with_capacity(rounds),
            powers: Vec::with_capacity(rounds),
            clamp_events: 0,
            degenerate_updates: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        state: GameState,
        payoffs: &PayoffVectors,
        q: f64,
        p: f64,
        strategy: [f64; 4],
        expected: Option<f64>,
        power: Option<f64>,
    ) {
        self.states.push(state);
        self.pool_coop.push(state.pool_action().is_cooperate());
        self.miner_coop.push(state.miner_action().is_cooperate());
        self.pool_payoffs.push(payoffs.pool_at(state));
        self.miner_payoffs.push(payoffs.miner_at(state));
        self.q_series.push(q);
        self.p_series.push(p);
        self.strategies.push(strategy);
        self.expected.push(expected);
        self.powers.push(power);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn average_miner_payoff(&self) -> f64 {
        stats::tail_mean(&self.miner_payoffs, self.len())
    }

    pub fn average_pool_payoff(&self) -> f64 {
        stats::tail_mean(&self.pool_payoffs, self.len())
    }
}

/// Run one `(repetition, miner)` pair of an experiment.
pub fn run_single(
    config: &ExperimentConfig,
    repetition: usize,
    miner: usize,
) -> Result<Trajectory> {
    config.validate()?;
    if miner >= config.miners() {
        return Err(Error::DimensionMismatch {
            expected: config.miners(),
            actual: miner + 1,
        });
    }
    let stream = config.stream(repetition, miner);
    let mut rng = stream_rng(config.seed, stream);
    let mut trajectory = Trajectory::with_capacity(config.seed, stream, config.rounds);
    match config.pool {
        PoolSpec::Fixed { strategy } => {
            run_against_fixed(config, &strategy, &mut rng, &mut trajectory)?
        }
        PoolSpec::Mechanism { .. } => {
            run_against_mechanism(config, miner, &mut rng, &mut trajectory)?
        }
    }
    Ok(trajectory)
}

fn run_against_fixed(
    config: &ExperimentConfig,
    p: &MixedStrategy,
    rng: &mut ChaCha8Rng,
    out: &mut Trajectory,
) -> Result<()> {
    let payoffs = &config.payoffs;
    let promised = recover_coefficients(p, &payoffs.miner)
        .ok()
        .map(|c| -c.gamma / c.beta);
    let fixed_q = config.miner.fixed_strategy();
    let mut q = match config.miner {
        MinerSpec::NonMemorial { q0, .. } | MinerSpec::Memorial { q0, .. } => q0,
        _ => 0.0,
    };
    let mut tally = CoopTally::default();
    let mut prev = config.initial_state;
    for _ in 0..config.rounds {
        let p_coop = p.cooperation_after(prev);
        let q_coop = fixed_q.map_or(q, |s| s.cooperation_after(prev));
        let state = play_round(p_coop, q_coop, rng);
        out.push(state, payoffs, q_coop, p_coop, p.probs(), promised, None);
        // Evolutionary miners against a fixed pool use the static
        // conditional payoffs.
        match config.miner {
            MinerSpec::NonMemorial { epsilon, .. } => {
                let (w_c, w_d) = update_w_values(p.cooperation_after(state), payoffs);
                q = nonmemorial_update(w_c, w_d, epsilon);
            }
            MinerSpec::Memorial { .. } => {
                tally.record(state);
                let f_m = tally.miner_frequency();
                let (w_c, w_d) = update_w_values(tally.pool_frequency(), payoffs);
                let e_m = f_m * w_c + (1.0 - f_m) * w_d;
                let state = MemorialState {
                    q,
                    f_pool: tally.pool_frequency(),
                    f_miner: f_m,
                    w_coop: w_c,
                    w_defect: w_d,
                    e_m,
                };
                let outcome = memorial_update(&state);
                out.degenerate_updates += outcome.degenerate as u64;
                q = outcome.q;
            }
            _ => {}
        }
        prev = state;
    }
    Ok(())
}

fn run_against_mechanism(
    config: &ExperimentConfig,
    miner: usize,
    rng: &mut ChaCha8Rng,
    out: &mut Trajectory,
) -> Result<()> {
    let mechanism = config.mechanism().expect("mechanism pool");
    let payoffs = &config.payoffs;
    let fixed_q = config.miner.fixed_strategy();
    // First-round cooperation level; the first reading is that share of
    // the miner's full power.
    let (start_coop, pool_start) = match config.miner {
        MinerSpec::NonMemorial { q0, .. } => (q0, 1.0),
        MinerSpec::Memorial { p0, q0 } => (q0, p0),
        _ => (
            fixed_q
                .expect("fixed miner")
                .cooperation_after(config.initial_state),
            1.0,
        ),
    };
    let first: Vec<f64> = config
        .initial_powers
        .iter()
        .map(|&m| start_coop * m)
        .collect();
    let mut ledger = open_ledgers(&first, &mechanism)?.swap_remove(miner);
    let full_power = config.initial_powers[miner];

    let state = play_round(pool_start, if start_coop >= 1.0 { 1.0 } else { 0.0 }, rng);
    let strategy = ledger.last_strategy().strategy.probs();
    out.push(
        state,
        payoffs,
        start_coop,
        pool_start,
        strategy,
        Some(ledger.last_payoff()),
        Some(first[miner]),
    );

    let mut q = start_coop;
    let mut memorial = MemorialState {
        q,
        f_pool: pool_start,
        f_miner: start_coop,
        w_coop: ledger.quote(full_power, &mechanism)?.payoff,
        w_defect: mechanism.low,
        e_m: ledger.last_payoff(),
    };
    let mut tally = CoopTally::default();
    let mut prev = state;
    for _ in 1..config.rounds {
        let p_coop = ledger.last_strategy().strategy.cooperation_after(prev);
        let q_coop = fixed_q.map_or(q, |s| s.cooperation_after(prev));
        let state = play_round(p_coop, q_coop, rng);
        let reading = match config.power_model {
            PowerModel::Sampled if state.miner_action().is_cooperate() => full_power,
            PowerModel::Sampled => 0.0,
            PowerModel::Expected => q_coop * full_power,
        };
        let step = ledger.step(reading, &mechanism)?;
        out.clamp_events += step.clamped as u64;
        out.push(
            state,
            payoffs,
            q_coop,
            p_coop,
            step.strategy.strategy.probs(),
            Some(step.payoff),
            Some(reading),
        );

        match config.miner {
            MinerSpec::NonMemorial { epsilon, .. } => {
                // Cooperating pays what the mechanism would assign for full
                // power next round; defecting pays the minimum.
                let e_coop = ledger.quote(full_power, &mechanism)?.payoff;
                q = nonmemorial_update(e_coop, mechanism.low, epsilon);
            }
            MinerSpec::Memorial { .. } => {
                tally.record(state);
                memorial = frequency_tracked_w_update(&memorial, &tally, step.payoff)?;
                let outcome = memorial_update(&memorial);
                out.degenerate_updates += outcome.degenerate as u64;
                memorial.q = outcome.q;
                q = outcome.q;
            }
            _ => {}
        }
        prev = state;
    }
    Ok(())
}

/// One run of a fixed pool strategy against a fixed miner strategy.
pub fn run_fixed_zd(
    p: MixedStrategy,
    q: MixedStrategy,
    payoffs: PayoffVectors,
    rounds: usize,
    initial_state: GameState,
    seed: u64,
) -> Result<Trajectory> {
    let config = ExperimentConfig {
        payoffs,
        rounds,
        repetitions: 1,
        miner: MinerSpec::Fixed { strategy: q },
        pool: PoolSpec::Fixed { strategy: p },
        initial_powers: Vec::new(),
        power_model: PowerModel::Sampled,
        initial_state,
        streams: StreamLayout::Common,
        seed,
    };
    run_single(&config, 0, 0)
}
