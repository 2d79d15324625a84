//! Published experiment constants and the figure presets built from them.
//!
//! The mechanism bounds `L`, `H` and the scaling `ζ` are not published;
//! `L` and `H` are set to the edges of the controllable range and `ζ` is
//! large enough that a full-power return after a defection is rewarded
//! well above `L`.

use crate::game::{GameParameters, GameState, MixedStrategy, PayoffVectors};
use crate::miner::ClassicalKind;
use crate::sim::{ExperimentConfig, MinerSpec, PoolSpec, PowerModel, StreamLayout};

pub const GAME: GameParameters = GameParameters {
    k_pool: 3.0,
    k_miner: 3.0,
    pi: 3.0,
    mu: 2.0,
    sigma: 2.0,
    rho: 3.0,
};
pub const PAYOFFS: PayoffVectors = PayoffVectors {
    pool: [3.0, 0.0, 5.0, 2.0],
    miner: [3.0, 5.0, 0.0, 2.0],
};
pub const FIXED_ZD: [f64; 4] = [0.9, 0.3, 0.8, 0.2];
pub const INITIAL_POWERS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
pub const INITIAL_COOPERATION: [f64; 4] = [0.01, 0.1, 0.5, 0.8];
pub const EPSILONS: [f64; 2] = [5.0, 8.0];
pub const REPETITIONS: usize = 100;
pub const FIGURE_HORIZON: usize = 500;
pub const FIXED_ZD_HORIZON: usize = 1000;
pub const LONG_RUN_ROUNDS: usize = 10_000;
pub const LOW: f64 = 2.0;
pub const HIGH: f64 = 3.0;
pub const ZETA: f64 = 2.5;
pub const DEFAULT_SEED: u64 = 2024;

pub fn mechanism_pool() -> PoolSpec {
    PoolSpec::Mechanism {
        low: LOW,
        high: HIGH,
        zeta: ZETA,
    }
}

pub fn fixed_zd() -> MixedStrategy {
    MixedStrategy::new(FIXED_ZD).expect("published strategy is valid")
}

/// A labelled experiment inside a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetSeries {
    pub label: String,
    pub config: ExperimentConfig,
}

fn base(
    miner: MinerSpec,
    pool: PoolSpec,
    rounds: usize,
    powers: Vec<f64>,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        payoffs: PAYOFFS,
        rounds,
        repetitions: REPETITIONS,
        miner,
        pool,
        initial_powers: powers,
        power_model: PowerModel::Sampled,
        initial_state: GameState::CC,
        streams: StreamLayout::Common,
        seed,
    }
}

/// Experiments behind figure `n` (1–4), or `None` for any other id.
pub fn figure(n: u8, seed: u64) -> Option<Vec<PresetSeries>> {
    let series = match n {
        1 => ClassicalKind::ALL
            .into_iter()
            .map(|kind| PresetSeries {
                label: kind.label().to_string(),
                config: base(
                    MinerSpec::Classical { strategy: kind },
                    PoolSpec::Fixed {
                        strategy: fixed_zd(),
                    },
                    FIXED_ZD_HORIZON,
                    Vec::new(),
                    seed,
                ),
            })
            .collect(),
        2 | 3 => {
            let epsilon = EPSILONS[(n - 2) as usize];
            INITIAL_COOPERATION
                .into_iter()
                .map(|q0| PresetSeries {
                    label: format!("q0={q0}"),
                    config: base(
                        MinerSpec::NonMemorial { q0, epsilon },
                        mechanism_pool(),
                        FIGURE_HORIZON,
                        INITIAL_POWERS.to_vec(),
                        seed,
                    ),
                })
                .collect()
        }
        4 => INITIAL_COOPERATION
            .into_iter()
            .map(|q0| PresetSeries {
                label: format!("p0=q0={q0}"),
                config: base(
                    MinerSpec::Memorial { p0: q0, q0 },
                    mechanism_pool(),
                    FIGURE_HORIZON,
                    INITIAL_POWERS.to_vec(),
                    seed,
                ),
            })
            .collect(),
        _ => return None,
    };
    Some(series)
}

/// Long-horizon mechanism run for realized payoffs.
pub fn long_run(miner: MinerSpec, seed: u64) -> ExperimentConfig {
    base(
        miner,
        mechanism_pool(),
        LONG_RUN_ROUNDS,
        INITIAL_POWERS.to_vec(),
        seed,
    )
}
