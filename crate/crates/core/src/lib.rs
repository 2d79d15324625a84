//! Zero-determinant pooled-mining engine.
//!
//! The pool and a miner play an iterated prisoner's dilemma over the four
//! joint outcomes `CC, CD, DC, DD` (pool action first). The pool acts as a
//! zero-determinant (ZD) player: by choosing a memory-one strategy of the
//! equalizer form it pins the miner's long-run expected payoff to any value
//! in `[S_m^dd, S_m^cc]`, whatever the miner does. The incentive mechanism
//! uses that lever round by round to reward miners that keep or raise their
//! devoted computing power and to punish miners whose power drops.
//!
//! Module map:
//!
//! * [`game`]: payoff model, strategies, PD/IPD classification.
//! * [`markov`]: transition matrix, stationary distribution, the
//!   Press–Dyson determinant and expected payoffs.
//! * [`zd`]: ZD strategy synthesis for controlling the miner's payoff, and
//!   the self-control infeasibility sweep.
//! * [`miner`]: classical memory-one miners and the two evolutionary update
//!   rules (non-memorial sigmoid, memorial multiplicative).
//! * [`mechanism`]: the multi-miner ZD incentive mechanism.
//! * [`sim`]: seeded iterated-play executor, experiments and statistics.
//! * [`presets`]: the published experiment constants.

// `!(x > y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod game;
pub mod linalg;
pub mod markov;
pub mod mechanism;
pub mod miner;
pub mod presets;
pub mod sim;
pub mod tolerance;
pub mod zd;

pub use error::{Error, Result};
pub use game::{
    classify_game, Action, ClassificationReport, GameClass, GameParameters, GameState,
    MixedStrategy, PayoffVectors,
};
pub use markov::{
    expected_payoffs, press_dyson_determinant, stationary_distribution, transition_matrix,
    ExpectedPayoffs, StationaryDistribution, TransitionMatrix,
};
pub use mechanism::{MechanismConfig, MinerLedger};
pub use miner::{ClassicalKind, MemorialState};
pub use zd::{ZdCoefficients, ZdStrategy};
