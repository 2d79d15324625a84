//! Miner-side agents: classical memory-one strategies and the two
//! evolutionary update rules.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::game::{GameState, MixedStrategy, PayoffVectors};
use crate::tolerance::MIN_PAYOFF_DIVISOR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ClassicalKind {
    Allc,
    Alld,
    Tft,
    Wsls,
}

impl ClassicalKind {
    pub const ALL: [ClassicalKind; 4] = [
        ClassicalKind::Allc,
        ClassicalKind::Alld,
        ClassicalKind::Tft,
        ClassicalKind::Wsls,
    ];

    pub fn probs(self) -> [f64; 4] {
        match self {
            ClassicalKind::Allc => [1.0, 1.0, 1.0, 1.0],
            ClassicalKind::Alld => [0.0, 0.0, 0.0, 0.0],
            // Repeats the pool's previous move.
            ClassicalKind::Tft => [1.0, 1.0, 0.0, 0.0],
            ClassicalKind::Wsls => [1.0, 0.0, 0.0, 1.0],
        }
    }

    pub fn as_mixed(self) -> MixedStrategy {
        MixedStrategy::new(self.probs()).expect("classical strategies are valid")
    }

    pub fn cooperation_prob(self, previous: GameState) -> f64 {
        self.probs()[previous.index()]
    }

    pub fn label(self) -> &'static str {
        match self {
            ClassicalKind::Allc => "ALLC",
            ClassicalKind::Alld => "ALLD",
            ClassicalKind::Tft => "TFT",
            ClassicalKind::Wsls => "WSLS",
        }
    }
}

impl std::fmt::Display for ClassicalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ClassicalKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ClassicalKind::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown classical strategy `{s}` (expected ALLC, ALLD, TFT or WSLS)")
            })
    }
}

/// Logistic function, evaluated without overflow for any finite input.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Non-memorial rule: cooperate with probability `σ(ε(E_c − E_d))`.
pub fn nonmemorial_update(e_coop: f64, e_defect: f64, epsilon: f64) -> f64 {
    sigmoid(epsilon * (e_coop - e_defect))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonMemorialState {
    pub q: f64,
    pub epsilon: f64,
}

impl NonMemorialState {
    pub fn new(q: f64, epsilon: f64) -> Result<Self> {
        check_probability("q", q)?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: "epsilon",
                value: epsilon,
            });
        }
        Ok(NonMemorialState { q, epsilon })
    }

    pub fn update(&mut self, e_coop: f64, e_defect: f64) {
        self.q = nonmemorial_update(e_coop, e_defect, self.epsilon);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorialState {
    pub q: f64,
    pub f_pool: f64,
    pub f_miner: f64,
    pub w_coop: f64,
    pub w_defect: f64,
    pub e_m: f64,
}

impl MemorialState {
    /// `E_m` implied by the current frequencies and conditional payoffs.
    pub fn implied_payoff(&self) -> f64 {
        self.f_miner * self.w_coop + (1.0 - self.f_miner) * self.w_defect
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemorialOutcome {
    pub q: f64,
    /// `E_m` was too small to divide by; `q` was left unchanged.
    pub degenerate: bool,
}

/// Memorial rule: `q' = clamp(q · W_c / E_m, 0, 1)`.
pub fn memorial_update(state: &MemorialState) -> MemorialOutcome {
    if !(state.e_m > MIN_PAYOFF_DIVISOR) {
        return MemorialOutcome {
            q: state.q,
            degenerate: true,
        };
    }
    MemorialOutcome {
        q: (state.q * state.w_coop / state.e_m).clamp(0.0, 1.0),
        degenerate: false,
    }
}

/// Static conditional payoffs `(W_c, W_d)` against a pool cooperating with
/// probability `p`.
pub fn update_w_values(p: f64, payoffs: &PayoffVectors) -> (f64, f64) {
    let [cc, cd, dc, dd] = payoffs.miner;
    (p * cc + (1.0 - p) * dc, p * cd + (1.0 - p) * dd)
}

/// Running cooperation counts over played rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoopTally {
    pub rounds: u64,
    pub pool_coops: u64,
    pub miner_coops: u64,
    pub last_miner_coop: bool,
}

impl CoopTally {
    pub fn record(&mut self, state: GameState) {
        let pool = state.pool_action().is_cooperate();
        let miner = state.miner_action().is_cooperate();
        self.rounds += 1;
        self.pool_coops += pool as u64;
        self.miner_coops += miner as u64;
        self.last_miner_coop = miner;
    }

    pub fn from_states(states: &[GameState]) -> Self {
        let mut tally = CoopTally::default();
        for &s in states {
            tally.record(s);
        }
        tally
    }

    pub fn pool_frequency(&self) -> f64 {
        clamp_frequency(
            self.pool_coops as f64 / self.rounds.max(1) as f64,
            self.rounds,
        )
    }

    pub fn miner_frequency(&self) -> f64 {
        clamp_frequency(
            self.miner_coops as f64 / self.rounds.max(1) as f64,
            self.rounds,
        )
    }
}

/// Clamp an empirical frequency after `t` rounds to `[1/t, 1 − 1/t]`, with
/// `t` floored at 2 so the interval is never empty.
pub fn clamp_frequency(f: f64, t: u64) -> f64 {
    let t = t.max(2) as f64;
    f.clamp(1.0 / t, 1.0 - 1.0 / t)
}

/// Re-estimate the conditional payoffs from the latest announced `E_m`.
///
/// After a cooperative round `W_c` absorbs the change with `W_d` fixed;
/// after a defective round `W_d` absorbs it with `W_c` fixed. `q` is carried
/// over; apply [`memorial_update`] to the result for the next probability.
pub fn frequency_tracked_w_update(
    prev: &MemorialState,
    tally: &CoopTally,
    e_m: f64,
) -> Result<MemorialState> {
    if tally.rounds == 0 {
        return Err(Error::EmptyHistory);
    }
    let f_pool = tally.pool_frequency();
    let f_miner = tally.miner_frequency();
    let (mut w_coop, mut w_defect) = (prev.w_coop, prev.w_defect);
    if tally.last_miner_coop {
        w_coop = (e_m - (1.0 - f_miner) * w_defect) / f_miner;
    } else {
        w_defect = (e_m - f_miner * w_coop) / (1.0 - f_miner);
    }
    Ok(MemorialState {
        q: prev.q,
        f_pool,
        f_miner,
        w_coop,
        w_defect,
        e_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAYOFFS: PayoffVectors = PayoffVectors {
        pool: [3.0, 0.0, 5.0, 2.0],
        miner: [3.0, 5.0, 0.0, 2.0],
    };

    fn mem(q: f64, w_coop: f64, w_defect: f64, e_m: f64) -> MemorialState {
        MemorialState {
            q,
            f_pool: 0.5,
            f_miner: 0.5,
            w_coop,
            w_defect,
            e_m,
        }
    }

    #[test]
    fn classical_components() {
        assert_eq!(ClassicalKind::Tft.cooperation_prob(GameState::DC), 0.0);
        assert_eq!(ClassicalKind::Wsls.cooperation_prob(GameState::DD), 1.0);
        for s in GameState::ALL {
            assert_eq!(ClassicalKind::Alld.cooperation_prob(s), 0.0);
            assert_eq!(ClassicalKind::Allc.cooperation_prob(s), 1.0);
        }
        assert_eq!("wsls".parse::<ClassicalKind>(), Ok(ClassicalKind::Wsls));
        assert!("grim".parse::<ClassicalKind>().is_err());
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(nonmemorial_update(2.5, 2.5, 5.0), 0.5);
        assert!((nonmemorial_update(3.0, 2.0, 5.0) - 0.993_307_149_075_715).abs() < 1e-15);
        let eight = nonmemorial_update(3.0, 2.0, 8.0);
        assert!((eight - 0.999_664_649_869_533_8).abs() < 1e-15);
        assert!(eight > nonmemorial_update(3.0, 2.0, 5.0));
        assert_eq!(sigmoid(-1e4), 0.0);
        assert_eq!(sigmoid(1e4), 1.0);
    }

    #[test]
    fn memorial_examples() {
        assert_eq!(memorial_update(&mem(1.0, 2.7, 2.0, 2.7)).q, 1.0);
        assert_eq!(memorial_update(&mem(0.5, 3.0, 2.0, 4.0)).q, 0.375);
        assert!((memorial_update(&mem(0.5, 2.8, 2.0, 2.0)).q - 0.7).abs() < 1e-15);
        assert_eq!(memorial_update(&mem(0.9, 3.0, 2.0, 2.0)).q, 1.0);
        let degenerate = memorial_update(&mem(0.4, 3.0, 2.0, 0.0));
        assert!(degenerate.degenerate && degenerate.q == 0.4);
    }

    #[test]
    fn static_w_values() {
        assert_eq!(update_w_values(1.0, &PAYOFFS), (3.0, 5.0));
        assert_eq!(update_w_values(0.0, &PAYOFFS), (0.0, 2.0));
        assert_eq!(update_w_values(0.5, &PAYOFFS), (1.5, 3.5));
    }

    #[test]
    fn frequency_clamp() {
        assert_eq!(clamp_frequency(1.0, 2), 0.5);
        assert_eq!(clamp_frequency(0.0, 1), 0.5);
        assert_eq!(clamp_frequency(0.0, 10), 0.1);
        assert_eq!(clamp_frequency(0.3, 10), 0.3);
    }

    #[test]
    fn frequency_tracked_arithmetic() {
        let prev = mem(0.5, 3.0, 2.0, 2.5);
        // One cooperative and one defective round: f_m = 0.5.
        let mut tally = CoopTally::from_states(&[GameState::CD, GameState::CC]);
        let after_coop = frequency_tracked_w_update(&prev, &tally, 2.5).unwrap();
        assert_eq!((after_coop.w_coop, after_coop.w_defect), (3.0, 2.0));

        tally = CoopTally::from_states(&[GameState::CC, GameState::DD]);
        let after_defect = frequency_tracked_w_update(&prev, &tally, 2.1).unwrap();
        assert!((after_defect.w_defect - 1.2).abs() < 1e-12);
        assert_eq!(after_defect.w_coop, 3.0);
        assert!((after_defect.implied_payoff() - 2.1).abs() < 1e-12);

        assert_eq!(
            frequency_tracked_w_update(&prev, &CoopTally::default(), 2.0),
            Err(Error::EmptyHistory)
        );
    }
}
