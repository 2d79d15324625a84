//! The ZD-based incentive mechanism run by the pool over many miners.
//!
//! Each round the pool reads every miner's devoted computing power. A drop
//! is punished with the minimum payoff `L`, an unchanged reading keeps the
//! previous payoff, and an increase earns `H·σ(ζ·y)` with
//! `y = (Δm/B + 1)·E_prev`. The payoff is then enforced by an equalizer ZD
//! strategy, so the promise holds whatever the miner does next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::PayoffVectors;
use crate::miner::sigmoid;
use crate::zd::{feasible_scale, strategy_for_target, ZdStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismConfig {
    /// Total rounds, including the initialization round.
    pub rounds: usize,
    pub miners: usize,
    pub low: f64,
    pub high: f64,
    pub zeta: f64,
    pub payoffs: PayoffVectors,
}

impl MechanismConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMechanism(msg));
        if self.rounds == 0 || self.miners == 0 {
            return bad(format!(
                "rounds ({}) and miners ({}) must be positive",
                self.rounds, self.miners
            ));
        }
        if !(self.low < self.high) {
            return bad(format!("L = {} must be below H = {}", self.low, self.high));
        }
        let [cc, _, _, dd] = self.payoffs.miner;
        if self.low < dd || self.high > cc {
            return bad(format!(
                "[L, H] = [{}, {}] must lie within [S_m^dd, S_m^cc] = [{dd}, {cc}]",
                self.low, self.high
            ));
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return bad(format!("zeta must be positive, got {}", self.zeta));
        }
        // Feasibility is linear in the target, so the endpoints decide it.
        for t in [self.low, self.high] {
            feasible_scale(t, &self.payoffs.miner)?;
        }
        Ok(())
    }
}

/// Per-miner mechanism state and history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerLedger {
    pub miner_id: usize,
    pub powers: Vec<f64>,
    pub best: f64,
    pub best_history: Vec<f64>,
    pub payoffs: Vec<f64>,
    pub strategies: Vec<ZdStrategy>,
    /// Rounds where `H·σ(ζy)` fell below `L` and was raised to `L`.
    pub clamp_events: u64,
}

/// Result of evaluating one power reading against a ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quote {
    pub delta: f64,
    pub best: f64,
    pub payoff: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub delta: f64,
    pub payoff: f64,
    pub strategy: ZdStrategy,
    pub clamped: bool,
}

fn check_power(m: f64) -> Result<f64> {
    if m.is_finite() && m >= 0.0 {
        Ok(m)
    } else {
        Err(Error::InvalidPower(m))
    }
}

/// Initial payoffs `m_i/Σm · (H − L) + L`.
pub fn initial_rewards(powers: &[f64], config: &MechanismConfig) -> Result<Vec<f64>> {
    if powers.len() != config.miners {
        return Err(Error::DimensionMismatch {
            expected: config.miners,
            actual: powers.len(),
        });
    }
    for &m in powers {
        check_power(m)?;
    }
    let total: f64 = powers.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(powers
        .iter()
        .map(|m| m / total * (config.high - config.low) + config.low)
        .collect())
}

/// Open one ledger per miner from the first-round readings.
pub fn open_ledgers(powers: &[f64], config: &MechanismConfig) -> Result<Vec<MinerLedger>> {
    config.validate()?;
    let rewards = initial_rewards(powers, config)?;
    powers
        .iter()
        .zip(rewards)
        .enumerate()
        .map(|(miner_id, (&m, e))| {
            Ok(MinerLedger {
                miner_id,
                powers: vec![m],
                best: m,
                best_history: vec![m],
                payoffs: vec![e],
                strategies: vec![strategy_for_target(e, &config.payoffs.miner)?],
                clamp_events: 0,
            })
        })
        .collect()
}

impl MinerLedger {
    pub fn last_power(&self) -> f64 {
        *self.powers.last().expect("ledger opened with one reading")
    }

    pub fn last_payoff(&self) -> f64 {
        *self.payoffs.last().expect("ledger opened with one reading")
    }

    pub fn last_strategy(&self) -> &ZdStrategy {
        self.strategies
            .last()
            .expect("ledger opened with one reading")
    }

    pub fn rounds(&self) -> usize {
        self.powers.len()
    }

    /// Payoff the mechanism would assign for reading `m_new`, without
    /// recording it.
    pub fn quote(&self, m_new: f64, config: &MechanismConfig) -> Result<Quote> {
        check_power(m_new)?;
        let delta = m_new - self.last_power();
        let e_prev = self.last_payoff();
        if delta < 0.0 {
            return Ok(Quote {
                delta,
                best: self.best,
                payoff: config.low,
                clamped: false,
            });
        }
        if delta == 0.0 {
            return Ok(Quote {
                delta,
                best: self.best,
                payoff: e_prev,
                clamped: false,
            });
        }
        let best = self.best.max(m_new);
        let y = (delta / best + 1.0) * e_prev;
        let raw = config.high * sigmoid(config.zeta * y);
        let clamped = raw < config.low;
        Ok(Quote {
            delta,
            best,
            payoff: if clamped { config.low } else { raw },
            clamped,
        })
    }

    /// Record reading `m_new` and assign this round's payoff and strategy.
    pub fn step(&mut self, m_new: f64, config: &MechanismConfig) -> Result<StepOutcome> {
        let quote = self.quote(m_new, config)?;
        let strategy = if quote.delta == 0.0 {
            *self.last_strategy()
        } else {
            strategy_for_target(quote.payoff, &config.payoffs.miner)?
        };
        self.powers.push(m_new);
        self.best = quote.best;
        self.best_history.push(quote.best);
        self.payoffs.push(quote.payoff);
        self.strategies.push(strategy);
        self.clamp_events += quote.clamped as u64;
        Ok(StepOutcome {
            delta: quote.delta,
            payoff: quote.payoff,
            strategy,
            clamped: quote.clamped,
        })
    }

    pub fn records(&self) -> Vec<LedgerRecord> {
        (0..self.rounds())
            .map(|j| {
                let [p1, p2, p3, p4] = self.strategies[j].strategy.probs();
                LedgerRecord {
                    round: j + 1,
                    miner_id: self.miner_id,
                    m: self.powers[j],
                    delta_m: if j == 0 {
                        0.0
                    } else {
                        self.powers[j] - self.powers[j - 1]
                    },
                    best: self.best_history[j],
                    e: self.payoffs[j],
                    p1,
                    p2,
                    p3,
                    p4,
                }
            })
            .collect()
    }
}

/// One ledger row, for tabular export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub round: usize,
    pub miner_id: usize,
    pub m: f64,
    pub delta_m: f64,
    #[serde(rename = "B")]
    pub best: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

/// Run the mechanism over a full schedule: `schedule[i][j]` is miner `i`'s
/// reading in round `j + 1`.
pub fn run_mechanism(schedule: &[Vec<f64>], config: &MechanismConfig) -> Result<Vec<MinerLedger>> {
    if schedule.len() != config.miners {
        return Err(Error::DimensionMismatch {
            expected: config.miners,
            actual: schedule.len(),
        });
    }
    if let Some(row) = schedule.iter().find(|row| row.len() != config.rounds) {
        return Err(Error::DimensionMismatch {
            expected: config.rounds,
            actual: row.len(),
        });
    }
    let first: Vec<f64> = schedule.iter().map(|row| row[0]).collect();
    let mut ledgers = open_ledgers(&first, config)?;
    for (ledger, row) in ledgers.iter_mut().zip(schedule) {
        for &m in &row[1..] {
            ledger.step(m, config)?;
        }
    }
    Ok(ledgers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zd::controlled_payoff;

    fn config(miners: usize, zeta: f64) -> MechanismConfig {
        MechanismConfig {
            rounds: 5,
            miners,
            low: 2.0,
            high: 3.0,
            zeta,
            payoffs: PayoffVectors {
                pool: [3.0, 0.0, 5.0, 2.0],
                miner: [3.0, 5.0, 0.0, 2.0],
            },
        }
    }

    fn ledger(m_prev: f64, best: f64, e_prev: f64, cfg: &MechanismConfig) -> MinerLedger {
        MinerLedger {
            miner_id: 0,
            powers: vec![m_prev],
            best,
            best_history: vec![best],
            payoffs: vec![e_prev],
            strategies: vec![strategy_for_target(e_prev, &cfg.payoffs.miner).unwrap()],
            clamp_events: 0,
        }
    }

    #[test]
    fn initial_reward_examples() {
        let r = initial_rewards(&[1.0, 2.0, 3.0, 4.0], &config(4, 1.0)).unwrap();
        for (a, b) in r.iter().zip([2.1, 2.2, 2.3, 2.4]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(initial_rewards(&[5.0], &config(1, 1.0)).unwrap(), vec![3.0]);
        assert_eq!(
            initial_rewards(&[1.0, 1.0], &config(2, 1.0)).unwrap(),
            vec![2.5, 2.5]
        );
        assert_eq!(
            initial_rewards(&[0.0, 0.0], &config(2, 1.0)),
            Err(Error::ZeroPower)
        );
        assert!(matches!(
            initial_rewards(&[1.0], &config(2, 1.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unchanged_power_carries_payoff_and_strategy() {
        let cfg = config(1, 1.0);
        let mut l = ledger(3.0, 4.0, 2.3, &cfg);
        let before = *l.last_strategy();
        let out = l.step(3.0, &cfg).unwrap();
        assert_eq!(out.payoff, 2.3);
        assert_eq!(out.strategy, before);
    }

    #[test]
    fn power_drop_is_punished() {
        let cfg = config(1, 1.0);
        let mut l = ledger(4.0, 4.0, 2.4, &cfg);
        let out = l.step(3.0, &cfg).unwrap();
        assert_eq!(out.payoff, 2.0);
        let [p1, _, _, p4] = out.strategy.strategy.probs();
        assert!((controlled_payoff(p1, p4, &cfg.payoffs.miner).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_rise_rewards_through_sigmoid() {
        let cfg = config(1, 1.0);
        let mut l = ledger(2.0, 4.0, 2.2, &cfg);
        let out = l.step(3.0, &cfg).unwrap();
        let expected = 3.0 / (1.0 + (-2.75f64).exp());
        assert!((out.payoff - expected).abs() < 1e-12);
        assert!((out.payoff - 2.819_74).abs() < 1e-5);
        assert_eq!(l.best, 4.0);
    }

    #[test]
    fn record_power_updates_best_before_reward() {
        let cfg = config(1, 1.0);
        let mut l = ledger(2.0, 2.0, 2.2, &cfg);
        let out = l.step(6.0, &cfg).unwrap();
        // y = (4/6 + 1)·2.2 with the new best of 6.
        let y = (4.0 / 6.0 + 1.0) * 2.2;
        assert!((out.payoff - 3.0 * sigmoid(y)).abs() < 1e-12);
        assert_eq!(l.best, 6.0);
    }

    #[test]
    fn low_sigmoid_corner_is_clamped() {
        let cfg = MechanismConfig {
            low: 2.9,
            ..config(1, 0.1)
        };
        let mut l = ledger(1.0, 1.0, 2.9, &cfg);
        let out = l.step(1.5, &cfg).unwrap();
        assert!(out.clamped);
        assert_eq!(out.payoff, 2.9);
        assert_eq!(l.clamp_events, 1);
    }

    #[test]
    fn schedules() {
        let cfg = config(1, 1.0);
        let constant = run_mechanism(&[vec![2.0; 5]], &cfg).unwrap();
        assert!(constant[0].payoffs.iter().all(|&e| e == 3.0));

        let decreasing = run_mechanism(&[vec![5.0, 4.0, 3.0, 2.0, 1.0]], &cfg).unwrap();
        assert_eq!(decreasing[0].payoffs, vec![3.0, 2.0, 2.0, 2.0, 2.0]);

        // Doubling keeps Δm/B fixed, so y grows with E_prev alone.
        let cfg2 = config(2, 2.5);
        let rising = run_mechanism(&[vec![1.0, 2.0, 4.0, 8.0, 16.0], vec![4.0; 5]], &cfg2).unwrap();
        let e = &rising[0].payoffs;
        assert!(e.windows(2).all(|w| w[1] >= w[0]), "{e:?}");
        assert!(3.0 - e[4] < 0.01);
        assert_eq!(rising[0].records().len(), 5);

        assert!(matches!(
            run_mechanism(&[vec![1.0; 4]], &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(config(4, 2.5).validate().is_ok());
        assert!(MechanismConfig {
            low: 3.0,
            ..config(4, 2.5)
        }
        .validate()
        .is_err());
        assert!(MechanismConfig {
            high: 3.5,
            ..config(4, 2.5)
        }
        .validate()
        .is_err());
        assert!(MechanismConfig {
            zeta: 0.0,
            ..config(4, 2.5)
        }
        .validate()
        .is_err());
    }
}
