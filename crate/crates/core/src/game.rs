//! The pool-vs-miner stage game.
//!
//! States are ordered `CC < CD < DC < DD`, pool action first; every 4-vector
//! in the crate is indexed in that order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Cooperate,
    Defect,
}

impl Action {
    pub fn is_cooperate(self) -> bool {
        self == Action::Cooperate
    }

    pub fn from_cooperate(cooperate: bool) -> Self {
        if cooperate {
            Action::Cooperate
        } else {
            Action::Defect
        }
    }
}

/// Joint outcome of one round. The first letter is the pool's action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GameState {
    CC,
    CD,
    DC,
    DD,
}

impl GameState {
    pub const ALL: [GameState; 4] = [GameState::CC, GameState::CD, GameState::DC, GameState::DD];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn from_actions(pool: Action, miner: Action) -> Self {
        match (pool, miner) {
            (Action::Cooperate, Action::Cooperate) => GameState::CC,
            (Action::Cooperate, Action::Defect) => GameState::CD,
            (Action::Defect, Action::Cooperate) => GameState::DC,
            (Action::Defect, Action::Defect) => GameState::DD,
        }
    }

    pub fn pool_action(self) -> Action {
        Action::from_cooperate(matches!(self, GameState::CC | GameState::CD))
    }

    pub fn miner_action(self) -> Action {
        Action::from_cooperate(matches!(self, GameState::CC | GameState::DC))
    }

    pub fn label(self) -> &'static str {
        match self {
            GameState::CC => "cc",
            GameState::CD => "cd",
            GameState::DC => "dc",
            GameState::DD => "dd",
        }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The six scalars of the parametric bimatrix.
///
/// `k_pool`/`k_miner` are the mutual-cooperation payoffs. A defecting miner
/// gains `sigma` and costs the pool `pi`; a defecting pool gains `mu` and
/// costs the miner `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParameters {
    pub k_pool: f64,
    pub k_miner: f64,
    pub pi: f64,
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
}

impl GameParameters {
    pub fn new(k_pool: f64, k_miner: f64, pi: f64, mu: f64, sigma: f64, rho: f64) -> Result<Self> {
        let params = GameParameters {
            k_pool,
            k_miner,
            pi,
            mu,
            sigma,
            rho,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("pi", self.pi),
            ("mu", self.mu),
            ("sigma", self.sigma),
            ("rho", self.rho),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveParameter { name, value });
            }
        }
        for (name, value) in [("k_pool", self.k_pool), ("k_miner", self.k_miner)] {
            if !value.is_finite() {
                return Err(Error::NonPositiveParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Per-state payoff vectors `S_p` (pool) and `S_m` (miner).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffVectors {
    pub pool: [f64; 4],
    pub miner: [f64; 4],
}

impl PayoffVectors {
    pub fn pool_at(&self, state: GameState) -> f64 {
        self.pool[state.index()]
    }

    pub fn miner_at(&self, state: GameState) -> f64 {
        self.miner[state.index()]
    }

    /// `S_m^cc − S_m^dd`, the width of the controllable range.
    pub fn miner_spread(&self) -> f64 {
        self.miner[0] - self.miner[3]
    }
}

impl TryFrom<GameParameters> for PayoffVectors {
    type Error = Error;

    fn try_from(params: GameParameters) -> Result<Self> {
        build_payoff_vectors(&params)
    }
}

pub fn build_payoff_vectors(params: &GameParameters) -> Result<PayoffVectors> {
    params.validate()?;
    let GameParameters {
        k_pool,
        k_miner,
        pi,
        mu,
        sigma,
        rho,
    } = *params;
    Ok(PayoffVectors {
        pool: [k_pool, k_pool - pi, k_pool + mu, k_pool - pi + mu],
        miner: [
            k_miner,
            k_miner + sigma,
            k_miner - rho,
            k_miner + sigma - rho,
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameClass {
    Ipd,
    PdOnly,
    Neither,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameClass::Ipd => "IPD",
            GameClass::PdOnly => "PD_only",
            GameClass::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub label: String,
    pub holds: bool,
}

impl Inequality {
    fn new(label: &str, holds: bool) -> Self {
        Inequality {
            label: label.to_string(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub class: GameClass,
    /// The four stated conditions, in the order `pi>mu, rho>sigma, mu<rho, sigma<pi`.
    pub conditions: Vec<Inequality>,
    /// Implied relations surfaced for inspection: the iterated-game pair and
    /// `W_cc > W_dd`.
    pub derived: Vec<Inequality>,
}

impl ClassificationReport {
    pub fn all_conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

/// Classifies the game. `IPD` needs all four strict inequalities. `PD_only`
/// covers the case where the welfare conditions (`sigma < pi`, `mu < rho`)
/// hold but the repeated-play pair (`pi > mu`, `rho > sigma`) does not.
pub fn classify_game(params: &GameParameters) -> Result<ClassificationReport> {
    params.validate()?;
    let GameParameters {
        k_pool,
        k_miner,
        pi,
        mu,
        sigma,
        rho,
    } = *params;
    let conditions = vec![
        Inequality::new("pi > mu", pi > mu),
        Inequality::new("rho > sigma", rho > sigma),
        Inequality::new("mu < rho", mu < rho),
        Inequality::new("sigma < pi", sigma < pi),
    ];
    let pool_repeat = 2.0 * k_pool > (k_pool + mu) + (k_pool - pi);
    let miner_repeat = 2.0 * k_miner > (k_miner + sigma) + (k_miner - rho);
    let derived = vec![
        Inequality::new("2K_p > (K_p + mu) + (K_p - pi)", pool_repeat),
        Inequality::new("2K_m > (K_m + sigma) + (K_m - rho)", miner_repeat),
        Inequality::new("W_cc > W_dd (pi + rho > sigma + mu)", pi + rho > sigma + mu),
    ];
    let welfare = sigma < pi && mu < rho;
    let repeat = pi > mu && rho > sigma;
    let class = match (welfare, repeat) {
        (true, true) => GameClass::Ipd,
        (true, false) => GameClass::PdOnly,
        _ => GameClass::Neither,
    };
    Ok(ClassificationReport {
        class,
        conditions,
        derived,
    })
}

/// A memory-one strategy: cooperation probabilities conditioned on the
/// previous joint outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct MixedStrategy([f64; 4]);

impl MixedStrategy {
    pub const ALL_COOPERATE: MixedStrategy = MixedStrategy([1.0; 4]);

    pub fn new(probs: [f64; 4]) -> Result<Self> {
        const NAMES: [&str; 4] = ["p1", "p2", "p3", "p4"];
        for (name, &p) in NAMES.iter().zip(&probs) {
            check_probability(name, p)?;
        }
        Ok(MixedStrategy(probs))
    }

    /// Constant cooperation probability regardless of history.
    pub fn constant(p: f64) -> Result<Self> {
        Self::new([p; 4])
    }

    pub fn probs(&self) -> [f64; 4] {
        self.0
    }

    pub fn cooperation_after(&self, previous: GameState) -> f64 {
        self.0[previous.index()]
    }

    /// True when every component lies strictly inside (0, 1).
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&p| p > 0.0 && p < 1.0)
    }
}

impl TryFrom<[f64; 4]> for MixedStrategy {
    type Error = Error;

    fn try_from(probs: [f64; 4]) -> Result<Self> {
        MixedStrategy::new(probs)
    }
}

impl From<MixedStrategy> for [f64; 4] {
    fn from(s: MixedStrategy) -> Self {
        s.0
    }
}
