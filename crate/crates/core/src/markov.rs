//! Four-state Markov chain induced by two memory-one strategies.

use serde::{Deserialize, Serialize};

use crate::game::{GameState, MixedStrategy, PayoffVectors};
use crate::linalg;

/// Row-stochastic transition matrix; rows are the previous state, columns
/// the next state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix([[f64; 4]; 4]);

impl TransitionMatrix {
    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn row(&self, from: GameState) -> [f64; 4] {
        self.0[from.index()]
    }

    /// Maximum absolute deviation of a row sum from one.
    pub fn row_sum_error(&self) -> f64 {
        self.0
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `reach[i][j]`: state `j` is reachable from `i` in zero or more steps.
    fn reachability(&self) -> [[bool; 4]; 4] {
        let mut reach = [[false; 4]; 4];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
            for (j, cell) in row.iter_mut().enumerate() {
                *cell |= self.0[i][j] > 0.0;
            }
        }
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    reach[i][j] |= reach[i][k] && reach[k][j];
                }
            }
        }
        reach
    }

    fn is_primitive(&self) -> bool {
        // A non-negative 4×4 matrix is primitive iff its (n−1)²+1 = 10th
        // power is strictly positive.
        let support: [[bool; 4]; 4] =
            std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] > 0.0));
        let mut power = support;
        for _ in 1..10 {
            power = std::array::from_fn(|i| {
                std::array::from_fn(|j| (0..4).any(|k| power[i][k] && support[k][j]))
            });
        }
        power.iter().flatten().all(|&b| b)
    }

    /// Irreducible and aperiodic.
    pub fn is_ergodic(&self) -> bool {
        self.is_primitive()
    }
}

pub fn transition_matrix(p: &MixedStrategy, q: &MixedStrategy) -> TransitionMatrix {
    let (p, q) = (p.probs(), q.probs());
    TransitionMatrix(std::array::from_fn(|s| {
        let (ps, qs) = (p[s], q[s]);
        [
            ps * qs,
            ps * (1.0 - qs),
            (1.0 - ps) * qs,
            (1.0 - ps) * (1.0 - qs),
        ]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution {
    pub v: [f64; 4],
    /// False when the chain is reducible or periodic; `v` is then the
    /// Cesàro limit of visitation frequencies from the supplied initial state.
    pub ergodic: bool,
}

impl StationaryDistribution {
    pub fn dot(&self, f: &[f64; 4]) -> f64 {
        self.v.iter().zip(f).map(|(a, b)| a * b).sum()
    }
}

/// Long-run state distribution.
///
/// Ergodic chains are solved directly: `(Aᵀ − I)v = 0` with the last
/// equation replaced by `Σv = 1`. Otherwise the closed classes reachable
/// from `initial` are found, each class's stationary vector is solved on its
/// own, and the results are weighted by the absorption probabilities from
/// `initial`, which is exactly the Cesàro limit.
pub fn stationary_distribution(a: &TransitionMatrix, initial: GameState) -> StationaryDistribution {
    if a.is_ergodic() {
        if let Some(v) = solve_class(a, &[0, 1, 2, 3]) {
            return StationaryDistribution {
                v: to_array(&[0, 1, 2, 3], &v),
                ergodic: true,
            };
        }
    }
    StationaryDistribution {
        v: cesaro_limit(a, initial),
        ergodic: false,
    }
}

fn to_array(states: &[usize], values: &[f64]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (&s, &x) in states.iter().zip(values) {
        out[s] = x;
    }
    out
}

/// Stationary vector of the chain restricted to a closed class.
fn solve_class(a: &TransitionMatrix, class: &[usize]) -> Option<Vec<f64>> {
    let n = class.len();
    let mut m = vec![vec![0.0; n]; n];
    for (r, &to) in class.iter().enumerate() {
        for (c, &from) in class.iter().enumerate() {
            m[r][c] = a.0[from][to] - if from == to { 1.0 } else { 0.0 };
        }
    }
    m[n - 1] = vec![1.0; n];
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    linalg::solve(m, b)
}

fn cesaro_limit(a: &TransitionMatrix, initial: GameState) -> [f64; 4] {
    let reach = a.reachability();
    let recurrent: Vec<bool> = (0..4)
        .map(|i| (0..4).all(|j| !reach[i][j] || reach[j][i]))
        .collect();

    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in (0..4).filter(|&i| recurrent[i]) {
        if classes.iter().any(|c| c.contains(&i)) {
            continue;
        }
        classes.push((0..4).filter(|&j| reach[i][j] && reach[j][i]).collect());
    }

    let transient: Vec<usize> = (0..4).filter(|&i| !recurrent[i]).collect();
    let start = initial.index();
    let mut v = [0.0; 4];
    for class in &classes {
        let weight = if class.contains(&start) {
            1.0
        } else if recurrent[start] {
            0.0
        } else {
            absorption_probability(a, &transient, class, start)
        };
        if weight == 0.0 {
            continue;
        }
        // A closed class always has a unique stationary vector; a singular
        // solve here would indicate a broken transition matrix.
        let pi =
            solve_class(a, class).unwrap_or_else(|| vec![1.0 / class.len() as f64; class.len()]);
        for (&s, &x) in class.iter().zip(&pi) {
            v[s] += weight * x;
        }
    }
    v
}

/// Probability of eventually entering `class` from the transient `start`:
/// `h = A_TT h + A_TC 1`.
fn absorption_probability(
    a: &TransitionMatrix,
    transient: &[usize],
    class: &[usize],
    start: usize,
) -> f64 {
    let n = transient.len();
    let mut m = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (r, &i) in transient.iter().enumerate() {
        for (c, &j) in transient.iter().enumerate() {
            m[r][c] = if i == j { 1.0 } else { 0.0 } - a.0[i][j];
        }
        b[r] = class.iter().map(|&j| a.0[i][j]).sum();
    }
    let h = linalg::solve(m, b).unwrap_or_else(|| vec![0.0; n]);
    transient
        .iter()
        .position(|&i| i == start)
        .map_or(0.0, |k| h[k])
}

/// `D(p, q, f)`: the determinant whose second column depends only on the
/// pool and third only on the miner, with `f` as the last column.
pub fn press_dyson_determinant(p: &MixedStrategy, q: &MixedStrategy, f: &[f64; 4]) -> f64 {
    let (p, q) = (p.probs(), q.probs());
    let rows: [[f64; 4]; 4] = std::array::from_fn(|i| {
        let cc = if i == 0 { 1.0 } else { 0.0 };
        let pool_coop_prev = if i <= 1 { 1.0 } else { 0.0 };
        let miner_coop_prev = if i == 0 || i == 2 { 1.0 } else { 0.0 };
        [
            p[i] * q[i] - cc,
            p[i] - pool_coop_prev,
            q[i] - miner_coop_prev,
            f[i],
        ]
    });
    linalg::determinant(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedPayoffs {
    pub pool: f64,
    pub miner: f64,
    pub ergodic: bool,
}

/// Long-run expected payoffs `v·S / v·1`.
pub fn expected_payoffs(
    p: &MixedStrategy,
    q: &MixedStrategy,
    payoffs: &PayoffVectors,
    initial: GameState,
) -> ExpectedPayoffs {
    let stationary = stationary_distribution(&transition_matrix(p, q), initial);
    let norm = stationary.dot(&[1.0; 4]);
    ExpectedPayoffs {
        pool: stationary.dot(&payoffs.pool) / norm,
        miner: stationary.dot(&payoffs.miner) / norm,
        ergodic: stationary.ergodic,
    }
}

/// The determinant-ratio route `D(p,q,S)/D(p,q,1)`; `None` when the
/// normalizer vanishes.
pub fn determinant_payoffs(
    p: &MixedStrategy,
    q: &MixedStrategy,
    payoffs: &PayoffVectors,
) -> Option<(f64, f64)> {
    let norm = press_dyson_determinant(p, q, &[1.0; 4]);
    if norm.abs() < 1e-14 {
        return None;
    }
    Some((
        press_dyson_determinant(p, q, &payoffs.pool) / norm,
        press_dyson_determinant(p, q, &payoffs.miner) / norm,
    ))
}
