//! Independent reference computations used as test oracles.
#![allow(dead_code)]

/// Transition matrix built element by element from the state definitions.
pub fn transition(p: [f64; 4], q: [f64; 4]) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 4]; 4];
    for s in 0..4 {
        for (next, cell) in a[s].iter_mut().enumerate() {
            let pool_coop = next < 2;
            let miner_coop = next % 2 == 0;
            let pp = if pool_coop { p[s] } else { 1.0 - p[s] };
            let qq = if miner_coop { q[s] } else { 1.0 - q[s] };
            *cell = pp * qq;
        }
    }
    a
}

/// Cesàro limit by averaging distributions of the lazy chain `(A + I)/2`
/// started from `initial`. The lazy chain has the same stationary vectors
/// and no periodicity, so plain iteration converges.
pub fn stationary_by_iteration(a: &[[f64; 4]; 4], initial: usize, iterations: usize) -> [f64; 4] {
    let mut v = [0.0; 4];
    v[initial] = 1.0;
    for _ in 0..iterations {
        let mut next = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                let lazy = 0.5 * a[i][j] + if i == j { 0.5 } else { 0.0 };
                next[j] += v[i] * lazy;
            }
        }
        v = next;
    }
    v
}

/// Laplace expansion along the first row.
pub fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn det4(m: [[f64; 4]; 4]) -> f64 {
    (0..4)
        .map(|c| {
            let minor: [[f64; 3]; 3] = std::array::from_fn(|r| {
                let row = &m[r + 1];
                let cols: Vec<f64> = (0..4).filter(|&k| k != c).map(|k| row[k]).collect();
                [cols[0], cols[1], cols[2]]
            });
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * det3(minor)
        })
        .sum()
}

pub fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub const S_P: [f64; 4] = [3.0, 0.0, 5.0, 2.0];
pub const S_M: [f64; 4] = [3.0, 5.0, 0.0, 2.0];
