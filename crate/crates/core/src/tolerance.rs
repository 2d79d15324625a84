//! Numeric tolerances shared by the engine and its tests.

/// Structural identities: row sums, probability ranges, exact algebraic
/// rearrangements.
pub const STRUCTURAL: f64 = 1e-12;

/// Analytic equalities between two computation routes (stationary vector vs
/// determinant ratio, stationarity residuals).
pub const ANALYTIC: f64 = 1e-8;

/// Agreement between long Monte-Carlo averages and exact expectations.
pub const MONTE_CARLO: f64 = 0.01;

/// Pivot magnitude below which a small dense system is treated as singular.
pub const PIVOT: f64 = 1e-13;

/// Smallest expected payoff accepted as a divisor in the memorial update.
pub const MIN_PAYOFF_DIVISOR: f64 = 1e-12;

/// Cooperation probability threshold used for convergence detection.
pub const CONVERGENCE_THRESHOLD: f64 = 0.99;

/// Consecutive rounds a series must stay at or above the threshold.
pub const CONVERGENCE_HOLD: usize = 50;
