//! Zero-determinant strategy synthesis for the pool.
//!
//! A pool strategy whose shifted form `(p1−1, p2−1, p3, p4)` equals
//! `α·S_p + β·S_m + γ·1` forces `α·S_p + β·S_m + γ = 0` on the long-run
//! payoffs. With `α = 0` (equalizer) the miner's payoff is pinned at `−γ/β`.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::game::MixedStrategy;
use crate::tolerance::STRUCTURAL;

/// Fraction of the largest feasible scale actually used, keeping the
/// strategy strictly inside the unit cube where possible.
pub const INTERIOR_SAFETY: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZdCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ZdCoefficients {
    /// The vector `α·S_p + β·S_m + γ·1`.
    pub fn combine(&self, s_p: &[f64; 4], s_m: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| self.alpha * s_p[i] + self.beta * s_m[i] + self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZdStrategy {
    pub strategy: MixedStrategy,
    pub target_payoff: f64,
    pub coefficients: ZdCoefficients,
}

fn spread(s_m: &[f64; 4]) -> Result<f64> {
    let delta = s_m[0] - s_m[3];
    if delta.abs() < STRUCTURAL {
        return Err(Error::DegenerateSpread { value: s_m[0] });
    }
    Ok(delta)
}

/// `(p2, p3)` as functions of `(p1, p4)` for the miner-control equalizer.
/// The raw values are returned; they may fall outside `[0, 1]`.
pub fn derive_p2_p3(p1: f64, p4: f64, s_m: &[f64; 4]) -> Result<(f64, f64)> {
    check_probability("p1", p1)?;
    check_probability("p4", p4)?;
    let delta = spread(s_m)?;
    let [cc, cd, dc, dd] = *s_m;
    let p2 = (p1 * (cd - dd) - (1.0 + p4) * (cd - cc)) / delta;
    let p3 = ((1.0 - p1) * (dd - dc) + p4 * (cc - dc)) / delta;
    Ok((p2, p3))
}

/// Miner payoff enforced by an equalizer with corner components `p1`, `p4`:
/// a weighted average of `S_m^dd` and `S_m^cc`.
pub fn controlled_payoff(p1: f64, p4: f64, s_m: &[f64; 4]) -> Result<f64> {
    check_probability("p1", p1)?;
    check_probability("p4", p4)?;
    let denom = 1.0 - p1 + p4;
    if denom <= STRUCTURAL {
        return Err(Error::SingularControl);
    }
    Ok(((1.0 - p1) * s_m[3] + p4 * s_m[0]) / denom)
}

fn in_unit(x: f64) -> bool {
    (-STRUCTURAL..=1.0 + STRUCTURAL).contains(&x)
}

/// Recover `(β, γ)` from an equalizer strategy using its first and last
/// components, then check the middle two.
pub fn recover_coefficients(p: &MixedStrategy, s_m: &[f64; 4]) -> Result<ZdCoefficients> {
    let delta = spread(s_m)?;
    let [p1, p2, p3, p4] = p.probs();
    let beta = (p1 - 1.0 - p4) / delta;
    let gamma = p4 - beta * s_m[3];
    let residual = (beta * s_m[1] + gamma - (p2 - 1.0))
        .abs()
        .max((beta * s_m[2] + gamma - p3).abs());
    if residual > crate::tolerance::ANALYTIC {
        return Err(Error::NotZeroDeterminant { residual });
    }
    Ok(ZdCoefficients {
        alpha: 0.0,
        beta,
        gamma,
    })
}

/// Strategy family hitting `target`: `1−p1 = λ(1−w)`, `p4 = λw` with
/// `w = (target − S_dd)/(S_cc − S_dd)`. Along it `p2 = 1 + λ·a` and
/// `p3 = λ·b`; returns `(w, a, b)`.
fn target_line(target: f64, s_m: &[f64; 4]) -> Result<(f64, f64, f64)> {
    let delta = spread(s_m)?;
    let [cc, cd, dc, dd] = *s_m;
    let (low, high) = (cc.min(dd), cc.max(dd));
    if !(target >= low - STRUCTURAL && target <= high + STRUCTURAL) {
        return Err(Error::TargetOutOfRange { target, low, high });
    }
    let w = ((target - dd) / delta).clamp(0.0, 1.0);
    let slope2 = (-(1.0 - w) * (cd - dd) - w * (cd - cc)) / delta;
    let slope3 = ((1.0 - w) * (dd - dc) + w * (cc - dc)) / delta;
    Ok((w, slope2, slope3))
}

/// Largest `λ ∈ (0, 1]` keeping `p2, p3 ∈ [0, 1]` on the target line.
pub fn feasible_scale(target: f64, s_m: &[f64; 4]) -> Result<f64> {
    let (_, slope2, slope3) = target_line(target, s_m)?;
    if slope2 > STRUCTURAL {
        return Err(Error::Infeasible {
            target,
            reason: format!("p2 exceeds 1 for every λ > 0 (slope {slope2})"),
        });
    }
    if slope3 < -STRUCTURAL {
        return Err(Error::Infeasible {
            target,
            reason: format!("p3 is negative for every λ > 0 (slope {slope3})"),
        });
    }
    let mut lambda: f64 = 1.0;
    if slope2 < 0.0 {
        lambda = lambda.min(1.0 / -slope2);
    }
    if slope3 > 0.0 {
        lambda = lambda.min(1.0 / slope3);
    }
    Ok(lambda)
}

/// Equalizer strategy on the target line at an explicit scale `λ`.
pub fn strategy_for_target_with_scale(
    target: f64,
    s_m: &[f64; 4],
    lambda: f64,
) -> Result<ZdStrategy> {
    let (w, _, _) = target_line(target, s_m)?;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Infeasible {
            target,
            reason: format!("scale λ = {lambda} outside (0, 1]"),
        });
    }
    let p1 = 1.0 - lambda * (1.0 - w);
    let p4 = lambda * w;
    let (p2, p3) = derive_p2_p3(p1, p4, s_m)?;
    if !in_unit(p2) {
        return Err(Error::Infeasible {
            target,
            reason: format!("p2 = {p2} outside [0, 1] at λ = {lambda}"),
        });
    }
    if !in_unit(p3) {
        return Err(Error::Infeasible {
            target,
            reason: format!("p3 = {p3} outside [0, 1] at λ = {lambda}"),
        });
    }
    let strategy = MixedStrategy::new([p1, p2.clamp(0.0, 1.0), p3.clamp(0.0, 1.0), p4])?;
    let delta = spread(s_m)?;
    let beta = -lambda / delta;
    let coefficients = ZdCoefficients {
        alpha: 0.0,
        beta,
        gamma: p4 - beta * s_m[3],
    };
    Ok(ZdStrategy {
        strategy,
        target_payoff: target,
        coefficients,
    })
}

/// Deterministic equalizer for `target`, using [`INTERIOR_SAFETY`] times the
/// largest feasible scale.
pub fn strategy_for_target(target: f64, s_m: &[f64; 4]) -> Result<ZdStrategy> {
    let lambda = feasible_scale(target, s_m)?;
    strategy_for_target_with_scale(target, s_m, INTERIOR_SAFETY * lambda)
}

/// One grid point of the pool self-control sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfControlPoint {
    pub p1: f64,
    pub p4: f64,
    pub p2: f64,
    pub p3: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub p2_above_one: bool,
    pub p3_below_zero: bool,
}

impl SelfControlPoint {
    pub fn feasible(&self) -> bool {
        in_unit(self.p2) && in_unit(self.p3)
    }
}

/// Strategy the pool would need to pin its own payoff, from `(p1, p4)`.
pub fn self_control_point(p1: f64, p4: f64, s_p: &[f64; 4]) -> Result<SelfControlPoint> {
    check_probability("p1", p1)?;
    check_probability("p4", p4)?;
    let delta = spread(s_p)?;
    let [cc, cd, dc, dd] = *s_p;
    let p2 = ((1.0 + p4) * (cc - cd) - p1 * (dd - cd)) / delta;
    let p3 = (-(1.0 - p1) * (dc - dd) - p4 * (dc - cc)) / delta;
    Ok(SelfControlPoint {
        p1,
        p4,
        p2,
        p3,
        alpha: (p1 - p4 - 1.0) / delta,
        gamma: ((1.0 - p1) * dd + p4 * cc) / delta,
        p2_above_one: p2 > 1.0 + STRUCTURAL,
        p3_below_zero: p3 < -STRUCTURAL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfControlReport {
    pub grid_step: f64,
    pub points_checked: usize,
    pub feasible: Vec<SelfControlPoint>,
    pub p2_above_one: usize,
    pub p3_below_zero: usize,
}

impl SelfControlReport {
    /// The sole feasible point, when there is exactly one.
    pub fn unique_feasible(&self) -> Option<&SelfControlPoint> {
        match self.feasible.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}

/// Sweep `(p1, p4)` over `{0, h, 2h, …, 1}²` and collect feasible points.
pub fn self_control_report(s_p: &[f64; 4], grid_step: f64) -> Result<SelfControlReport> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::InvalidProbability {
            name: "grid_step",
            value: grid_step,
        });
    }
    let n = (1.0 / grid_step).round().max(1.0) as usize;
    let mut report = SelfControlReport {
        grid_step,
        points_checked: 0,
        feasible: Vec::new(),
        p2_above_one: 0,
        p3_below_zero: 0,
    };
    for i in 0..=n {
        for j in 0..=n {
            let point = self_control_point(i as f64 / n as f64, j as f64 / n as f64, s_p)?;
            report.points_checked += 1;
            report.p2_above_one += point.p2_above_one as usize;
            report.p3_below_zero += point.p3_below_zero as usize;
            if point.feasible() {
                report.feasible.push(point);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S_M: [f64; 4] = [3.0, 5.0, 0.0, 2.0];
    const S_P: [f64; 4] = [3.0, 0.0, 5.0, 2.0];

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn derive_published_strategy() {
        let (p2, p3) = derive_p2_p3(0.9, 0.2, &S_M).unwrap();
        assert!(close(p2, 0.3) && close(p3, 0.8));
        // The all-cooperate corner is not an equalizer: the relation sends
        // (p1, p4) = (1, 1) to an infeasible (p2, p3).
        assert_eq!(derive_p2_p3(1.0, 1.0, &S_M).unwrap(), (-1.0, 3.0));
        assert_eq!(derive_p2_p3(0.0, 1.0, &S_M).unwrap(), (-4.0, 5.0));
    }

    #[test]
    fn derive_rejects_flat_spread() {
        assert!(matches!(
            derive_p2_p3(0.5, 0.5, &[2.0, 5.0, 0.0, 2.0]),
            Err(Error::DegenerateSpread { .. })
        ));
    }

    #[test]
    fn controlled_payoff_examples() {
        assert!(close(controlled_payoff(0.9, 0.2, &S_M).unwrap(), 8.0 / 3.0));
        assert_eq!(controlled_payoff(1.0, 1.0, &S_M).unwrap(), 3.0);
        assert_eq!(controlled_payoff(0.0, 0.0, &S_M).unwrap(), 2.0);
        assert_eq!(
            controlled_payoff(1.0, 0.0, &S_M),
            Err(Error::SingularControl)
        );
    }

    #[test]
    fn coefficients_of_published_strategy() {
        let p = MixedStrategy::new([0.9, 0.3, 0.8, 0.2]).unwrap();
        let c = recover_coefficients(&p, &S_M).unwrap();
        assert!(close(c.beta, -0.3) && close(c.gamma, 0.8));
        assert!(close(-c.gamma / c.beta, 8.0 / 3.0));
        let tft = MixedStrategy::new([1.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            recover_coefficients(&tft, &S_M),
            Err(Error::NotZeroDeterminant { .. })
        ));
    }

    #[test]
    fn target_lower_bound_at_explicit_scale() {
        let z = strategy_for_target_with_scale(2.0, &S_M, 1.0 / 3.0).unwrap();
        let expected = [2.0 / 3.0, 0.0, 2.0 / 3.0, 0.0];
        for (a, b) in z.strategy.probs().iter().zip(expected) {
            assert!(close(*a, b));
        }
        assert!((feasible_scale(2.0, &S_M).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn target_upper_bound() {
        let z = strategy_for_target(3.0, &S_M).unwrap();
        let [p1, _, _, p4] = z.strategy.probs();
        assert_eq!(p1, 1.0);
        assert_eq!(controlled_payoff(p1, p4, &S_M).unwrap(), 3.0);
    }

    #[test]
    fn target_out_of_range() {
        assert!(matches!(
            strategy_for_target(9.0, &S_M),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            strategy_for_target(1.5, &S_M),
            Err(Error::TargetOutOfRange { .. })
        ));
    }

    #[test]
    fn target_infeasible_when_slopes_point_outward() {
        // S_cd < S_cc pushes p2 above one along the whole target line.
        let s = [3.0, 1.0, 0.0, 2.0];
        assert!(matches!(
            strategy_for_target(2.5, &s),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn synthesized_strategy_matches_eq4_and_coefficients() {
        for t in [2.0, 2.25, 2.5, 8.0 / 3.0, 3.0] {
            let z = strategy_for_target(t, &S_M).unwrap();
            let [p1, p2, p3, p4] = z.strategy.probs();
            let (d2, d3) = derive_p2_p3(p1, p4, &S_M).unwrap();
            assert!(close(p2, d2) && close(p3, d3));
            assert!((controlled_payoff(p1, p4, &S_M).unwrap() - t).abs() < 1e-10);
            let c = recover_coefficients(&z.strategy, &S_M).unwrap();
            assert!((c.beta - z.coefficients.beta).abs() < 1e-12);
            assert!((c.gamma - z.coefficients.gamma).abs() < 1e-12);
        }
    }

    #[test]
    fn self_control_examples() {
        let origin = self_control_point(0.0, 0.0, &S_P).unwrap();
        assert!(origin.p2_above_one);
        let mid = self_control_point(0.5, 0.5, &S_P).unwrap();
        assert!(mid.p2_above_one && mid.p3_below_zero);
        let corner = self_control_point(1.0, 0.0, &S_P).unwrap();
        assert!(corner.feasible());
        assert_eq!(
            (corner.p2, corner.p3, corner.alpha, corner.gamma),
            (1.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn self_control_sweep_has_single_point() {
        let report = self_control_report(&S_P, 0.05).unwrap();
        assert_eq!(report.points_checked, 21 * 21);
        let only = report
            .unique_feasible()
            .expect("exactly one feasible point");
        assert_eq!((only.p1, only.p2, only.p3, only.p4), (1.0, 1.0, 0.0, 0.0));
        assert!(self_control_report(&S_P, 0.0).is_err());
    }
}
