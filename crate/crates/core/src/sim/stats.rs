//! Per-round statistics across repetitions.

use serde::{Deserialize, Serialize};

/// Streaming per-round mean and variance (Welford), fed one repetition at a
/// time in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesAccumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl SeriesAccumulator {
    pub fn new(len: usize) -> Self {
        SeriesAccumulator {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    pub fn push(&mut self, series: &[f64]) {
        assert_eq!(series.len(), self.mean.len(), "series length mismatch");
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &x) in self.mean.iter_mut().zip(&mut self.m2).zip(series) {
            let d = x - *mean;
            *mean += d / n;
            *m2 += d * (x - *mean);
        }
    }

    pub fn finish(self) -> SeriesStats {
        let n = self.count as f64;
        let se = self
            .m2
            .iter()
            .map(|&m2| {
                if self.count > 1 {
                    (m2 / (n - 1.0) / n).sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        SeriesStats {
            repetitions: self.count,
            mean: self.mean,
            se,
        }
    }
}

/// Mean and standard error of a per-round quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub repetitions: usize,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

impl SeriesStats {
    pub fn last(&self) -> Option<f64> {
        self.mean.last().copied()
    }
}

/// Running average `a_t = (x_1 + … + x_t)/t`.
pub fn cumulative_average(xs: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            sum += x;
            sum / (i + 1) as f64
        })
        .collect()
}

/// Mean of the last `window` values (or all of them if fewer).
pub fn tail_mean(xs: &[f64], window: usize) -> f64 {
    let tail = &xs[xs.len().saturating_sub(window)..];
    tail.iter().sum::<f64>() / tail.len().max(1) as f64
}

/// First round (1-based) from which `series` stays at or above `threshold`
/// for `hold` consecutive rounds.
pub fn rounds_to_threshold(series: &[f64], threshold: f64, hold: usize) -> Option<usize> {
    let hold = hold.max(1);
    let mut run = 0;
    for (i, &x) in series.iter().enumerate() {
        if x >= threshold {
            run += 1;
            if run == hold {
                return Some(i + 2 - hold);
            }
        } else {
            run = 0;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_matches_two_pass() {
        let rows = [vec![1.0, 2.0], vec![3.0, 2.0], vec![5.0, 2.0]];
        let mut acc = SeriesAccumulator::new(2);
        for r in &rows {
            acc.push(r);
        }
        let s = acc.finish();
        assert_eq!(s.mean, vec![3.0, 2.0]);
        // Sample variance 4, n = 3.
        assert!((s.se[0] - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.se[1], 0.0);
    }

    #[test]
    fn threshold_detection() {
        let s = [0.5, 0.995, 0.99, 0.2, 0.991, 0.999, 0.995, 1.0];
        assert_eq!(rounds_to_threshold(&s, 0.99, 2), Some(2));
        assert_eq!(rounds_to_threshold(&s, 0.99, 3), Some(5));
        assert_eq!(rounds_to_threshold(&s, 0.99, 5), None);
    }

    #[test]
    fn averages() {
        assert_eq!(cumulative_average(&[1.0, 3.0, 5.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(tail_mean(&[1.0, 3.0, 5.0], 2), 4.0);
        assert_eq!(tail_mean(&[1.0, 3.0], 10), 2.0);
    }
}
