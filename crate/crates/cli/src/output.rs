//! CSV and manifest emission.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! results give byte-equal files. NaN and missing values become empty
//! cells.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zdpool::sim::ExperimentResult;

use crate::config::SeriesConfig;
use crate::CliError;

pub const TRAJECTORY_HEADER: [&str; 12] = [
    "series",
    "miner",
    "round",
    "state",
    "pool_payoff",
    "miner_payoff",
    "q_t",
    "p1",
    "p2",
    "p3",
    "p4",
    "E",
];

pub const SERIES_HEADER: [&str; 12] = [
    "series",
    "miner",
    "power",
    "round",
    "q_mean",
    "q_se",
    "E_mean",
    "E_se",
    "miner_avg_mean",
    "miner_avg_se",
    "pool_avg_mean",
    "pool_avg_se",
];

pub const SUMMARY_HEADER: [&str; 14] = [
    "series",
    "miner",
    "power",
    "repetitions",
    "rounds",
    "final_q",
    "rounds_to_threshold",
    "miner_average",
    "pool_average",
    "miner_tail",
    "pool_tail",
    "tail_window",
    "clamp_events",
    "degenerate_updates",
];

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(format!("cannot create {}", path.display()), e))?;
    Ok(csv::Writer::from_writer(file))
}

pub type Labelled<'a> = (&'a SeriesConfig, &'a ExperimentResult);

pub fn write_trajectory(path: &Path, results: &[Labelled]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for (cfg, result) in results {
        for (miner, t) in result.sample.iter().enumerate() {
            for r in 0..t.len() {
                let [p1, p2, p3, p4] = t.strategies[r];
                w.write_record([
                    cfg.label.clone(),
                    miner.to_string(),
                    (r + 1).to_string(),
                    format!("{:?}", t.states[r]),
                    num(t.pool_payoffs[r]),
                    num(t.miner_payoffs[r]),
                    num(t.q_series[r]),
                    num(p1),
                    num(p2),
                    num(p3),
                    num(p4),
                    opt(t.expected[r]),
                ])?;
            }
        }
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub fn write_series(path: &Path, results: &[Labelled]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SERIES_HEADER)?;
    for (cfg, result) in results {
        for s in &result.series {
            for r in 0..s.q.mean.len() {
                w.write_record([
                    cfg.label.clone(),
                    s.miner.to_string(),
                    num(s.power),
                    (r + 1).to_string(),
                    num(s.q.mean[r]),
                    num(s.q.se[r]),
                    num(s.expected.mean[r]),
                    num(s.expected.se[r]),
                    num(s.miner_average.mean[r]),
                    num(s.miner_average.se[r]),
                    num(s.pool_average.mean[r]),
                    num(s.pool_average.se[r]),
                ])?;
            }
        }
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub fn write_summary(path: &Path, results: &[Labelled]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for (cfg, result) in results {
        for s in &result.series {
            w.write_record([
                cfg.label.clone(),
                s.miner.to_string(),
                num(s.power),
                s.q.repetitions.to_string(),
                s.q.mean.len().to_string(),
                opt(s.q.last()),
                s.rounds_to_threshold
                    .map(|r| r.to_string())
                    .unwrap_or_default(),
                opt(s.miner_average.last()),
                opt(s.pool_average.last()),
                num(s.miner_tail),
                num(s.pool_tail),
                result.tail_window.to_string(),
                s.clamp_events.to_string(),
                s.degenerate_updates.to_string(),
            ])?;
        }
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the resolved configuration serialized as JSON.
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<PathBuf>,
    /// Seconds since the Unix epoch. The only field that differs between
    /// reruns.
    pub timestamp: u64,
    pub config: Vec<SeriesConfig>,
}

pub fn config_digest(configs: &[SeriesConfig]) -> String {
    let bytes = serde_json::to_vec(configs).expect("configs serialize");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunManifest {
    pub fn new(command: &str, configs: &[SeriesConfig], outputs: Vec<PathBuf>) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            command: command.to_string(),
            config_digest: config_digest(configs),
            seed: configs.first().map(|c| c.config.seed).unwrap_or(0),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            timestamp,
            config: configs.to_vec(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
    }
}
