//! TOML inputs.
//!
//! An experiment file holds shared settings at the top level and an
//! optional `[[series]]` array. Each series overlays its own keys on the
//! shared ones; with no array the top level is a single series named
//! `main`.
//!
//! ```toml
//! rounds = 500
//! repetitions = 100
//! seed = 2024
//! initial_powers = [1, 2, 3, 4]
//! pool = { kind = "mechanism", low = 2.0, high = 3.0, zeta = 2.5 }
//!
//! [[series]]
//! label = "q0=0.01"
//! miner = { kind = "non_memorial", q0 = 0.01, epsilon = 5.0 }
//! ```
//!
//! Optional keys: `payoffs` (`{ pool = [..], miner = [..] }`, defaults to
//! the published vectors), `power_model` (`sampled` | `expected`),
//! `streams` (`common` | `independent`), `initial_state`, `tail_window`
//! (defaults to a tenth of `rounds`) and `label`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use zdpool::presets;
use zdpool::sim::ExperimentConfig;
use zdpool::GameParameters;

use crate::{CliError, GameArgs};

pub const REQUIRED_KEYS: [&str; 5] = ["rounds", "repetitions", "seed", "miner", "pool"];

/// One fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub label: String,
    pub tail_window: usize,
    pub config: ExperimentConfig,
}

fn read(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn load_experiments(path: &Path) -> Result<Vec<SeriesConfig>, CliError> {
    parse_experiments(read(path)?)
}

pub fn parse_experiments(mut table: Table) -> Result<Vec<SeriesConfig>, CliError> {
    let entries = match table.remove("series") {
        None => vec![Table::new()],
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::Table(t) => Ok(t),
                _ => Err(CliError::Usage("`series` entries must be tables".into())),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => {
            return Err(CliError::Usage(
                "`series` must be an array of tables".into(),
            ))
        }
    };
    if entries.is_empty() {
        return Err(CliError::Usage("`series` is empty".into()));
    }
    let many = entries.len() > 1;
    entries
        .into_iter()
        .enumerate()
        .map(|(i, entry)| {
            let mut merged = table.clone();
            merged.extend(entry);
            let default_label = if many {
                format!("series{i}")
            } else {
                "main".into()
            };
            resolve(merged, default_label)
        })
        .collect()
}

fn resolve(mut t: Table, default_label: String) -> Result<SeriesConfig, CliError> {
    let missing: Vec<&str> = REQUIRED_KEYS
        .into_iter()
        .filter(|k| !t.contains_key(*k))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "config is missing required keys: {} (required: {})",
            missing.join(", "),
            REQUIRED_KEYS.join(", ")
        )));
    }
    let label = match t.remove("label") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(CliError::Usage("`label` must be a string".into())),
        None => default_label,
    };
    let tail_window = match t.remove("tail_window") {
        Some(Value::Integer(n)) if n > 0 => Some(n as usize),
        Some(_) => {
            return Err(CliError::Usage(
                "`tail_window` must be a positive integer".into(),
            ))
        }
        None => None,
    };
    if !t.contains_key("payoffs") {
        let payoffs = Value::try_from(presets::PAYOFFS).expect("payoffs serialize");
        t.insert("payoffs".into(), payoffs);
    }
    let config: ExperimentConfig = Value::Table(t)
        .try_into()
        .map_err(|e| CliError::Usage(format!("series `{label}`: {e}")))?;
    let tail_window = tail_window.unwrap_or((config.rounds / 10).max(1));
    Ok(SeriesConfig {
        label,
        tail_window,
        config,
    })
}

/// Published parameters, overlaid with a config file and then with flags.
pub fn game_parameters(args: &GameArgs, file: Option<&Path>) -> Result<GameParameters, CliError> {
    let mut params = presets::GAME;
    if let Some(path) = file {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Partial {
            k_pool: Option<f64>,
            k_miner: Option<f64>,
            pi: Option<f64>,
            mu: Option<f64>,
            sigma: Option<f64>,
            rho: Option<f64>,
        }
        let p: Partial = Value::Table(read(path)?)
            .try_into()
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        overlay(
            &mut params,
            [p.k_pool, p.k_miner, p.pi, p.mu, p.sigma, p.rho],
        );
    }
    overlay(
        &mut params,
        [args.kp, args.km, args.pi, args.mu, args.sigma, args.rho],
    );
    Ok(params)
}

fn overlay(params: &mut GameParameters, values: [Option<f64>; 6]) {
    let slots = [
        &mut params.k_pool,
        &mut params.k_miner,
        &mut params.pi,
        &mut params.mu,
        &mut params.sigma,
        &mut params.rho,
    ];
    for (slot, value) in slots.into_iter().zip(values) {
        if let Some(v) = value {
            *slot = v;
        }
    }
}
