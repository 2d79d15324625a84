use std::io::Write;
use std::path::{Path, PathBuf};

use zdpool::game::build_payoff_vectors;
use zdpool::sim::{run_experiment, Execution, ExperimentResult};
use zdpool::zd::{
    controlled_payoff, derive_p2_p3, self_control_report, strategy_for_target,
    strategy_for_target_with_scale,
};
use zdpool::{classify_game, GameClass, PayoffVectors};

use crate::config::{game_parameters, load_experiments, SeriesConfig};
use crate::output::{write_series, write_summary, write_trajectory, RunManifest};
use crate::{
    ClassifyArgs, CliError, Command, GameArgs, ReplicateArgs, SimulateArgs, ZdCommand, EXIT_DOMAIN,
    EXIT_OK,
};

type Out<'a> = &'a mut dyn Write;

fn out_err(e: std::io::Error) -> CliError {
    CliError::io("cannot write to stdout", e)
}

/// Report formatting: drop float noise past 12 decimals.
fn show(x: f64) -> String {
    let r = (x * 1e12).round() / 1e12;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn json(out: Out, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}").map_err(out_err)
}

pub(crate) fn dispatch(command: Command, out: Out) -> Result<i32, CliError> {
    match command {
        Command::Classify(args) => classify(args, out),
        Command::Zd(cmd) => zd(cmd, out),
        Command::Simulate(args) => simulate(args, out),
        Command::Replicate(args) => replicate(args, out),
    }
}

fn classify(args: ClassifyArgs, out: Out) -> Result<i32, CliError> {
    let params = game_parameters(&args.game, args.config.as_deref())?;
    let report = classify_game(&params)?;
    if args.json {
        json(out, &report)?;
    } else {
        writeln!(out, "{}", report.class).map_err(out_err)?;
        for c in &report.conditions {
            writeln!(out, "  {}: {}", c.label, c.holds).map_err(out_err)?;
        }
    }
    Ok(if report.class == GameClass::Ipd {
        EXIT_OK
    } else {
        EXIT_DOMAIN
    })
}

fn payoffs(game: &GameArgs) -> Result<PayoffVectors, CliError> {
    Ok(build_payoff_vectors(&game_parameters(game, None)?)?)
}

fn in_unit(x: f64) -> bool {
    (-1e-12..=1.0 + 1e-12).contains(&x)
}

fn zd(cmd: ZdCommand, out: Out) -> Result<i32, CliError> {
    match cmd {
        ZdCommand::Derive {
            p1,
            p4,
            game,
            json: as_json,
        } => {
            let s = payoffs(&game)?;
            let (p2, p3) = derive_p2_p3(p1, p4, &s.miner)?;
            let payoff = controlled_payoff(p1, p4, &s.miner).ok();
            let feasible = in_unit(p2) && in_unit(p3) && payoff.is_some();
            if as_json {
                json(
                    out,
                    &serde_json::json!({
                        "p1": p1, "p2": p2, "p3": p3, "p4": p4,
                        "feasible": feasible, "controlled_payoff": payoff,
                    }),
                )?;
            } else {
                let verdict = if feasible { "feasible" } else { "infeasible" };
                writeln!(out, "({}, {}), {verdict}", show(p2), show(p3)).map_err(out_err)?;
                if let Some(v) = payoff {
                    writeln!(out, "controlled payoff: {}", show(v)).map_err(out_err)?;
                }
            }
            Ok(if feasible { EXIT_OK } else { EXIT_DOMAIN })
        }
        ZdCommand::Target {
            payoff,
            scale,
            game,
            json: as_json,
        } => {
            let s = payoffs(&game)?;
            let zd = match scale {
                Some(lambda) => strategy_for_target_with_scale(payoff, &s.miner, lambda)?,
                None => strategy_for_target(payoff, &s.miner)?,
            };
            let [p1, p2, p3, p4] = zd.strategy.probs();
            let pinned = controlled_payoff(p1, p4, &s.miner)?;
            if as_json {
                json(
                    out,
                    &serde_json::json!({
                        "strategy": [p1, p2, p3, p4],
                        "target": payoff,
                        "controlled_payoff": pinned,
                        "coefficients": zd.coefficients,
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "strategy: ({}, {}, {}, {})",
                    show(p1),
                    show(p2),
                    show(p3),
                    show(p4)
                )
                .map_err(out_err)?;
                writeln!(out, "controlled payoff: {}", show(pinned)).map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        ZdCommand::SelfControl {
            step,
            game,
            json: as_json,
        } => {
            let s = payoffs(&game)?;
            let report = self_control_report(&s.pool, step)?;
            if as_json {
                return json(out, &report).map(|_| EXIT_OK);
            }
            let w = |out: Out, line: String| writeln!(out, "{line}").map_err(out_err);
            w(out, format!("grid step: {}", report.grid_step))?;
            w(out, format!("points checked: {}", report.points_checked))?;
            w(out, format!("p2 > 1: {}", report.p2_above_one))?;
            w(out, format!("p3 < 0: {}", report.p3_below_zero))?;
            w(out, format!("feasible: {}", report.feasible.len()))?;
            for p in &report.feasible {
                w(
                    out,
                    format!(
                        "  ({}, {}, {}, {}) alpha={} gamma={}",
                        show(p.p1),
                        show(p.p2),
                        show(p.p3),
                        show(p.p4),
                        show(p.alpha),
                        show(p.gamma)
                    ),
                )?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

/// Validate and run every series in order.
pub fn run_series(
    configs: &[SeriesConfig],
    exec: Execution,
) -> Result<Vec<ExperimentResult>, CliError> {
    for c in configs {
        c.config.validate()?;
    }
    configs
        .iter()
        .map(|c| Ok(run_experiment(&c.config, exec, c.tail_window)?))
        .collect()
}

/// Output file names for a run, in emission order.
pub struct FileSet {
    pub trajectory: PathBuf,
    pub series: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

impl FileSet {
    pub fn simulate(dir: &Path) -> Self {
        FileSet {
            trajectory: dir.join("trajectory.csv"),
            series: dir.join("series.csv"),
            summary: dir.join("summary.csv"),
            manifest: dir.join("manifest.json"),
        }
    }

    pub fn figure(dir: &Path, n: u8) -> Self {
        FileSet {
            trajectory: dir.join(format!("fig{n}_trajectory.csv")),
            series: dir.join(format!("fig{n}.csv")),
            summary: dir.join(format!("fig{n}_summary.csv")),
            manifest: dir.join(format!("fig{n}_manifest.json")),
        }
    }
}

fn emit(
    command: &str,
    configs: &[SeriesConfig],
    results: &[ExperimentResult],
    dir: &Path,
    files: &FileSet,
    out: Out,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    let labelled: Vec<_> = configs.iter().zip(results).collect();
    write_trajectory(&files.trajectory, &labelled)?;
    write_series(&files.series, &labelled)?;
    write_summary(&files.summary, &labelled)?;
    let outputs = vec![
        files.trajectory.clone(),
        files.series.clone(),
        files.summary.clone(),
    ];
    RunManifest::new(command, configs, outputs).write(&files.manifest)?;

    for (cfg, result) in &labelled {
        for s in &result.series {
            let crossing = s
                .rounds_to_threshold
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{} miner {}: final q {}, miner avg {}, pool avg {}, q>=0.99 from round {crossing}",
                cfg.label,
                s.miner,
                show(s.q.last().unwrap_or(f64::NAN)),
                show(s.miner_average.last().unwrap_or(f64::NAN)),
                show(s.pool_average.last().unwrap_or(f64::NAN)),
            )
            .map_err(out_err)?;
        }
    }
    writeln!(out, "wrote {}", dir.display()).map_err(out_err)
}

fn simulate(args: SimulateArgs, out: Out) -> Result<i32, CliError> {
    let configs = load_experiments(&args.config)?;
    let results = run_series(&configs, execution(args.sequential))?;
    emit(
        "simulate",
        &configs,
        &results,
        &args.out,
        &FileSet::simulate(&args.out),
        out,
    )?;
    Ok(EXIT_OK)
}

/// Preset experiments for figure `n`, optionally with fewer repetitions.
pub fn replicate_configs(
    n: u8,
    seed: u64,
    repetitions: Option<usize>,
) -> Result<Vec<SeriesConfig>, CliError> {
    let presets = zdpool::presets::figure(n, seed)
        .ok_or_else(|| CliError::Usage(format!("figure must be 1-4, got {n}")))?;
    Ok(presets
        .into_iter()
        .map(|p| {
            let mut config = p.config;
            if let Some(r) = repetitions {
                config.repetitions = r;
            }
            SeriesConfig {
                label: p.label,
                tail_window: (config.rounds / 10).max(1),
                config,
            }
        })
        .collect())
}

fn replicate(args: ReplicateArgs, out: Out) -> Result<i32, CliError> {
    let configs = replicate_configs(args.figure, args.seed, args.repetitions)?;
    let results = run_series(&configs, execution(args.sequential))?;
    emit(
        &format!("replicate {}", args.figure),
        &configs,
        &results,
        &args.out,
        &FileSet::figure(&args.out, args.figure),
        out,
    )?;
    Ok(EXIT_OK)
}
