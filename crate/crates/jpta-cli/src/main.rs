//! Command-line front end for designing frequency-dependent 3D beams on a
//! joint phase-time array.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use jpta_core::{gain_map, MapReduction, UserScenario};
use jpta_harness::{
    export_az_frequency_csv, export_beam_table_csv, export_gain_map_csv, export_gain_map_json,
    run_experiment, run_solver, scenario_points, ExperimentConfig, SolverKind,
};

#[derive(Parser)]
#[command(
    name = "jpta",
    version,
    about = "Design frequency-dependent 3D beams for joint phase-time arrays",
    after_help = "Config values can be overridden with repeated --set key=value \
                  (e.g. --set users.count=4 --set optimizer.zeta=1e-4). The output \
                  directory can also be overridden with the JPTA_OUTPUT_DIR \
                  environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (TOML or JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override a config value, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and write the quantized phase/delay table.
    Solve {
        #[command(flatten)]
        config: ConfigArgs,
        /// Solver name (joint-ls, joint-minimax, sep-ls, sep-minimax,
        /// greedy-joint, greedy-sep, gd-joint, gd-sep).
        #[arg(long)]
        solver: String,
        /// Output directory; defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a solver's beam over an angle grid and write gain-map CSVs.
    EvalMap {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        solver: String,
        /// Azimuth grid step in degrees.
        #[arg(long, default_value_t = 1.0)]
        az_step: f64,
        /// Elevation grid step in degrees.
        #[arg(long, default_value_t = 0.5)]
        el_step: f64,
        /// Also write an azimuth-versus-frequency slice at this elevation.
        #[arg(long)]
        el_slice: Option<f64>,
    },
    /// Run the configured sweep with every configured solver.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run several solvers on the configured scenarios and print the
    /// objective matrix with pairwise deltas.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated solver names.
        #[arg(long)]
        solvers: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Unknown solver names are usage errors; everything else is a
            // runtime failure.
            let usage = e
                .downcast_ref::<jpta_harness::HarnessError>()
                .map(|h| matches!(h, jpta_harness::HarnessError::UnknownSolver { .. }))
                .unwrap_or(false);
            eprintln!("error: {e:#}");
            ExitCode::from(if usage { 1 } else { 2 })
        }
    }
}

fn load(config: &ConfigArgs) -> anyhow::Result<ExperimentConfig> {
    Ok(ExperimentConfig::load(&config.config, &config.set)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve {
            config,
            solver,
            out,
        } => solve(config, &solver, out),
        Command::EvalMap {
            config,
            solver,
            az_step,
            el_step,
            el_slice,
        } => eval_map(config, &solver, az_step, el_step, el_slice),
        Command::Sweep { config } => sweep(config),
        Command::Compare { config, solvers } => compare(config, &solvers),
    }
}

fn scenario_for(config: &ExperimentConfig) -> anyhow::Result<(jpta_harness::ScenarioPoint, UserScenario)> {
    let points = scenario_points(config)?;
    let point = points
        .first()
        .cloned()
        .context("config produced no scenario point")?;
    let scenario = UserScenario::new(
        point.directions.clone(),
        point.alphas.clone(),
        config.frequency.m_count,
    )?;
    Ok((point, scenario))
}

fn solve(args: ConfigArgs, solver_name: &str, out: Option<PathBuf>) -> anyhow::Result<()> {
    let solver = SolverKind::parse(solver_name)?;
    let config = load(&args)?;
    let out_dir = out.unwrap_or_else(|| config.output_dir.clone());
    let (_, scenario) = scenario_for(&config)?;

    let run = run_solver(&config, &scenario, solver)?;
    let gains_db = run.metrics.per_user_gain_db();
    println!("solver: {solver}");
    println!(
        "users: {} | subband sizes: {}",
        scenario.user_count(),
        scenario
            .subbands()
            .iter()
            .map(|r| r.len().to_string())
            .collect::<Vec<_>>()
            .join(";")
    );
    println!(
        "per-user mean gain (dB): {}",
        gains_db
            .iter()
            .map(|g| format!("{g:.3}"))
            .collect::<Vec<_>>()
            .join(";")
    );
    println!("G_l (dB): {:.3}", run.metrics.log_mean_gain);
    println!("wall time (s): {:.3}", run.metrics.wall_time);
    if let Some(trace) = &run.trace {
        println!(
            "iterations: {} | converged: {}",
            trace.sweeps_run, trace.converged
        );
    }

    let table = out_dir.join(format!("{solver}_beam_table.csv"));
    export_beam_table_csv(
        &run.config.as_elementwise(),
        config.quantization.tau_step_s,
        &table,
    )?;
    println!("beam table written: {}", table.display());
    Ok(())
}

fn angle_range(min: f64, max: f64, step: f64) -> anyhow::Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        bail!("angle step must be positive, got {step}");
    }
    let count = ((max - min) / step).floor() as usize + 1;
    if count < 2 {
        bail!("angle grid needs at least 2 points per axis (range {min}..{max}, step {step})");
    }
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

fn eval_map(
    args: ConfigArgs,
    solver_name: &str,
    az_step: f64,
    el_step: f64,
    el_slice: Option<f64>,
) -> anyhow::Result<()> {
    let solver = SolverKind::parse(solver_name)?;
    let config = load(&args)?;
    let out_dir = config.output_dir.clone();
    let geometry = config.geometry()?;
    let grid = config.grid()?;
    let (_, scenario) = scenario_for(&config)?;

    let run = run_solver(&config, &scenario, solver)?;
    let elementwise = run.config.as_elementwise();

    let az = angle_range(config.map.az_min_deg, config.map.az_max_deg, az_step)?;
    let el = angle_range(config.map.el_min_deg, config.map.el_max_deg, el_step)?;
    let map = gain_map(
        &geometry,
        &grid,
        &elementwise,
        &az,
        &el,
        MapReduction::MaxOverSubcarriers,
    )?;
    let csv = out_dir.join(format!("{solver}_gain_map.csv"));
    export_gain_map_csv(&map, &csv)?;
    let json = out_dir.join(format!("{solver}_gain_map.json"));
    export_gain_map_json(&map, &json)?;
    println!(
        "gain map: {} ({} azimuth x {} elevation points)",
        csv.display(),
        az.len(),
        el.len()
    );

    if let Some(el_fixed) = el_slice {
        let slice = gain_map(
            &geometry,
            &grid,
            &elementwise,
            &az,
            &[el_fixed],
            MapReduction::PerSubcarrier,
        )?;
        let path = out_dir.join(format!("{solver}_az_freq_el{el_fixed}.csv"));
        export_az_frequency_csv(&slice, &grid, &path)?;
        println!("azimuth-frequency slice: {}", path.display());
    }
    Ok(())
}

fn sweep(args: ConfigArgs) -> anyhow::Result<()> {
    let config = load(&args)?;
    let records = run_experiment(&config)?;
    let ok = records.iter().filter(|r| r.succeeded()).count();
    println!(
        "{} runs ({} succeeded), results in {}",
        records.len(),
        ok,
        config.output_dir.display()
    );
    println!("{:<14} {:<14} {:>10} {:>12}", "scenario", "solver", "G_l(dB)", "time(s)");
    for r in &records {
        match &r.error {
            None => println!(
                "{:<14} {:<14} {:>10.3} {:>12.3}",
                r.scenario_id, r.solver, r.gl_db, r.wall_time_s
            ),
            Some(e) => println!("{:<14} {:<14} failed: {e}", r.scenario_id, r.solver),
        }
    }
    Ok(())
}

fn compare(args: ConfigArgs, solvers: &str) -> anyhow::Result<()> {
    let names: Vec<String> = solvers
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        bail!("--solvers must list at least one solver");
    }
    let kinds: Vec<SolverKind> = names
        .iter()
        .map(|n| SolverKind::parse(n))
        .collect::<jpta_harness::Result<_>>()?;

    let mut config = load(&args)?;
    config.solvers = kinds.iter().map(|k| k.name().to_string()).collect();
    let records = run_experiment(&config)?;

    // Objective matrix: one row per scenario, one column per solver.
    let mut scenario_ids: Vec<String> = records.iter().map(|r| r.scenario_id.clone()).collect();
    scenario_ids.dedup();
    print!("{:<14}", "scenario");
    for k in &kinds {
        print!(" {:>14}", k.name());
    }
    println!();
    let gl_of = |sid: &str, solver: &str| -> Option<f64> {
        records
            .iter()
            .find(|r| r.scenario_id == sid && r.solver == solver && r.succeeded())
            .map(|r| r.gl_db)
    };
    for sid in &scenario_ids {
        print!("{sid:<14}");
        for k in &kinds {
            match gl_of(sid, k.name()) {
                Some(gl) => print!(" {gl:>14.3}"),
                None => print!(" {:>14}", "failed"),
            }
        }
        println!();
    }

    println!("\npairwise mean deltas (dB):");
    for i in 0..kinds.len() {
        for j in (i + 1)..kinds.len() {
            let deltas: Vec<f64> = scenario_ids
                .iter()
                .filter_map(|sid| {
                    Some(gl_of(sid, kinds[i].name())? - gl_of(sid, kinds[j].name())?)
                })
                .collect();
            if deltas.is_empty() {
                continue;
            }
            let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
            println!("  {} - {}: {mean:+.3}", kinds[i].name(), kinds[j].name());
        }
    }
    Ok(())
}
