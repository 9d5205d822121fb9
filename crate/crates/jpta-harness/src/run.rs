//! Solver dispatch and experiment orchestration.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use jpta_core::{
    gd_optimize_joint, gd_optimize_separated, greedy_optimize_joint, greedy_optimize_separated,
    joint_analytic, separated_analytic, user_mean_gain, ArrayGeometry, Direction, FitCriterion,
    FrequencyGrid, JptaConfig, MetricsReport, OptimizationTrace, SeparatedJptaConfig, UserScenario,
};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::place::place_users;

/// The eight supported solver pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    JointLs,
    JointMinimax,
    SepLs,
    SepMinimax,
    GreedyJoint,
    GreedySep,
    GdJoint,
    GdSep,
}

pub const ALL_SOLVERS: [SolverKind; 8] = [
    SolverKind::JointLs,
    SolverKind::JointMinimax,
    SolverKind::SepLs,
    SolverKind::SepMinimax,
    SolverKind::GreedyJoint,
    SolverKind::GreedySep,
    SolverKind::GdJoint,
    SolverKind::GdSep,
];

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::JointLs => "joint-ls",
            SolverKind::JointMinimax => "joint-minimax",
            SolverKind::SepLs => "sep-ls",
            SolverKind::SepMinimax => "sep-minimax",
            SolverKind::GreedyJoint => "greedy-joint",
            SolverKind::GreedySep => "greedy-sep",
            SolverKind::GdJoint => "gd-joint",
            SolverKind::GdSep => "gd-sep",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        ALL_SOLVERS
            .iter()
            .find(|k| k.name() == name)
            .copied()
            .ok_or_else(|| HarnessError::UnknownSolver {
                name: name.to_string(),
                valid: ALL_SOLVERS
                    .iter()
                    .map(|k| k.name())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A solved beam in either parameterization.
#[derive(Debug, Clone)]
pub enum BeamConfig {
    Joint(JptaConfig),
    Separated(SeparatedJptaConfig),
}

impl BeamConfig {
    /// Per-element view, expanding the axis-factored form when needed.
    pub fn as_elementwise(&self) -> JptaConfig {
        match self {
            BeamConfig::Joint(c) => c.clone(),
            BeamConfig::Separated(c) => c.expand(),
        }
    }
}

/// One scenario of the experiment: directions plus bandwidth ratios.
#[derive(Debug, Clone)]
pub struct ScenarioPoint {
    pub id: String,
    pub directions: Vec<Direction>,
    pub alphas: Vec<f64>,
}

/// Result of one (scenario, solver) run.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub config: BeamConfig,
    pub metrics: MetricsReport,
    pub trace: Option<OptimizationTrace>,
}

/// Persisted record of one (scenario, solver) run; failures carry the error
/// text instead of metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario_id: String,
    pub solver: String,
    pub n_users: usize,
    pub alphas: Vec<f64>,
    pub subband_sizes: Vec<usize>,
    pub per_user_gain_db: Vec<f64>,
    pub gl_db: f64,
    pub wall_time_s: f64,
    pub converged: bool,
    pub config_digest: String,
    pub timestamp_unix_s: u64,
    pub gain_map_file: Option<String>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

/// Evaluate final metrics for a configuration: exact-ratio mean gain per
/// user over its subband.
pub fn evaluate_metrics(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    scenario: &UserScenario,
    config: &BeamConfig,
    solver: SolverKind,
    wall_time: f64,
) -> Result<MetricsReport> {
    let elementwise = config.as_elementwise();
    let mut means = Vec::with_capacity(scenario.user_count());
    for (i, &dir) in scenario.directions().iter().enumerate() {
        let band = scenario.subband_indices(i);
        means.push(user_mean_gain(geometry, grid, &elementwise, dir, &band)?);
    }
    Ok(MetricsReport::new(means, solver.name(), wall_time)?)
}

/// Run one solver pipeline end to end: analytic solve, normalization,
/// carrier-preserving quantization, optional iterative refinement, metrics.
pub fn run_solver(
    config: &ExperimentConfig,
    scenario: &UserScenario,
    solver: SolverKind,
) -> Result<SolverRun> {
    let geometry = config.geometry()?;
    let grid = config.grid()?;
    let spec = config.quantization_spec()?;
    let settings = config.optimizer_settings();

    let start = Instant::now();
    let (beam, trace) = match solver {
        SolverKind::JointLs | SolverKind::JointMinimax => {
            let criterion = if solver == SolverKind::JointLs {
                FitCriterion::LeastSquares
            } else {
                FitCriterion::Minimax
            };
            let analytic = joint_analytic(&geometry, &grid, scenario, criterion)?;
            let (q, _) = spec.quantize_aligned(&analytic, grid.f_c());
            (BeamConfig::Joint(q), None)
        }
        SolverKind::SepLs | SolverKind::SepMinimax => {
            let criterion = if solver == SolverKind::SepLs {
                FitCriterion::LeastSquares
            } else {
                FitCriterion::Minimax
            };
            let analytic = separated_analytic(&geometry, &grid, scenario, criterion)?;
            let (q, _) = spec.quantize_aligned_separated(&analytic, grid.f_c());
            (BeamConfig::Separated(q), None)
        }
        SolverKind::GreedyJoint => {
            let init = joint_analytic(&geometry, &grid, scenario, FitCriterion::LeastSquares)?;
            let (out, trace) =
                greedy_optimize_joint(&geometry, &grid, scenario, &init, &spec, &settings)?;
            (BeamConfig::Joint(out), Some(trace))
        }
        SolverKind::GreedySep => {
            let init = separated_analytic(&geometry, &grid, scenario, FitCriterion::LeastSquares)?;
            let (out, trace) =
                greedy_optimize_separated(&geometry, &grid, scenario, &init, &spec, &settings)?;
            (BeamConfig::Separated(out), Some(trace))
        }
        SolverKind::GdJoint => {
            let init = joint_analytic(&geometry, &grid, scenario, FitCriterion::LeastSquares)?;
            let (q, _) = spec.quantize_aligned(&init, grid.f_c());
            let (out, trace) = gd_optimize_joint(&geometry, &grid, scenario, &q, &spec, &settings)?;
            (BeamConfig::Joint(out), Some(trace))
        }
        SolverKind::GdSep => {
            let init = separated_analytic(&geometry, &grid, scenario, FitCriterion::LeastSquares)?;
            let (q, _) = spec.quantize_aligned_separated(&init, grid.f_c());
            let (out, trace) =
                gd_optimize_separated(&geometry, &grid, scenario, &q, &spec, &settings)?;
            (BeamConfig::Separated(out), Some(trace))
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    let metrics = evaluate_metrics(&geometry, &grid, scenario, &beam, solver, wall_time)?;
    Ok(SolverRun {
        config: beam,
        metrics,
        trace,
    })
}

/// Stable hash of the resolved configuration.
pub fn config_digest(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Expand the configured sweep into scenario points. Without a sweep there
/// is a single point from the base users.
pub fn scenario_points(config: &ExperimentConfig) -> Result<Vec<ScenarioPoint>> {
    let base_directions = config.base_directions()?;
    let base_alphas = match &config.users.alphas {
        Some(a) => a.clone(),
        None => vec![1.0 / base_directions.len() as f64; base_directions.len()],
    };

    let mut points = Vec::new();
    match &config.sweep {
        None => points.push(ScenarioPoint {
            id: "s000".to_string(),
            directions: base_directions,
            alphas: base_alphas,
        }),
        Some(sweep) => {
            if let Some(alpha_sets) = &sweep.alphas {
                for (i, alphas) in alpha_sets.iter().enumerate() {
                    if alphas.len() != base_directions.len() {
                        return Err(HarnessError::InvalidConfig(format!(
                            "sweep.alphas[{i}] has {} ratios for {} users",
                            alphas.len(),
                            base_directions.len()
                        )));
                    }
                    points.push(ScenarioPoint {
                        id: format!("s{:03}_a{:.3}", points.len(), alphas[0]),
                        directions: base_directions.clone(),
                        alphas: alphas.clone(),
                    });
                }
            }
            if let Some(counts) = &sweep.n_users {
                for &n in counts {
                    let directions = place_users(n)?;
                    points.push(ScenarioPoint {
                        id: format!("s{:03}_u{n}", points.len()),
                        directions,
                        alphas: vec![1.0 / n as f64; n],
                    });
                }
            }
            if points.is_empty() {
                return Err(HarnessError::InvalidConfig(
                    "sweep section given but empty; set sweep.alphas or sweep.n_users".into(),
                ));
            }
        }
    }
    Ok(points)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn record_for(
    config: &ExperimentConfig,
    digest: &str,
    point: &ScenarioPoint,
    solver: SolverKind,
) -> RunRecord {
    let m_count = config.frequency.m_count;
    let outcome = UserScenario::new(point.directions.clone(), point.alphas.clone(), m_count)
        .map_err(HarnessError::from)
        .and_then(|scenario| {
            let run = run_solver(config, &scenario, solver)?;
            Ok((scenario, run))
        });
    match outcome {
        Ok((scenario, run)) => RunRecord {
            scenario_id: point.id.clone(),
            solver: solver.name().to_string(),
            n_users: point.directions.len(),
            alphas: point.alphas.clone(),
            subband_sizes: scenario.subbands().iter().map(|r| r.len()).collect(),
            per_user_gain_db: run.metrics.per_user_gain_db(),
            gl_db: run.metrics.log_mean_gain,
            wall_time_s: run.metrics.wall_time,
            converged: run.trace.as_ref().map(|t| t.converged).unwrap_or(true),
            config_digest: digest.to_string(),
            timestamp_unix_s: unix_now(),
            gain_map_file: None,
            error: None,
        },
        Err(e) => RunRecord {
            scenario_id: point.id.clone(),
            solver: solver.name().to_string(),
            n_users: point.directions.len(),
            alphas: point.alphas.clone(),
            subband_sizes: Vec::new(),
            per_user_gain_db: Vec::new(),
            gl_db: f64::NAN,
            wall_time_s: 0.0,
            converged: false,
            config_digest: digest.to_string(),
            timestamp_unix_s: unix_now(),
            gain_map_file: None,
            error: Some(e.to_string()),
        },
    }
}

/// Run every configured solver on every scenario point, in parallel up to
/// the configured worker cap. One record per (point, solver); failures are
/// recorded without aborting the rest. Records are persisted to the output
/// directory before returning, sorted by scenario id then solver name.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let solvers: Vec<SolverKind> = config
        .solvers
        .iter()
        .map(|s| SolverKind::parse(s))
        .collect::<Result<_>>()?;
    let points = scenario_points(config)?;
    let digest = config_digest(config);

    let jobs: Vec<(&ScenarioPoint, SolverKind)> = points
        .iter()
        .flat_map(|p| solvers.iter().map(move |&s| (p, s)))
        .collect();

    let run_all = || -> Vec<RunRecord> {
        jobs.par_iter()
            .map(|(point, solver)| record_for(config, &digest, point, *solver))
            .collect()
    };
    let mut records = match config.workers {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::InvalidConfig(format!("worker pool: {e}")))?
            .install(run_all),
        _ => run_all(),
    };
    records.sort_by(|a, b| {
        (a.scenario_id.as_str(), a.solver.as_str()).cmp(&(b.scenario_id.as_str(), b.solver.as_str()))
    });

    crate::export::persist_records(&records, &config.output_dir)?;
    Ok(records)
}
