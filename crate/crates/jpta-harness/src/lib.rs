//! Experiment harness for JPTA beam design: configuration files, user
//! placement, solver orchestration, and plot-ready CSV/JSON exports.

pub mod config;
pub mod error;
pub mod export;
pub mod place;
pub mod run;

pub use config::{ExperimentConfig, MapSection, OUTPUT_DIR_ENV};
pub use error::{HarnessError, Result};
pub use export::{
    export_az_frequency_csv, export_beam_table_csv, export_gain_map_csv, export_gain_map_json,
    export_metrics_csv, export_metrics_json, import_metrics_csv, persist_records, MetricsRow,
};
pub use place::place_users;
pub use run::{
    config_digest, evaluate_metrics, run_experiment, run_solver, scenario_points, BeamConfig,
    RunRecord, ScenarioPoint, SolverKind, SolverRun, ALL_SOLVERS,
};
