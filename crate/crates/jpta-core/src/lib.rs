//! Frequency-dependent 3D beam design for joint phase-time arrays.
//!
//! A joint phase-time array gives every element of a rectangular antenna
//! panel a phase shifter and a true-time-delay unit, so a single RF chain can
//! point different OFDM subbands at different users. This crate provides:
//!
//! - domain types for the array, the subcarrier lattice, directions, and the
//!   per-element or axis-factored phase/delay settings ([`geometry`],
//!   [`config`]);
//! - gain evaluation, subband means, the log-mean objective, and angle-grid
//!   gain maps ([`gain`]);
//! - the per-antenna stacked linear systems with least-squares and
//!   infinity-norm line fits, plus the joint and separated analytic solvers
//!   ([`linsys`]);
//! - hardware quantization, greedy coordinate ascent, and Adam-driven
//!   gradient descent ([`optim`]).
//!
//! All evaluation is pure and deterministic; parallel paths write disjoint
//! outputs or merge with order-insensitive reductions.

pub mod config;
pub mod error;
pub mod gain;
pub mod geometry;
pub mod linsys;
pub mod optim;

pub use config::{DelaySpanWarning, JptaConfig, SeparatedJptaConfig};
pub use error::{Error, Result};
pub use gain::{
    gain, gain_map, gain_separated, log_mean_gain, steering_phase, user_mean_gain, GainMap,
    MapReduction, MetricsReport,
};
pub use geometry::{ArrayGeometry, Direction, FrequencyGrid};
pub use linsys::{
    build_system, joint_analytic, k_offsets, nu, separated_analytic, solve_ls, solve_minimax,
    FitCriterion, FitResult, SubbandSystem, UserScenario,
};
pub use optim::{
    gd_optimize_joint, gd_optimize_separated, gl_gradient, greedy_optimize_joint,
    greedy_optimize_separated, OptimizationTrace, OptimizerSettings, QuantizationSpec,
    QuantizeReport,
};
