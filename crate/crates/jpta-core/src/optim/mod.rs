//! Iterative improvement of analytic configurations: hardware quantization,
//! greedy coordinate ascent over the quantized grids, and gradient descent
//! with adaptive moment estimation on the log-mean-gain objective.

mod band;
mod gradient;
mod greedy;

pub use gradient::{gd_optimize_joint, gd_optimize_separated, gl_gradient};
pub use greedy::{greedy_optimize_joint, greedy_optimize_separated};

use std::f64::consts::TAU;

use crate::config::{JptaConfig, SeparatedJptaConfig};
use crate::error::{Error, Result};

/// Hardware quantization grids: delays on `{0, tau_step, ..., tau_max}` and
/// phases on the `2^phase_bits`-point circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationSpec {
    /// Delay quantization step in seconds.
    pub tau_step: f64,
    /// Maximum delay in seconds.
    pub tau_max: f64,
    /// Phase precision in bits.
    pub phase_bits: u32,
}

/// Counts of out-of-range delays clamped during quantization.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuantizeReport {
    pub clamped_delays: usize,
    /// Largest distance from the hardware range among clamped delays.
    pub worst_excess: f64,
}

impl QuantizationSpec {
    pub fn new(tau_step: f64, tau_max: f64, phase_bits: u32) -> Result<Self> {
        let spec = Self {
            tau_step,
            tau_max,
            phase_bits,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_step > 0.0) || !self.tau_step.is_finite() {
            return Err(Error::InvalidQuantization {
                reason: format!("tau_step must be positive, got {}", self.tau_step),
            });
        }
        if !(self.tau_max >= self.tau_step) || !self.tau_max.is_finite() {
            return Err(Error::InvalidQuantization {
                reason: format!(
                    "tau_max must be at least tau_step, got {} < {}",
                    self.tau_max, self.tau_step
                ),
            });
        }
        if self.phase_bits == 0 || self.phase_bits > 30 {
            return Err(Error::InvalidQuantization {
                reason: format!("phase_bits must be in 1..=30, got {}", self.phase_bits),
            });
        }
        Ok(())
    }

    /// Number of delay grid points.
    pub fn delay_levels(&self) -> usize {
        (self.tau_max / self.tau_step + 1e-9).floor() as usize + 1
    }

    /// Number of phase grid points, `2^phase_bits`.
    pub fn phase_levels(&self) -> usize {
        1usize << self.phase_bits
    }

    pub fn delay_grid_value(&self, idx: usize) -> f64 {
        idx as f64 * self.tau_step
    }

    pub fn phase_step(&self) -> f64 {
        TAU / self.phase_levels() as f64
    }

    pub fn phase_grid_value(&self, idx: usize) -> f64 {
        idx as f64 * self.phase_step()
    }

    /// Nearest delay grid point; ties round to the larger value. Delays
    /// outside `[0, tau_max]` clamp to the nearest end and are flagged.
    pub fn quantize_delay(&self, tau: f64) -> (f64, bool) {
        let levels = self.delay_levels();
        if tau < 0.0 {
            return (0.0, true);
        }
        if tau > self.tau_max * (1.0 + 1e-12) {
            return (self.delay_grid_value(levels - 1), true);
        }
        let idx = ((tau / self.tau_step).round() as usize).min(levels - 1);
        (self.delay_grid_value(idx), false)
    }

    /// Nearest phase grid point under the circular metric; ties round to the
    /// larger value, and the wrap lands on zero.
    pub fn quantize_phase(&self, phi: f64) -> f64 {
        let levels = self.phase_levels();
        let wrapped = phi.rem_euclid(TAU);
        let idx = (wrapped / self.phase_step()).round() as usize % levels;
        self.phase_grid_value(idx)
    }

    pub(crate) fn delay_index_of(&self, tau: f64) -> usize {
        let levels = self.delay_levels();
        ((tau / self.tau_step).round() as usize).min(levels - 1)
    }

    pub(crate) fn phase_index_of(&self, phi: f64) -> usize {
        let levels = self.phase_levels();
        ((phi.rem_euclid(TAU) / self.phase_step()).round() as usize) % levels
    }

    /// Quantize a per-element configuration, keeping the applied
    /// carrier-frequency phase intact: the delay moves to its grid point
    /// first and the phase absorbs the carrier term of the delay change,
    /// `2 pi f_c (tau - tau_q)`, before its own rounding.
    ///
    /// Plain per-entry rounding (see [`Self::quantize`]) perturbs the
    /// carrier phase by many turns per element and collapses a solved beam;
    /// this variant is what solver pipelines should use.
    pub fn quantize_aligned(&self, config: &JptaConfig, f_c: f64) -> (JptaConfig, QuantizeReport) {
        let mut report = QuantizeReport::default();
        let n = config.phases().len();
        let mut phase = Vec::with_capacity(n);
        let mut delay = Vec::with_capacity(n);
        for e in 0..n {
            let t = config.delays()[e];
            let (tq, clamped) = self.quantize_delay(t);
            if clamped {
                report.clamped_delays += 1;
                report.worst_excess = report.worst_excess.max((t - self.tau_max).max(-t));
            }
            let compensated = config.phases()[e] + TAU * f_c * (t - tq);
            phase.push(self.quantize_phase(compensated));
            delay.push(tq);
        }
        let geometry = crate::geometry::ArrayGeometry::new(config.n_az(), config.n_el())
            .expect("config dimensions are valid");
        (
            JptaConfig::new(&geometry, phase, delay).expect("quantized values are finite"),
            report,
        )
    }

    /// Carrier-preserving quantization of an axis-factored configuration.
    pub fn quantize_aligned_separated(
        &self,
        config: &SeparatedJptaConfig,
        f_c: f64,
    ) -> (SeparatedJptaConfig, QuantizeReport) {
        let mut report = QuantizeReport::default();
        let mut axis = |phases: &[f64], delays: &[f64]| -> (Vec<f64>, Vec<f64>) {
            let mut ps = Vec::with_capacity(phases.len());
            let mut ds = Vec::with_capacity(delays.len());
            for (&p, &t) in phases.iter().zip(delays) {
                let (tq, clamped) = self.quantize_delay(t);
                if clamped {
                    report.clamped_delays += 1;
                    report.worst_excess = report.worst_excess.max((t - self.tau_max).max(-t));
                }
                ps.push(self.quantize_phase(p + TAU * f_c * (t - tq)));
                ds.push(tq);
            }
            (ps, ds)
        };
        let (phase_az, delay_az) = axis(config.phase_az(), config.delay_az());
        let (phase_el, delay_el) = axis(config.phase_el(), config.delay_el());
        let geometry = crate::geometry::ArrayGeometry::new(config.n_az(), config.n_el())
            .expect("config dimensions are valid");
        (
            SeparatedJptaConfig::new(&geometry, phase_az, delay_az, phase_el, delay_el)
                .expect("quantized values are finite"),
            report,
        )
    }

    /// Quantize every entry of a per-element configuration.
    pub fn quantize(&self, config: &JptaConfig) -> (JptaConfig, QuantizeReport) {
        let mut report = QuantizeReport::default();
        let phase: Vec<f64> = config.phases().iter().map(|&p| self.quantize_phase(p)).collect();
        let delay: Vec<f64> = config
            .delays()
            .iter()
            .map(|&t| {
                let (q, clamped) = self.quantize_delay(t);
                if clamped {
                    report.clamped_delays += 1;
                    report.worst_excess = report.worst_excess.max((t - self.tau_max).max(-t));
                }
                q
            })
            .collect();
        let geometry = crate::geometry::ArrayGeometry::new(config.n_az(), config.n_el())
            .expect("config dimensions are valid");
        (
            JptaConfig::new(&geometry, phase, delay).expect("quantized values are finite"),
            report,
        )
    }

    /// Quantize every entry of an axis-factored configuration.
    pub fn quantize_separated(
        &self,
        config: &SeparatedJptaConfig,
    ) -> (SeparatedJptaConfig, QuantizeReport) {
        let mut report = QuantizeReport::default();
        let mut do_delay = |t: f64| {
            let (q, clamped) = self.quantize_delay(t);
            if clamped {
                report.clamped_delays += 1;
                report.worst_excess = report.worst_excess.max((t - self.tau_max).max(-t));
            }
            q
        };
        let delay_az: Vec<f64> = config.delay_az().iter().map(|&t| do_delay(t)).collect();
        let delay_el: Vec<f64> = config.delay_el().iter().map(|&t| do_delay(t)).collect();
        let phase_az: Vec<f64> = config.phase_az().iter().map(|&p| self.quantize_phase(p)).collect();
        let phase_el: Vec<f64> = config.phase_el().iter().map(|&p| self.quantize_phase(p)).collect();
        let geometry = crate::geometry::ArrayGeometry::new(config.n_az(), config.n_el())
            .expect("config dimensions are valid");
        (
            SeparatedJptaConfig::new(&geometry, phase_az, delay_az, phase_el, delay_el)
                .expect("quantized values are finite"),
            report,
        )
    }
}

/// Convergence and iteration controls shared by the iterative optimizers.
///
/// `max_sweeps` caps greedy sweeps and gradient-descent steps. `seed` is
/// reserved for forward compatibility; both algorithms are deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Relative convergence threshold on the objective.
    pub zeta: f64,
    pub max_sweeps: usize,
    /// Gradient-descent step size.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        // Tight enough that greedy runs to its coordinate-wise fixed point
        // on full-size scenarios instead of stopping a few sweeps early.
        Self {
            zeta: 1e-6,
            max_sweeps: 500,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0) {
            return Err(Error::InvalidSettings {
                reason: format!("zeta must be positive, got {}", self.zeta),
            });
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidSettings {
                reason: format!("learning_rate must be positive, got {}", self.learning_rate),
            });
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidSettings {
                reason: "max_sweeps must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Objective trajectory of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    /// Objective per greedy sweep (including the starting point) or per
    /// gradient-descent step.
    pub objective_history: Vec<f64>,
    /// Continuous-domain loss per gradient-descent step; empty for greedy.
    pub loss_history: Vec<f64>,
    pub sweeps_run: usize,
    pub converged: bool,
}
