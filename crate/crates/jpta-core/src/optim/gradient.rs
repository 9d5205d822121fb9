//! Analytic objective gradients and gradient descent with adaptive moment
//! estimation.
//!
//! Descent runs on a per-element reparameterization that keeps both
//! coordinates in radians with comparable sensitivity: `u` is the phase at
//! the center frequency (`phi + 2 pi f_c tau`) and `v` the extra phase at
//! the band edge (`2 pi delta_f (M/2) tau`). The applied per-subcarrier
//! phase is then `u + m' v / (M/2)`, which the raw `(phi, tau)` pair
//! reproduces exactly, while raw delays in seconds would couple the carrier
//! term into every step and make fixed-step descent ill-scaled.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{JptaConfig, SeparatedJptaConfig};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, FrequencyGrid};
use crate::linsys::UserScenario;
use crate::optim::band::{joint_steer_table, BandLayout, DB_PER_LN};
use crate::optim::{OptimizationTrace, OptimizerSettings, QuantizationSpec};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
/// The relative-change convergence rule is evaluated over this many steps.
const CONVERGENCE_WINDOW: usize = 50;

/// Analytic gradient of the log-mean objective for a per-element
/// configuration, as `(d/d phase, d/d delay)` flattened row-major. Units are
/// radians and seconds.
pub fn gl_gradient(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    scenario: &UserScenario,
    config: &JptaConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !config.matches(geometry) {
        return Err(Error::DimensionMismatch {
            got_az: config.n_az(),
            got_el: config.n_el(),
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
        });
    }
    let layout = BandLayout::new(geometry, grid, scenario)?;
    let steer = joint_steer_table(geometry, &layout);
    let mc = layout.m_count;
    let n = geometry.element_count();

    let mut terms = vec![Complex64::new(0.0, 0.0); n * mc];
    for (e, row) in terms.chunks_mut(mc).enumerate() {
        let phi = config.phases()[e];
        let tau = config.delays()[e];
        for m in 0..mc {
            let h = phi + std::f64::consts::TAU * layout.freqs[m] * tau;
            row[m] = Complex64::cis(h) * steer[e * mc + m];
        }
    }
    let mut s = vec![Complex64::new(0.0, 0.0); mc];
    for row in terms.chunks(mc) {
        for (acc, &t) in s.iter_mut().zip(row) {
            *acc += t;
        }
    }

    let power = layout.power_sums(&s);
    let means = layout.means_from_power(&power);
    for &g in &means {
        if !(g > 0.0) {
            return Err(Error::NonPositiveGain { value: g });
        }
    }

    // r(m) folds every per-subcarrier factor that multiplies the term:
    // the chain weight of the owner's mean and the |S|^2 derivative.
    let mut r = vec![Complex64::new(0.0, 0.0); mc];
    for (u, block) in layout.blocks.iter().enumerate() {
        let coef = DB_PER_LN * layout.inv_len[u] / means[u] * (-2.0 / layout.nn);
        for m in block.clone() {
            r[m] = s[m].conj() * coef;
        }
    }

    let mut g_phase = vec![0.0; n];
    let mut g_delay = vec![0.0; n];
    for e in 0..n {
        let row = &terms[e * mc..(e + 1) * mc];
        let mut d_phi = 0.0;
        let mut d_tau = 0.0;
        for m in 0..mc {
            let im = (r[m] * row[m]).im;
            d_phi += im;
            d_tau += std::f64::consts::TAU * layout.freqs[m] * im;
        }
        g_phase[e] = d_phi;
        g_delay[e] = d_tau;
    }
    Ok((g_phase, g_delay))
}

/// Per-element descent state: the two coordinates plus Adam moments.
#[derive(Clone, Copy, Default)]
struct ParamState {
    u: f64,
    v: f64,
    m1u: f64,
    m2u: f64,
    m1v: f64,
    m2v: f64,
}

/// One parameter family (per-element pairs sharing steering geometry):
/// the full array for the joint variant, one axis for the separated one.
///
/// The combined per-term angle `u + m' v/(M/2) - pi (f_m/f_c) c_e` is linear
/// in `m` within each user's block, so every pass regenerates terms from two
/// `cis` evaluations per (element, block) and a rotation recurrence; no
/// steering table is stored or read.
struct Family {
    st: Vec<ParamState>,
    /// Per-element steering coefficient toward each user, `[element][user]`.
    coeffs: Vec<f64>,
    users: usize,
    blocks: Vec<std::ops::Range<usize>>,
    /// f_m / f_c at each block start.
    block_ratio: Vec<f64>,
    /// Per-index ratio increment, delta_f / f_c.
    rho: f64,
    half: f64,
    mc: usize,
}

/// Elements per parallel work unit; fixed so float merges are deterministic
/// regardless of thread count.
const CHUNK: usize = 32;

impl Family {
    fn new(st: Vec<ParamState>, coeffs: Vec<f64>, layout: &BandLayout, grid: &FrequencyGrid) -> Self {
        let blocks = layout.blocks.clone();
        let block_ratio = blocks.iter().map(|b| layout.ratios[b.start]).collect();
        Self {
            st,
            coeffs,
            users: layout.user_count(),
            blocks,
            block_ratio,
            rho: grid.delta_f() / grid.f_c(),
            half: grid.half() as f64,
            mc: layout.m_count,
        }
    }

    #[inline]
    fn block_recurrence(&self, state: &ParamState, e: usize, b: usize) -> (Complex64, Complex64) {
        let delta = if self.half > 0.0 { state.v / self.half } else { 0.0 };
        let c = self.coeffs[e * self.users + b];
        let ms = self.blocks[b].start as f64 - self.half;
        let theta0 = state.u + ms * delta - std::f64::consts::PI * self.block_ratio[b] * c;
        let omega = delta - std::f64::consts::PI * self.rho * c;
        (Complex64::cis(theta0), Complex64::cis(omega))
    }

    /// Per-subcarrier array sums of the current parameters.
    fn sums(&self) -> Vec<Complex64> {
        let partials: Vec<Vec<Complex64>> = self
            .st
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(chunk, states)| {
                let mut partial = vec![Complex64::new(0.0, 0.0); self.mc];
                for (i, state) in states.iter().enumerate() {
                    let e = chunk * CHUNK + i;
                    for b in 0..self.blocks.len() {
                        let (mut cur, rot) = self.block_recurrence(state, e, b);
                        for acc in &mut partial[self.blocks[b].clone()] {
                            *acc += cur;
                            cur *= rot;
                        }
                    }
                }
                partial
            })
            .collect();
        let mut s = vec![Complex64::new(0.0, 0.0); self.mc];
        for partial in partials {
            for (acc, t) in s.iter_mut().zip(partial) {
                *acc += t;
            }
        }
        s
    }

    /// Gradient moments against `r`, loss scaling, and the Adam update,
    /// fused into one parallel pass over elements.
    fn step(&mut self, r: &[Complex64], scale: f64, lr: f64, t: usize) {
        let bias1 = 1.0 - ADAM_BETA1.powi(t as i32);
        let bias2 = 1.0 - ADAM_BETA2.powi(t as i32);
        let half = self.half;
        let users = self.users;
        let coeffs = &self.coeffs;
        let blocks = &self.blocks;
        let block_ratio = &self.block_ratio;
        let rho = self.rho;
        self.st
            .par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(chunk, states)| {
                for (i, state) in states.iter_mut().enumerate() {
                    let e = chunk * CHUNK + i;
                    let delta = if half > 0.0 { state.v / half } else { 0.0 };
                    let mut s0 = 0.0;
                    let mut s1 = 0.0;
                    for (b, block) in blocks.iter().enumerate() {
                        let c = coeffs[e * users + b];
                        let ms = block.start as f64 - half;
                        let theta0 = state.u + ms * delta
                            - std::f64::consts::PI * block_ratio[b] * c;
                        let omega = delta - std::f64::consts::PI * rho * c;
                        let mut cur = Complex64::cis(theta0);
                        let rot = Complex64::cis(omega);
                        for (m, &rm) in r[block.clone()].iter().enumerate() {
                            let im = (rm * cur).im;
                            s0 += im;
                            s1 += (block.start + m) as f64 * im;
                            cur *= rot;
                        }
                    }
                    // s1 accumulated against the raw index; recenter.
                    s1 -= half * s0;
                    let gu = scale * s0;
                    let gv = if half > 0.0 { scale * s1 / half } else { 0.0 };
                    state.m1u = ADAM_BETA1 * state.m1u + (1.0 - ADAM_BETA1) * gu;
                    state.m2u = ADAM_BETA2 * state.m2u + (1.0 - ADAM_BETA2) * gu * gu;
                    state.u -= lr * (state.m1u / bias1) / ((state.m2u / bias2).sqrt() + ADAM_EPS);
                    state.m1v = ADAM_BETA1 * state.m1v + (1.0 - ADAM_BETA1) * gv;
                    state.m2v = ADAM_BETA2 * state.m2v + (1.0 - ADAM_BETA2) * gv * gv;
                    state.v -= lr * (state.m1v / bias1) / ((state.m2v / bias2).sqrt() + ADAM_EPS);
                }
            });
    }
}

/// Per-element joint steering coefficients toward each user.
fn joint_coeffs(geometry: &ArrayGeometry, layout: &BandLayout) -> Vec<f64> {
    let users = layout.user_count();
    let mut coeffs = Vec::with_capacity(geometry.element_count() * users);
    for y in 0..geometry.n_az() {
        for z in 0..geometry.n_el() {
            for &(a, b) in &layout.coeffs {
                coeffs.push(y as f64 * a + z as f64 * b);
            }
        }
    }
    coeffs
}

/// Per-element axis steering coefficients toward each user.
fn axis_coeffs(n: usize, layout: &BandLayout, pick: impl Fn(usize) -> f64) -> Vec<f64> {
    let users = layout.user_count();
    let mut coeffs = Vec::with_capacity(n * users);
    for e in 0..n {
        for u in 0..users {
            coeffs.push(e as f64 * pick(u));
        }
    }
    coeffs
}

fn window_converged(history: &[f64], zeta: f64) -> bool {
    let n = history.len();
    if n <= CONVERGENCE_WINDOW {
        return false;
    }
    let later = history[n - 1];
    let first = history[n - 1 - CONVERGENCE_WINDOW];
    later.is_finite() && (later - first).abs() < zeta * later.abs()
}

fn states_from_config(phases: &[f64], delays: &[f64], grid: &FrequencyGrid) -> Vec<ParamState> {
    let kappa = std::f64::consts::TAU * grid.delta_f() * grid.half() as f64;
    phases
        .iter()
        .zip(delays)
        .map(|(&p, &t)| ParamState {
            u: p + std::f64::consts::TAU * grid.f_c() * t,
            v: kappa * t,
            ..Default::default()
        })
        .collect()
}

/// Map `(u, v)` back to hardware phase/delay. On a single-subcarrier grid the
/// ramp coordinate is undefined and the whole setting folds into the phase.
fn states_to_config(states: &[ParamState], grid: &FrequencyGrid) -> (Vec<f64>, Vec<f64>) {
    let kappa = std::f64::consts::TAU * grid.delta_f() * grid.half() as f64;
    let delays: Vec<f64> = if kappa > 0.0 {
        states.iter().map(|s| s.v / kappa).collect()
    } else {
        vec![0.0; states.len()]
    };
    let phases: Vec<f64> = states
        .iter()
        .zip(&delays)
        .map(|(s, &t)| {
            (s.u - std::f64::consts::TAU * grid.f_c() * t).rem_euclid(std::f64::consts::TAU)
        })
        .collect();
    (phases, delays)
}

/// Gradient descent on the per-element configuration: continuous variables
/// start from the quantized init and the final result is re-quantized.
pub fn gd_optimize_joint(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    scenario: &UserScenario,
    init: &JptaConfig,
    spec: &QuantizationSpec,
    settings: &OptimizerSettings,
) -> Result<(JptaConfig, OptimizationTrace)> {
    spec.validate()?;
    settings.validate()?;
    if !init.matches(geometry) {
        return Err(Error::DimensionMismatch {
            got_az: init.n_az(),
            got_el: init.n_el(),
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
        });
    }
    let layout = BandLayout::new(geometry, grid, scenario)?;
    let mc = layout.m_count;
    let glmax = scenario.user_count() as f64 * 10.0 * layout.nn.log10();

    let (q, _) = spec.quantize_aligned(init, grid.f_c());
    let mut family = Family::new(
        states_from_config(q.phases(), q.delays(), grid),
        joint_coeffs(geometry, &layout),
        &layout,
        grid,
    );

    let mut r = vec![Complex64::new(0.0, 0.0); mc];
    let mut history = Vec::new();
    let mut losses = Vec::new();
    let mut converged = false;
    let mut steps = 0;
    for step in 0..settings.max_sweeps {
        let s = family.sums();
        let power = layout.power_sums(&s);
        let means = layout.means_from_power(&power);
        for &g in &means {
            if !(g > 0.0) {
                return Err(Error::NonPositiveGain { value: g });
            }
        }
        let gl = layout.gl_from_power(&power);
        let loss = (glmax - gl) * (glmax - gl);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { step });
        }
        history.push(gl);
        losses.push(loss);
        steps = step + 1;
        if window_converged(&history, settings.zeta) {
            converged = true;
            break;
        }
        for (u, block) in layout.blocks.iter().enumerate() {
            let coef = DB_PER_LN * layout.inv_len[u] / means[u] * (-2.0 / layout.nn);
            for m in block.clone() {
                r[m] = s[m].conj() * coef;
            }
        }
        let scale = -2.0 * (glmax - gl);
        family.step(&r, scale, settings.learning_rate, step + 1);
    }

    let (phases, delays) = states_to_config(&family.st, grid);
    let raw = JptaConfig::new(geometry, phases, delays)?;
    let (normalized, _) = raw.normalize_delays(grid.f_c(), Some(spec.tau_max));
    let (final_config, _) = spec.quantize_aligned(&normalized, grid.f_c());
    Ok((
        final_config,
        OptimizationTrace {
            objective_history: history,
            loss_history: losses,
            sweeps_run: steps,
            converged,
        },
    ))
}

/// Gradient descent on the axis-factored configuration.
pub fn gd_optimize_separated(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    scenario: &UserScenario,
    init: &SeparatedJptaConfig,
    spec: &QuantizationSpec,
    settings: &OptimizerSettings,
) -> Result<(SeparatedJptaConfig, OptimizationTrace)> {
    spec.validate()?;
    settings.validate()?;
    if !init.matches(geometry) {
        return Err(Error::DimensionMismatch {
            got_az: init.n_az(),
            got_el: init.n_el(),
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
        });
    }
    let layout = BandLayout::new(geometry, grid, scenario)?;
    let mc = layout.m_count;
    let glmax = scenario.user_count() as f64 * 10.0 * layout.nn.log10();

    let (q, _) = spec.quantize_aligned_separated(init, grid.f_c());
    let mut az = Family::new(
        states_from_config(q.phase_az(), q.delay_az(), grid),
        axis_coeffs(geometry.n_az(), &layout, |u| layout.coeffs[u].0),
        &layout,
        grid,
    );
    let mut el = Family::new(
        states_from_config(q.phase_el(), q.delay_el(), grid),
        axis_coeffs(geometry.n_el(), &layout, |u| layout.coeffs[u].1),
        &layout,
        grid,
    );

    let mut r_az = vec![Complex64::new(0.0, 0.0); mc];
    let mut r_el = vec![Complex64::new(0.0, 0.0); mc];
    let mut history = Vec::new();
    let mut losses = Vec::new();
    let mut converged = false;
    let mut steps = 0;
    for step in 0..settings.max_sweeps {
        let s_az = az.sums();
        let s_el = el.sums();
        let mut power = vec![0.0; layout.user_count()];
        for (u, block) in layout.blocks.iter().enumerate() {
            for m in block.clone() {
                power[u] += s_az[m].norm_sqr() * s_el[m].norm_sqr();
            }
        }
        let means = layout.means_from_power(&power);
        for &g in &means {
            if !(g > 0.0) {
                return Err(Error::NonPositiveGain { value: g });
            }
        }
        let gl = layout.gl_from_power(&power);
        let loss = (glmax - gl) * (glmax - gl);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { step });
        }
        history.push(gl);
        losses.push(loss);
        steps = step + 1;
        if window_converged(&history, settings.zeta) {
            converged = true;
            break;
        }
        // The other axis's power weights each axis's residual derivative.
        for (u, block) in layout.blocks.iter().enumerate() {
            let coef = DB_PER_LN * layout.inv_len[u] / means[u] * (-2.0 / layout.nn);
            for m in block.clone() {
                r_az[m] = s_az[m].conj() * (coef * s_el[m].norm_sqr());
                r_el[m] = s_el[m].conj() * (coef * s_az[m].norm_sqr());
            }
        }
        let scale = -2.0 * (glmax - gl);
        az.step(&r_az, scale, settings.learning_rate, step + 1);
        el.step(&r_el, scale, settings.learning_rate, step + 1);
    }

    let (phase_az, delay_az) = states_to_config(&az.st, grid);
    let (phase_el, delay_el) = states_to_config(&el.st, grid);
    let raw = SeparatedJptaConfig::new(geometry, phase_az, delay_az, phase_el, delay_el)?;
    let (normalized, _) = raw.normalize_delays(grid.f_c(), Some(spec.tau_max));
    let (final_config, _) = spec.quantize_aligned_separated(&normalized, grid.f_c());
    Ok((
        final_config,
        OptimizationTrace {
            objective_history: history,
            loss_history: losses,
            sweeps_run: steps,
            converged,
        },
    ))
}
