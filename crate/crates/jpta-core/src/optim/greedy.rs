//! Greedy coordinate ascent over the quantized phase/delay grids.
//!
//! Each sweep scans every coordinate twice: first all delays, then all
//! phases, replacing each by the grid argmax of the objective with every
//! other coordinate held fixed. A sweep's candidate evaluation is O(M+1) per
//! candidate because the per-subcarrier array sums are maintained
//! incrementally and a coordinate change touches one term of each sum.

use num_complex::Complex64;

use crate::config::{JptaConfig, SeparatedJptaConfig};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, FrequencyGrid};
use crate::linsys::UserScenario;
use crate::optim::band::{
    axis_steer_table, delay_candidate_table, joint_steer_table, phase_candidate_table, BandLayout,
};
use crate::optim::{OptimizationTrace, OptimizerSettings, QuantizationSpec};

/// One coordinate's candidate scan: returns the objective of the best grid
/// point and its index, keeping `current` on ties.
///
/// `weight[m]` carries every per-term factor that does not depend on the
/// candidate; `gains_other[m]` is an optional per-subcarrier multiplier used
/// by the separated variant (the other axis's power).
struct Scan<'a> {
    layout: &'a BandLayout,
    base: &'a [Complex64],
    weight: &'a [Complex64],
    gains_other: Option<&'a [f64]>,
}

impl Scan<'_> {
    fn objective(&self, factor_of: impl Fn(usize) -> Complex64) -> f64 {
        let mut gl = 0.0;
        for (u, block) in self.layout.blocks.iter().enumerate() {
            let mut power = 0.0;
            match self.gains_other {
                None => {
                    for m in block.clone() {
                        power += (self.base[m] + self.weight[m] * factor_of(m)).norm_sqr();
                    }
                }
                Some(other) => {
                    for m in block.clone() {
                        power += (self.base[m] + self.weight[m] * factor_of(m)).norm_sqr() * other[m];
                    }
                }
            }
            gl += 10.0 * (power * self.layout.inv_len[u] / self.layout.nn).log10();
        }
        gl
    }

    /// Scan vector candidates (delay rows of the candidate table).
    fn best_row(&self, table: &[Complex64], levels: usize, current: usize) -> (usize, f64) {
        let mc = self.layout.m_count;
        let mut best = (current, f64::NEG_INFINITY);
        let mut current_gl = f64::NEG_INFINITY;
        for c in 0..levels {
            let row = &table[c * mc..(c + 1) * mc];
            let gl = self.objective(|m| row[m]);
            if c == current {
                current_gl = gl;
            }
            if gl > best.1 {
                best = (c, gl);
            }
        }
        if best.1 > current_gl {
            best
        } else {
            (current, current_gl)
        }
    }

    /// Scan scalar candidates (phase factors).
    fn best_scalar(&self, factors: &[Complex64], current: usize) -> (usize, f64) {
        let mut best = (current, f64::NEG_INFINITY);
        let mut current_gl = f64::NEG_INFINITY;
        for (c, &p) in factors.iter().enumerate() {
            let gl = self.objective(|_| p);
            if c == current {
                current_gl = gl;
            }
            if gl > best.1 {
                best = (c, gl);
            }
        }
        if best.1 > current_gl {
            best
        } else {
            (current, current_gl)
        }
    }
}

/// Incremental coordinate state for one parameter family (one element set
/// sharing a steering table and the array sums `s`).
struct AxisState {
    delay_idx: Vec<usize>,
    phase_idx: Vec<usize>,
}

impl AxisState {
    fn term(
        &self,
        e: usize,
        m: usize,
        mc: usize,
        steer: &[Complex64],
        dtab: &[Complex64],
        ptab: &[Complex64],
    ) -> Complex64 {
        ptab[self.phase_idx[e]] * dtab[self.delay_idx[e] * mc + m] * steer[e * mc + m]
    }

    fn rebuild_sums(
        &self,
        s: &mut [Complex64],
        mc: usize,
        steer: &[Complex64],
        dtab: &[Complex64],
        ptab: &[Complex64],
    ) {
        s.fill(Complex64::new(0.0, 0.0));
        for e in 0..self.delay_idx.len() {
            for m in 0..mc {
                s[m] += self.term(e, m, mc, steer, dtab, ptab);
            }
        }
    }
}

struct SweepContext<'a> {
    layout: &'a BandLayout,
    dtab: &'a [Complex64],
    ptab: &'a [Complex64],
    base: Vec<Complex64>,
    weight: Vec<Complex64>,
}

impl SweepContext<'_> {
    /// Delay scan over every element of one axis state.
    fn delay_pass(
        &mut self,
        state: &mut AxisState,
        s: &mut [Complex64],
        steer: &[Complex64],
        gains_other: Option<&[f64]>,
    ) {
        let mc = self.layout.m_count;
        let levels = self.dtab.len() / mc;
        for e in 0..state.delay_idx.len() {
            let p = self.ptab[state.phase_idx[e]];
            let cur = state.delay_idx[e];
            let cur_row = &self.dtab[cur * mc..(cur + 1) * mc];
            for m in 0..mc {
                self.weight[m] = p * steer[e * mc + m];
                self.base[m] = s[m] - self.weight[m] * cur_row[m];
            }
            let scan = Scan {
                layout: self.layout,
                base: &self.base,
                weight: &self.weight,
                gains_other,
            };
            let (best, _) = scan.best_row(self.dtab, levels, cur);
            if best != cur {
                state.delay_idx[e] = best;
                let row = &self.dtab[best * mc..(best + 1) * mc];
                for m in 0..mc {
                    s[m] = self.base[m] + self.weight[m] * row[m];
                }
            }
        }
    }

    /// Phase scan over every element of one axis state.
    fn phase_pass(
        &mut self,
        state: &mut AxisState,
        s: &mut [Complex64],
        steer: &[Complex64],
        gains_other: Option<&[f64]>,
    ) {
        let mc = self.layout.m_count;
        for e in 0..state.phase_idx.len() {
            let cur = state.phase_idx[e];
            let drow = &self.dtab[state.delay_idx[e] * mc..(state.delay_idx[e] + 1) * mc];
            let p = self.ptab[cur];
            for m in 0..mc {
                self.weight[m] = drow[m] * steer[e * mc + m];
                self.base[m] = s[m] - p * self.weight[m];
            }
            let scan = Scan {
                layout: self.layout,
                base: &self.base,
                weight: &self.weight,
                gains_other,
            };
            let (best, _) = scan.best_scalar(self.ptab, cur);
            if best != cur {
                state.phase_idx[e] = best;
                let pb = self.ptab[best];
                for m in 0..mc {
                    s[m] = self.base[m] + pb * self.weight[m];
                }
            }
        }
    }
}

fn indices_from_values(spec: &QuantizationSpec, phases: &[f64], delays: &[f64]) -> AxisState {
    AxisState {
        delay_idx: delays.iter().map(|&t| spec.delay_index_of(t)).collect(),
        phase_idx: phases.iter().map(|&p| spec.phase_index_of(p)).collect(),
    }
}

fn converged(first: f64, later: f64, zeta: f64) -> bool {
    later.is_finite() && first.is_finite() && (later - first).abs() < zeta * later.abs()
}

/// Greedy coordinate ascent over the per-element grids (Algorithm: sweep all
/// delays, then all phases, until the objective change falls below
/// `zeta * G_l`).
pub fn greedy_optimize_joint(
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
    let (q, _) = spec.quantize_aligned(init, grid.f_c());
    let mut state = indices_from_values(spec, q.phases(), q.delays());

    let steer = joint_steer_table(geometry, &layout);
    let dtab = delay_candidate_table(spec, &layout);
    let ptab = phase_candidate_table(spec);
    let mc = layout.m_count;

    let mut s = vec![Complex64::new(0.0, 0.0); mc];
    state.rebuild_sums(&mut s, mc, &steer, &dtab, &ptab);
    let mut history = vec![layout.gl_from_power(&layout.power_sums(&s))];

    let mut ctx = SweepContext {
        layout: &layout,
        dtab: &dtab,
        ptab: &ptab,
        base: vec![Complex64::new(0.0, 0.0); mc],
        weight: vec![Complex64::new(0.0, 0.0); mc],
    };

    let mut sweeps_run = 0;
    let mut done = false;
    for _ in 0..settings.max_sweeps {
        state.rebuild_sums(&mut s, mc, &steer, &dtab, &ptab);
        let gl_first = layout.gl_from_power(&layout.power_sums(&s));
        ctx.delay_pass(&mut state, &mut s, &steer, None);
        ctx.phase_pass(&mut state, &mut s, &steer, None);
        let gl_later = layout.gl_from_power(&layout.power_sums(&s));
        history.push(gl_later);
        sweeps_run += 1;
        if converged(gl_first, gl_later, settings.zeta) {
            done = true;
            break;
        }
    }

    let phases: Vec<f64> = state.phase_idx.iter().map(|&i| spec.phase_grid_value(i)).collect();
    let delays: Vec<f64> = state.delay_idx.iter().map(|&i| spec.delay_grid_value(i)).collect();
    let config = JptaConfig::new(geometry, phases, delays)?;
    Ok((
        config,
        OptimizationTrace {
            objective_history: history,
            loss_history: Vec::new(),
            sweeps_run,
            converged: done,
        },
    ))
}

/// Greedy coordinate ascent over the axis vectors: the sweep updates the
/// n_az + n_el coordinates of each family instead of n_az * n_el.
pub fn greedy_optimize_separated(
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
    let (q, _) = spec.quantize_aligned_separated(init, grid.f_c());
    let mut az = indices_from_values(spec, q.phase_az(), q.delay_az());
    let mut el = indices_from_values(spec, q.phase_el(), q.delay_el());

    let steer_az = axis_steer_table(geometry.n_az(), &layout, |u| layout.coeffs[u].0);
    let steer_el = axis_steer_table(geometry.n_el(), &layout, |u| layout.coeffs[u].1);
    let dtab = delay_candidate_table(spec, &layout);
    let ptab = phase_candidate_table(spec);
    let mc = layout.m_count;

    let mut s_az = vec![Complex64::new(0.0, 0.0); mc];
    let mut s_el = vec![Complex64::new(0.0, 0.0); mc];

    let combined_gl = |layout: &BandLayout, s_az: &[Complex64], s_el: &[Complex64]| -> f64 {
        let mut gl = 0.0;
        for (u, block) in layout.blocks.iter().enumerate() {
            let mut power = 0.0;
            for m in block.clone() {
                power += s_az[m].norm_sqr() * s_el[m].norm_sqr();
            }
            gl += 10.0 * (power * layout.inv_len[u] / layout.nn).log10();
        }
        gl
    };

    az.rebuild_sums(&mut s_az, mc, &steer_az, &dtab, &ptab);
    el.rebuild_sums(&mut s_el, mc, &steer_el, &dtab, &ptab);
    let mut history = vec![combined_gl(&layout, &s_az, &s_el)];

    let mut ctx = SweepContext {
        layout: &layout,
        dtab: &dtab,
        ptab: &ptab,
        base: vec![Complex64::new(0.0, 0.0); mc],
        weight: vec![Complex64::new(0.0, 0.0); mc],
    };

    let mut sweeps_run = 0;
    let mut done = false;
    let mut other = vec![0.0; mc];
    for _ in 0..settings.max_sweeps {
        az.rebuild_sums(&mut s_az, mc, &steer_az, &dtab, &ptab);
        el.rebuild_sums(&mut s_el, mc, &steer_el, &dtab, &ptab);
        let gl_first = combined_gl(&layout, &s_az, &s_el);

        // Delays across both axes, then phases across both axes.
        for (m, o) in other.iter_mut().enumerate() {
            *o = s_el[m].norm_sqr();
        }
        ctx.delay_pass(&mut az, &mut s_az, &steer_az, Some(&other));
        for (m, o) in other.iter_mut().enumerate() {
            *o = s_az[m].norm_sqr();
        }
        ctx.delay_pass(&mut el, &mut s_el, &steer_el, Some(&other));

        for (m, o) in other.iter_mut().enumerate() {
            *o = s_el[m].norm_sqr();
        }
        ctx.phase_pass(&mut az, &mut s_az, &steer_az, Some(&other));
        for (m, o) in other.iter_mut().enumerate() {
            *o = s_az[m].norm_sqr();
        }
        ctx.phase_pass(&mut el, &mut s_el, &steer_el, Some(&other));

        let gl_later = combined_gl(&layout, &s_az, &s_el);
        history.push(gl_later);
        sweeps_run += 1;
        if converged(gl_first, gl_later, settings.zeta) {
            done = true;
            break;
        }
    }

    let config = SeparatedJptaConfig::new(
        geometry,
        az.phase_idx.iter().map(|&i| spec.phase_grid_value(i)).collect(),
        az.delay_idx.iter().map(|&i| spec.delay_grid_value(i)).collect(),
        el.phase_idx.iter().map(|&i| spec.phase_grid_value(i)).collect(),
        el.delay_idx.iter().map(|&i| spec.delay_grid_value(i)).collect(),
    )?;
    Ok((
        config,
        OptimizationTrace {
            objective_history: history,
            loss_history: Vec::new(),
            sweeps_run,
            converged: done,
        },
    ))
}
