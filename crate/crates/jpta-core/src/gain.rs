//! Beamforming-gain evaluation.
//!
//! The gain of a configuration toward a direction at one subcarrier is the
//! normalized squared magnitude of the array sum
//!
//! ```text
//! G = |sum_{y,z} exp(j (phi_{y,z} + 2 pi f_m tau_{y,z}) - j Omega(y,z))|^2 / (N_az N_el)
//! ```
//!
//! where `Omega` is the steering phase of the evaluated direction. The
//! maximum is the element count, reached when every term aligns.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{JptaConfig, SeparatedJptaConfig};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Direction, FrequencyGrid};

/// Steering phase of element `(y, z)` at subcarrier `m` toward `dir`:
/// `pi (f_m / f_c) (y sin az sin el + z cos el)`.
pub fn steering_phase(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    dir: Direction,
    m: usize,
    y: usize,
    z: usize,
) -> Result<f64> {
    geometry.check_element(y, z)?;
    grid.check_subcarrier(m)?;
    let (a, b) = dir.steer_coeffs();
    let ratio = grid.freq(m) / grid.f_c();
    Ok(PI * ratio * (y as f64 * a + z as f64 * b))
}

fn check_joint(geometry: &ArrayGeometry, grid: &FrequencyGrid, config: &JptaConfig, m: usize) -> Result<()> {
    if !config.matches(geometry) {
        return Err(Error::DimensionMismatch {
            got_az: config.n_az(),
            got_el: config.n_el(),
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
        });
    }
    grid.check_subcarrier(m)
}

/// Beamforming gain of a per-element configuration, direct double sum.
pub fn gain(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    config: &JptaConfig,
    dir: Direction,
    m: usize,
) -> Result<f64> {
    check_joint(geometry, grid, config, m)?;
    let (a, b) = dir.steer_coeffs();
    let f_m = grid.freq(m);
    let ratio = f_m / grid.f_c();
    let mut sum = Complex64::new(0.0, 0.0);
    for y in 0..geometry.n_az() {
        for z in 0..geometry.n_el() {
            let omega = PI * ratio * (y as f64 * a + z as f64 * b);
            let h = config.phase(y, z) + std::f64::consts::TAU * f_m * config.delay(y, z);
            sum += Complex64::cis(h - omega);
        }
    }
    Ok(sum.norm_sqr() / geometry.element_count() as f64)
}

/// Beamforming gain of an axis-factored configuration as the product of the
/// one-dimensional azimuth and elevation sums.
pub fn gain_separated(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    config: &SeparatedJptaConfig,
    dir: Direction,
    m: usize,
) -> Result<f64> {
    if !config.matches(geometry) {
        return Err(Error::DimensionMismatch {
            got_az: config.n_az(),
            got_el: config.n_el(),
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
        });
    }
    grid.check_subcarrier(m)?;
    let (a, b) = dir.steer_coeffs();
    let f_m = grid.freq(m);
    let ratio = f_m / grid.f_c();
    let mut sum_az = Complex64::new(0.0, 0.0);
    for (y, (&phi, &tau)) in config.phase_az().iter().zip(config.delay_az()).enumerate() {
        let h = phi + std::f64::consts::TAU * f_m * tau;
        sum_az += Complex64::cis(h - PI * ratio * y as f64 * a);
    }
    let mut sum_el = Complex64::new(0.0, 0.0);
    for (z, (&phi, &tau)) in config.phase_el().iter().zip(config.delay_el()).enumerate() {
        let h = phi + std::f64::consts::TAU * f_m * tau;
        sum_el += Complex64::cis(h - PI * ratio * z as f64 * b);
    }
    let g_az = sum_az.norm_sqr() / geometry.n_az() as f64;
    let g_el = sum_el.norm_sqr() / geometry.n_el() as f64;
    Ok(g_az * g_el)
}

/// Arithmetic mean of `gain` over the user's subcarriers.
pub fn user_mean_gain(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    config: &JptaConfig,
    dir: Direction,
    subband: &[usize],
) -> Result<f64> {
    if subband.is_empty() {
        return Err(Error::EmptySubband);
    }
    let mut acc = 0.0;
    for &m in subband {
        acc += gain(geometry, grid, config, dir, m)?;
    }
    Ok(acc / subband.len() as f64)
}

/// Log-mean objective: sum over users of `10 log10` of the mean gain.
pub fn log_mean_gain(per_user_mean_gain: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &g in per_user_mean_gain {
        if !(g > 0.0) {
            return Err(Error::NonPositiveGain { value: g });
        }
        acc += 10.0 * g.log10();
    }
    Ok(acc)
}

/// Per-user mean gains plus the log-mean objective for one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Linear-scale mean gain per user.
    pub per_user_mean_gain: Vec<f64>,
    /// Sum over users of 10 log10 of the mean gain, in dB.
    pub log_mean_gain: f64,
    pub solver_name: String,
    /// Seconds spent producing the configuration.
    pub wall_time: f64,
}

impl MetricsReport {
    pub fn new(per_user_mean_gain: Vec<f64>, solver_name: impl Into<String>, wall_time: f64) -> Result<Self> {
        let log_mean_gain = log_mean_gain(&per_user_mean_gain)?;
        Ok(Self {
            per_user_mean_gain,
            log_mean_gain,
            solver_name: solver_name.into(),
            wall_time,
        })
    }

    pub fn per_user_gain_db(&self) -> Vec<f64> {
        self.per_user_mean_gain.iter().map(|g| 10.0 * g.log10()).collect()
    }
}

/// How to collapse the subcarrier axis of a gain map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapReduction {
    /// Keep, per angle, the maximum gain over all subcarriers.
    MaxOverSubcarriers,
    /// Keep the full angle-by-subcarrier tensor.
    PerSubcarrier,
}

/// Gain evaluated over an azimuth x elevation angle grid.
#[derive(Debug, Clone)]
pub struct GainMap {
    az_deg: Vec<f64>,
    el_deg: Vec<f64>,
    m_count: usize,
    reduction: MapReduction,
    values: Vec<f64>,
}

impl GainMap {
    pub fn az_angles(&self) -> &[f64] {
        &self.az_deg
    }

    pub fn el_angles(&self) -> &[f64] {
        &self.el_deg
    }

    pub fn reduction(&self) -> MapReduction {
        self.reduction
    }

    /// Linear gain at an (azimuth, elevation) grid cell of a max-reduced map.
    pub fn max_at(&self, i_az: usize, i_el: usize) -> f64 {
        debug_assert_eq!(self.reduction, MapReduction::MaxOverSubcarriers);
        self.values[i_az * self.el_deg.len() + i_el]
    }

    /// Linear gain at an (azimuth, elevation, subcarrier) cell of a
    /// per-subcarrier map.
    pub fn per_subcarrier_at(&self, i_az: usize, i_el: usize, m: usize) -> f64 {
        debug_assert_eq!(self.reduction, MapReduction::PerSubcarrier);
        let a = self.az_deg.len();
        let e = self.el_deg.len();
        self.values[m * a * e + i_az * e + i_el]
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }
}

/// Evaluate the gain of `config` on an angle grid.
///
/// The direct sum is regrouped by axis: for each subcarrier and elevation the
/// per-row sums over z are reduced once, then each azimuth point only sums
/// over the azimuth axis. Values are identical to calling `gain` per point.
pub fn gain_map(
    geometry: &ArrayGeometry,
    grid: &FrequencyGrid,
    config: &JptaConfig,
    az_deg: &[f64],
    el_deg: &[f64],
    reduction: MapReduction,
) -> Result<GainMap> {
    if az_deg.is_empty() || el_deg.is_empty() {
        return Err(Error::EmptyAngleGrid);
    }
    check_joint(geometry, grid, config, 0)?;
    for &az in az_deg {
        Direction::new(az, 90.0)?;
    }
    for &el in el_deg {
        Direction::new(0.0, el)?;
    }

    let n_az = geometry.n_az();
    let n_el = geometry.n_el();
    let nn = geometry.element_count() as f64;
    let n_a = az_deg.len();
    let n_e = el_deg.len();
    let sin_az: Vec<f64> = az_deg.iter().map(|d| d.to_radians().sin()).collect();
    let trig_el: Vec<(f64, f64)> = el_deg
        .iter()
        .map(|d| (d.to_radians().sin(), d.to_radians().cos()))
        .collect();

    // One angle plane for a single subcarrier.
    let plane_for = |m: usize| -> Vec<f64> {
        let f_m = grid.freq(m);
        let ratio = f_m / grid.f_c();
        // Per-element combiner weights at this subcarrier.
        let mut weights = Vec::with_capacity(n_az * n_el);
        for y in 0..n_az {
            for z in 0..n_el {
                let h = config.phase(y, z) + std::f64::consts::TAU * f_m * config.delay(y, z);
                weights.push(Complex64::cis(h));
            }
        }
        let mut plane = vec![0.0; n_a * n_e];
        let mut row = vec![Complex64::new(0.0, 0.0); n_az];
        for (ie, &(sin_el, cos_el)) in trig_el.iter().enumerate() {
            // Reduce over z once per elevation: row[y] = sum_z w_{y,z} beta^z.
            let beta = Complex64::cis(-PI * ratio * cos_el);
            for y in 0..n_az {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut bz = Complex64::new(1.0, 0.0);
                let base = y * n_el;
                for z in 0..n_el {
                    acc += weights[base + z] * bz;
                    bz *= beta;
                }
                row[y] = acc;
            }
            for (ia, &s_az) in sin_az.iter().enumerate() {
                let alpha = Complex64::cis(-PI * ratio * s_az * sin_el);
                let mut acc = Complex64::new(0.0, 0.0);
                let mut ay = Complex64::new(1.0, 0.0);
                for &r in row.iter() {
                    acc += r * ay;
                    ay *= alpha;
                }
                plane[ia * n_e + ie] = acc.norm_sqr() / nn;
            }
        }
        plane
    };

    let values = match reduction {
        MapReduction::MaxOverSubcarriers => (0..grid.m_count())
            .into_par_iter()
            .map(plane_for)
            .reduce(
                || vec![f64::NEG_INFINITY; n_a * n_e],
                |mut acc, plane| {
                    for (a, p) in acc.iter_mut().zip(plane) {
                        *a = a.max(p);
                    }
                    acc
                },
            ),
        MapReduction::PerSubcarrier => {
            let planes: Vec<Vec<f64>> = (0..grid.m_count()).into_par_iter().map(plane_for).collect();
            let mut values = Vec::with_capacity(n_a * n_e * grid.m_count());
            for plane in planes {
                values.extend_from_slice(&plane);
            }
            values
        }
    };

    Ok(GainMap {
        az_deg: az_deg.to_vec(),
        el_deg: el_deg.to_vec(),
        m_count: grid.m_count(),
        reduction,
        values,
    })
}
