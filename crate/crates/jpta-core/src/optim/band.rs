//! Shared per-subcarrier evaluation tables for the iterative optimizers.
//!
//! Every subcarrier is evaluated toward the direction of the user owning it,
//! so one complex array sum per subcarrier carries the whole objective. The
//! optimizers keep those sums incrementally; tests pin them against the
//! direct per-point gain oracle.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, FrequencyGrid};
use crate::linsys::UserScenario;

pub(crate) const DB_PER_LN: f64 = 10.0 / std::f64::consts::LN_10;

pub(crate) struct BandLayout {
    pub m_count: usize,
    /// Element count used for gain normalization.
    pub nn: f64,
    pub freqs: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Per-user subcarrier block.
    pub blocks: Vec<Range<usize>>,
    /// Per-user steering coefficients (sin az sin el, cos el).
    pub coeffs: Vec<(f64, f64)>,
    /// Per-user 1 / |block|.
    pub inv_len: Vec<f64>,
}

impl BandLayout {
    pub fn new(
        geometry: &ArrayGeometry,
        grid: &FrequencyGrid,
        scenario: &UserScenario,
    ) -> Result<Self> {
        let m_count = grid.m_count();
        let covered = scenario.subbands().last().map(|r| r.end) == Some(m_count);
        if !covered {
            return Err(Error::SubcarrierOutOfRange {
                m: scenario.subbands().last().map(|r| r.end).unwrap_or(0),
                m_count,
            });
        }
        let freqs: Vec<f64> = (0..m_count).map(|m| grid.freq(m)).collect();
        let ratios: Vec<f64> = freqs.iter().map(|f| f / grid.f_c()).collect();
        let blocks: Vec<Range<usize>> = scenario.subbands().to_vec();
        let coeffs: Vec<(f64, f64)> = scenario.directions().iter().map(|d| d.steer_coeffs()).collect();
        let inv_len: Vec<f64> = blocks.iter().map(|b| 1.0 / b.len() as f64).collect();
        Ok(Self {
            m_count,
            nn: geometry.element_count() as f64,
            freqs,
            ratios,
            blocks,
            coeffs,
            inv_len,
        })
    }

    pub fn user_count(&self) -> usize {
        self.blocks.len()
    }

    /// Per-user sums of `|s(m)|^2` over each user's block.
    pub fn power_sums(&self, s: &[Complex64]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| s[b.clone()].iter().map(|v| v.norm_sqr()).sum())
            .collect()
    }

    /// Linear mean gains from per-user power sums.
    pub fn means_from_power(&self, power: &[f64]) -> Vec<f64> {
        power
            .iter()
            .zip(&self.inv_len)
            .map(|(&p, &inv)| p * inv / self.nn)
            .collect()
    }

    /// Log-mean objective from per-user power sums.
    pub fn gl_from_power(&self, power: &[f64]) -> f64 {
        power
            .iter()
            .zip(&self.inv_len)
            .map(|(&p, &inv)| 10.0 * (p * inv / self.nn).log10())
            .sum()
    }
}

/// Per-element steering factors `exp(-j Omega)` toward each subcarrier's
/// owner, flattened as `[element][subcarrier]` with elements row-major.
pub(crate) fn joint_steer_table(geometry: &ArrayGeometry, layout: &BandLayout) -> Vec<Complex64> {
    let mc = layout.m_count;
    let mut table = vec![Complex64::new(0.0, 0.0); geometry.element_count() * mc];
    for y in 0..geometry.n_az() {
        for z in 0..geometry.n_el() {
            let e = y * geometry.n_el() + z;
            let row = &mut table[e * mc..(e + 1) * mc];
            for (u, block) in layout.blocks.iter().enumerate() {
                let (a, b) = layout.coeffs[u];
                let c = y as f64 * a + z as f64 * b;
                for m in block.clone() {
                    row[m] = Complex64::cis(-PI * layout.ratios[m] * c);
                }
            }
        }
    }
    table
}

/// Axis steering factors for one axis (`coeff_of` picks `a` or `b`).
pub(crate) fn axis_steer_table(
    n: usize,
    layout: &BandLayout,
    coeff_of: impl Fn(usize) -> f64,
) -> Vec<Complex64> {
    let mc = layout.m_count;
    let mut table = vec![Complex64::new(0.0, 0.0); n * mc];
    for e in 0..n {
        let row = &mut table[e * mc..(e + 1) * mc];
        for (u, block) in layout.blocks.iter().enumerate() {
            let c = e as f64 * coeff_of(u);
            for m in block.clone() {
                row[m] = Complex64::cis(-PI * layout.ratios[m] * c);
            }
        }
    }
    table
}

/// Candidate delay factors `exp(j 2 pi f_m tau_c)` for every grid delay,
/// flattened as `[candidate][subcarrier]`.
pub(crate) fn delay_candidate_table(
    spec: &crate::optim::QuantizationSpec,
    layout: &BandLayout,
) -> Vec<Complex64> {
    let mc = layout.m_count;
    let levels = spec.delay_levels();
    let mut table = vec![Complex64::new(0.0, 0.0); levels * mc];
    for c in 0..levels {
        let tau = spec.delay_grid_value(c);
        let row = &mut table[c * mc..(c + 1) * mc];
        for (m, &f) in layout.freqs.iter().enumerate() {
            row[m] = Complex64::cis(std::f64::consts::TAU * f * tau);
        }
    }
    table
}

/// Candidate phase factors `exp(j phi_c)` for every grid phase.
pub(crate) fn phase_candidate_table(spec: &crate::optim::QuantizationSpec) -> Vec<Complex64> {
    (0..spec.phase_levels())
        .map(|c| Complex64::cis(spec.phase_grid_value(c)))
        .collect()
}
