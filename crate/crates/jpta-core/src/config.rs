//! Per-element and axis-factored phase/delay settings.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// Emitted when the normalized delay span does not fit the hardware range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySpanWarning {
    /// Delay span in seconds after shifting the minimum to zero.
    pub span: f64,
    pub tau_max: f64,
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    for &v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite { what, value: v });
        }
    }
    Ok(())
}

/// Shift delays so the minimum is zero; compensate each phase by the carrier
/// term of the common shift so weights at the center frequency are unchanged.
/// Gain is invariant either way since the shift is common to all entries.
fn normalize_axis(phase: &mut [f64], delay: &mut [f64], f_c: f64) {
    let min = delay.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = -min;
    for tau in delay.iter_mut() {
        *tau += shift;
    }
    for phi in phase.iter_mut() {
        *phi = (*phi - TAU * f_c * shift).rem_euclid(TAU);
    }
}

fn span_warning(spans: f64, tau_max: Option<f64>) -> Option<DelaySpanWarning> {
    match tau_max {
        Some(tau_max) if spans > tau_max => Some(DelaySpanWarning {
            span: spans,
            tau_max,
        }),
        _ => None,
    }
}

/// Per-element phase shifter and true-time-delay settings.
///
/// Phases are radians, delays seconds. Storage is row-major with the azimuth
/// index outermost: entry `(y, z)` lives at `y * n_el + z`.
#[derive(Debug, Clone, PartialEq)]
pub struct JptaConfig {
    n_az: usize,
    n_el: usize,
    phase: Vec<f64>,
    delay: Vec<f64>,
}

impl JptaConfig {
    pub fn new(geometry: &ArrayGeometry, phase: Vec<f64>, delay: Vec<f64>) -> Result<Self> {
        let n = geometry.element_count();
        if phase.len() != n || delay.len() != n {
            return Err(Error::DimensionMismatch {
                got_az: phase.len() / geometry.n_el().max(1),
                got_el: geometry.n_el(),
                n_az: geometry.n_az(),
                n_el: geometry.n_el(),
            });
        }
        check_finite(&phase, "phase")?;
        check_finite(&delay, "delay")?;
        Ok(Self {
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
            phase,
            delay,
        })
    }

    pub fn zeros(geometry: &ArrayGeometry) -> Self {
        let n = geometry.element_count();
        Self {
            n_az: geometry.n_az(),
            n_el: geometry.n_el(),
            phase: vec![0.0; n],
            delay: vec![0.0; n],
        }
    }

    pub fn n_az(&self) -> usize {
        self.n_az
    }

    pub fn n_el(&self) -> usize {
        self.n_el
    }

    pub fn matches(&self, geometry: &ArrayGeometry) -> bool {
        self.n_az == geometry.n_az() && self.n_el == geometry.n_el()
    }

    #[inline]
    pub fn index(&self, y: usize, z: usize) -> usize {
        y * self.n_el + z
    }

    #[inline]
    pub fn phase(&self, y: usize, z: usize) -> f64 {
        self.phase[self.index(y, z)]
    }

    #[inline]
    pub fn delay(&self, y: usize, z: usize) -> f64 {
        self.delay[self.index(y, z)]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phase
    }

    pub fn delays(&self) -> &[f64] {
        &self.delay
    }

    pub fn delay_span(&self) -> f64 {
        let min = self.delay.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.delay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max - min
    }

    /// Shift all delays so the minimum is zero and wrap phases to [0, 2pi),
    /// adjusting each phase by the carrier term of the shift. Gain at every
    /// (direction, subcarrier) is unchanged.
    ///
    /// When `tau_max` is given and the shifted span exceeds it, the returned
    /// warning carries the span.
    pub fn normalize_delays(
        &self,
        f_c: f64,
        tau_max: Option<f64>,
    ) -> (Self, Option<DelaySpanWarning>) {
        let mut out = self.clone();
        normalize_axis(&mut out.phase, &mut out.delay, f_c);
        let span = out.delay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (out, span_warning(span, tau_max))
    }
}

/// Axis-factored settings: element `(y, z)` applies phase
/// `phase_az[y] + phase_el[z]` and delay `delay_az[y] + delay_el[z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedJptaConfig {
    phase_az: Vec<f64>,
    delay_az: Vec<f64>,
    phase_el: Vec<f64>,
    delay_el: Vec<f64>,
}

impl SeparatedJptaConfig {
    pub fn new(
        geometry: &ArrayGeometry,
        phase_az: Vec<f64>,
        delay_az: Vec<f64>,
        phase_el: Vec<f64>,
        delay_el: Vec<f64>,
    ) -> Result<Self> {
        if phase_az.len() != geometry.n_az()
            || delay_az.len() != geometry.n_az()
            || phase_el.len() != geometry.n_el()
            || delay_el.len() != geometry.n_el()
        {
            return Err(Error::DimensionMismatch {
                got_az: phase_az.len(),
                got_el: phase_el.len(),
                n_az: geometry.n_az(),
                n_el: geometry.n_el(),
            });
        }
        check_finite(&phase_az, "phase")?;
        check_finite(&phase_el, "phase")?;
        check_finite(&delay_az, "delay")?;
        check_finite(&delay_el, "delay")?;
        Ok(Self {
            phase_az,
            delay_az,
            phase_el,
            delay_el,
        })
    }

    pub fn zeros(geometry: &ArrayGeometry) -> Self {
        Self {
            phase_az: vec![0.0; geometry.n_az()],
            delay_az: vec![0.0; geometry.n_az()],
            phase_el: vec![0.0; geometry.n_el()],
            delay_el: vec![0.0; geometry.n_el()],
        }
    }

    pub fn n_az(&self) -> usize {
        self.phase_az.len()
    }

    pub fn n_el(&self) -> usize {
        self.phase_el.len()
    }

    pub fn matches(&self, geometry: &ArrayGeometry) -> bool {
        self.n_az() == geometry.n_az() && self.n_el() == geometry.n_el()
    }

    pub fn phase_az(&self) -> &[f64] {
        &self.phase_az
    }

    pub fn delay_az(&self) -> &[f64] {
        &self.delay_az
    }

    pub fn phase_el(&self) -> &[f64] {
        &self.phase_el
    }

    pub fn delay_el(&self) -> &[f64] {
        &self.delay_el
    }

    /// Expand to the per-element form via the additive rule.
    pub fn expand(&self) -> JptaConfig {
        let n_az = self.n_az();
        let n_el = self.n_el();
        let mut phase = Vec::with_capacity(n_az * n_el);
        let mut delay = Vec::with_capacity(n_az * n_el);
        for y in 0..n_az {
            for z in 0..n_el {
                phase.push(self.phase_az[y] + self.phase_el[z]);
                delay.push(self.delay_az[y] + self.delay_el[z]);
            }
        }
        JptaConfig {
            n_az,
            n_el,
            phase,
            delay,
        }
    }

    /// Normalize each axis so its minimum delay is zero, compensating phases
    /// per axis. The expanded config then has minimum delay zero as well;
    /// the warning reports the expanded span against `tau_max`.
    pub fn normalize_delays(
        &self,
        f_c: f64,
        tau_max: Option<f64>,
    ) -> (Self, Option<DelaySpanWarning>) {
        let mut out = self.clone();
        normalize_axis(&mut out.phase_az, &mut out.delay_az, f_c);
        normalize_axis(&mut out.phase_el, &mut out.delay_el, f_c);
        let span_az = out.delay_az.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span_el = out.delay_el.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (out, span_warning(span_az + span_el, tau_max))
    }
}
