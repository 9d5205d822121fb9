//! Array, frequency-lattice, and direction domain types.

use crate::error::{Error, Result};

/// Rectangular half-wavelength antenna array with `n_az` elements along the
/// azimuth (y) axis and `n_el` elements along the elevation (z) axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayGeometry {
    n_az: usize,
    n_el: usize,
}

impl ArrayGeometry {
    pub fn new(n_az: usize, n_el: usize) -> Result<Self> {
        if n_az == 0 || n_el == 0 {
            return Err(Error::EmptyGeometry { n_az, n_el });
        }
        Ok(Self { n_az, n_el })
    }

    pub fn n_az(&self) -> usize {
        self.n_az
    }

    pub fn n_el(&self) -> usize {
        self.n_el
    }

    pub fn element_count(&self) -> usize {
        self.n_az * self.n_el
    }

    pub fn check_element(&self, y: usize, z: usize) -> Result<()> {
        if y >= self.n_az || z >= self.n_el {
            return Err(Error::ElementOutOfRange {
                y,
                z,
                n_az: self.n_az,
                n_el: self.n_el,
            });
        }
        Ok(())
    }
}

/// OFDM subcarrier lattice: `m_count` subcarriers spaced `delta_f` hertz
/// around the center frequency `f_c`.
///
/// `m_count` must be odd so that the centered index `m' = m - M/2` runs over
/// integers `-M/2 ..= M/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    f_c: f64,
    delta_f: f64,
    m_count: usize,
}

impl FrequencyGrid {
    pub fn new(f_c: f64, delta_f: f64, m_count: usize) -> Result<Self> {
        if m_count == 0 || m_count % 2 == 0 {
            return Err(Error::BadSubcarrierCount { m_count });
        }
        if !f_c.is_finite() || f_c <= 0.0 {
            return Err(Error::NonFinite {
                what: "center frequency",
                value: f_c,
            });
        }
        if !delta_f.is_finite() || delta_f <= 0.0 {
            return Err(Error::NonFinite {
                what: "subcarrier spacing",
                value: delta_f,
            });
        }
        let half = (m_count - 1) / 2;
        let f0 = f_c - half as f64 * delta_f;
        if f0 <= 0.0 {
            return Err(Error::NonPositiveFrequency { f0 });
        }
        Ok(Self {
            f_c,
            delta_f,
            m_count,
        })
    }

    pub fn f_c(&self) -> f64 {
        self.f_c
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    /// M/2, the center subcarrier index.
    pub fn half(&self) -> usize {
        (self.m_count - 1) / 2
    }

    /// Frequency of subcarrier `m`: f_c + (m - M/2) delta_f.
    pub fn freq(&self, m: usize) -> f64 {
        self.f_c + (m as f64 - self.half() as f64) * self.delta_f
    }

    /// Centered row index m' = m - M/2.
    pub fn m_prime(&self, m: usize) -> f64 {
        m as f64 - self.half() as f64
    }

    pub fn check_subcarrier(&self, m: usize) -> Result<()> {
        if m >= self.m_count {
            return Err(Error::SubcarrierOutOfRange {
                m,
                m_count: self.m_count,
            });
        }
        Ok(())
    }
}

/// Angle of arrival in degrees. Elevation is measured from the +z axis, so
/// broadside for the elevation axis sits at 90 degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta_az_deg: f64,
    theta_el_deg: f64,
}

impl Direction {
    pub fn new(theta_az_deg: f64, theta_el_deg: f64) -> Result<Self> {
        let ok = theta_az_deg.is_finite()
            && theta_el_deg.is_finite()
            && (-180.0..=180.0).contains(&theta_az_deg)
            && (0.0..=180.0).contains(&theta_el_deg);
        if !ok {
            return Err(Error::InvalidDirection {
                az: theta_az_deg,
                el: theta_el_deg,
            });
        }
        Ok(Self {
            theta_az_deg,
            theta_el_deg,
        })
    }

    pub fn theta_az_deg(&self) -> f64 {
        self.theta_az_deg
    }

    pub fn theta_el_deg(&self) -> f64 {
        self.theta_el_deg
    }

    /// Per-axis steering coefficients `(sin az sin el, cos el)`.
    pub fn steer_coeffs(&self) -> (f64, f64) {
        let az = self.theta_az_deg.to_radians();
        let el = self.theta_el_deg.to_radians();
        (az.sin() * el.sin(), el.cos())
    }
}
