//! Stochastic optics predicts no Bell violation while the singles rate is
//! below
//!
//! ```text
//! R_S = η F² R_c² / (2 L d² λ sqrt(τ T))
//! ```
//!
//! All quantities are SI. Observing a violation at rate `R` therefore
//! requires `T ≥ (η F² R_c² / (2 L d² λ R))² / τ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Physical absorption time should stay below about 10 ns.
pub const DEFAULT_T_MAX_S: f64 = 10e-9;

/// Everything in the rate bound except the absorption time `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SedGeometry {
    /// Detection quantum efficiency.
    pub eta: f64,
    /// Focal distance of the lens in front of the detectors, m.
    pub focal_length: f64,
    /// Radius of the active area of the non-linear medium, m.
    pub crystal_radius: f64,
    /// Coherence time of the incident photons, s.
    pub coherence_time: f64,
    /// Medium-to-detector distance, m.
    pub distance: f64,
    /// Mean detected wavelength, m.
    pub wavelength: f64,
    /// Active depth of the detector, m.
    pub detector_depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SedParams {
    #[serde(flatten)]
    pub geometry: SedGeometry,
    /// Photon absorption time, s.
    pub absorption_time: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(name, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

impl SedGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("eta", self.eta)?;
        if self.eta > 1.0 {
            return Err(invalid("eta", format!("must be <= 1, got {}", self.eta)));
        }
        positive("focal_length", self.focal_length)?;
        positive("crystal_radius", self.crystal_radius)?;
        positive("coherence_time", self.coherence_time)?;
        positive("distance", self.distance)?;
        positive("wavelength", self.wavelength)?;
        positive("detector_depth", self.detector_depth)
    }

    /// `η F² R_c² / (2 L d² λ)`, a rate times sqrt(time).
    fn prefactor(&self) -> f64 {
        self.eta * self.focal_length.powi(2) * self.crystal_radius.powi(2)
            / (2.0 * self.detector_depth * self.distance.powi(2) * self.wavelength)
    }
}

/// Singles rate (1/s) below which no violation should be seen.
pub fn sed_rate_threshold(p: &SedParams) -> Result<f64> {
    p.geometry.validate()?;
    positive("absorption_time", p.absorption_time)?;
    Ok(p.geometry.prefactor() / (p.geometry.coherence_time * p.absorption_time).sqrt())
}

/// Absorption time (s) at which the bound equals `observed_rate`.
pub fn sed_implied_t(g: &SedGeometry, observed_rate: f64) -> Result<f64> {
    g.validate()?;
    positive("observed_rate", observed_rate)?;
    let ratio = g.prefactor() / observed_rate;
    Ok(ratio * ratio / g.coherence_time)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SedVerdict {
    /// Bound evaluated at `t_max`, 1/s.
    pub threshold_rate: f64,
    pub observed_rate: f64,
    /// Smallest `T` compatible with a violation at `observed_rate`, s.
    pub implied_t_min: f64,
    pub t_max: f64,
    /// `implied_t_min ≤ t_max`
    pub consistent: bool,
    /// A violation was observed and the theory would need `T > t_max`.
    pub falsified: bool,
}

pub fn sed_verdict(
    g: &SedGeometry,
    observed_rate: f64,
    t_max: f64,
    violation_observed: bool,
) -> Result<SedVerdict> {
    positive("t_max", t_max)?;
    let implied_t_min = sed_implied_t(g, observed_rate)?;
    let threshold_rate = sed_rate_threshold(&SedParams {
        geometry: *g,
        absorption_time: t_max,
    })?;
    let consistent = implied_t_min <= t_max;
    Ok(SedVerdict {
        threshold_rate,
        observed_rate,
        implied_t_min,
        t_max,
        consistent,
        falsified: violation_observed && !consistent,
    })
}
