//! The post-selected two-photon polarization state `(|HH> + f|VV>)/sqrt(1+f^2)`
//! and the detection probabilities it predicts behind ideal polarizers.
//!
//! Angles are in radians; H polarization is angle 0. The vacuum component
//! of the down-conversion state is dropped, so every probability here is
//! conditional on a pair having been created.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Reduce an angle to `[0, π)`. A linear polarizer at θ and θ+π is the
/// same device.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    // rem_euclid can round up to exactly PI for tiny negative inputs,
    // and keeps the sign of -0.0
    if r >= PI || r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Polarizer in front of one detector: an analyzer angle, or no polarizer
/// at all (the `∞` setting of the CH inequality).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "theta_rad", rename_all = "snake_case")]
pub enum PolarizerSetting {
    Angle(f64),
    Absent,
}

impl PolarizerSetting {
    /// Analyzer at `theta` radians, canonicalized modulo π.
    pub fn angle(theta: f64) -> Self {
        PolarizerSetting::Angle(canonical_angle(theta))
    }

    pub fn degrees(deg: f64) -> Self {
        Self::angle(deg.to_radians())
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, PolarizerSetting::Absent)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            PolarizerSetting::Angle(t) if !t.is_finite() => {
                Err(invalid("theta", format!("angle must be finite, got {t}")))
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for PolarizerSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolarizerSetting::Angle(t) => write!(f, "{:.4}°", t.to_degrees()),
            PolarizerSetting::Absent => write!(f, "∞"),
        }
    }
}

/// Detector arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    One,
    Two,
}

impl Arm {
    pub fn index(self) -> u8 {
        match self {
            Arm::One => 1,
            Arm::Two => 2,
        }
    }
}

/// Probabilities for a single pair: both photons pass their polarizers
/// (`q12`), photon 1 passes (`q1`), photon 2 passes (`q2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointPassProbabilities {
    pub q12: f64,
    pub q1: f64,
    pub q2: f64,
}

impl JointPassProbabilities {
    /// Probabilities of the four joint outcomes
    /// `[both, only 1, only 2, neither]`.
    pub fn outcomes(&self) -> [f64; 4] {
        [
            self.q12,
            self.q1 - self.q12,
            self.q2 - self.q12,
            1.0 - self.q1 - self.q2 + self.q12,
        ]
    }

    /// True when every joint outcome has nonnegative probability, up to `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let all_finite = self.q12.is_finite() && self.q1.is_finite() && self.q2.is_finite();
        all_finite && self.outcomes().iter().all(|&p| p >= -tol && p <= 1.0 + tol)
    }
}

/// Anything that predicts joint pass probabilities for a pair of settings.
/// Implemented by the quantum state and by local-hidden-variable models so
/// either can drive the event simulator.
pub trait PairModel: Send + Sync {
    fn joint_pass(&self, s1: PolarizerSetting, s2: PolarizerSetting) -> JointPassProbabilities;

    fn describe(&self) -> String;
}

/// Non-maximally entangled state with amplitude ratio `f = f₂V₂ / f₁V₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntangledState {
    f: f64,
}

impl EntangledState {
    pub fn new(f: f64) -> Result<Self> {
        if !f.is_finite() || f < 0.0 {
            return Err(invalid("f", format!("must be finite and >= 0, got {f}")));
        }
        Ok(Self { f })
    }

    pub fn maximal() -> Self {
        Self { f: 1.0 }
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn normalization(&self) -> f64 {
        1.0 / (1.0 + self.f * self.f)
    }

    /// Probability that both photons pass their polarizers.
    pub fn coincidence_probability(&self, s1: PolarizerSetting, s2: PolarizerSetting) -> f64 {
        use PolarizerSetting::*;
        let f = self.f;
        let norm = self.normalization();
        let p = match (s1, s2) {
            (Angle(a), Angle(b)) => {
                let amp = a.cos() * b.cos() + f * a.sin() * b.sin();
                amp * amp * norm
            }
            (Angle(t), Absent) | (Absent, Angle(t)) => marginal(f, t) * norm,
            (Absent, Absent) => 1.0,
        };
        p.clamp(0.0, 1.0)
    }

    /// Probability that the photon in `arm` passes; the reduced state is
    /// the same on both arms.
    pub fn single_pass_probability(&self, s: PolarizerSetting, arm: Arm) -> f64 {
        match arm {
            Arm::One => self.coincidence_probability(s, PolarizerSetting::Absent),
            Arm::Two => self.coincidence_probability(PolarizerSetting::Absent, s),
        }
    }

    pub fn joint_pass_probabilities(
        &self,
        s1: PolarizerSetting,
        s2: PolarizerSetting,
    ) -> JointPassProbabilities {
        let q1 = self.single_pass_probability(s1, Arm::One);
        let q2 = self.single_pass_probability(s2, Arm::Two);
        // rounding can push q12 a few ulps past the Cauchy-Schwarz bound
        let q12 = self.coincidence_probability(s1, s2).min(q1).min(q2);
        JointPassProbabilities { q12, q1, q2 }
    }
}

fn marginal(f: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    c * c + f * f * s * s
}

impl PairModel for EntangledState {
    fn joint_pass(&self, s1: PolarizerSetting, s2: PolarizerSetting) -> JointPassProbabilities {
        self.joint_pass_probabilities(s1, s2)
    }

    fn describe(&self) -> String {
        format!("quantum(f={})", self.f)
    }
}
