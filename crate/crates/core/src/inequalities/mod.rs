//! Clauser-Horne inequality
//!
//! ```text
//! CH = N(θ₁,θ₂) − N(θ₁,θ₂′) + N(θ₁′,θ₂) + N(θ₁′,θ₂′) − N(θ₁′,∞) − N(∞,θ₂)
//! ```
//!
//! is `≤ 0` for every local realistic theory; a strictly positive value is a
//! violation. The same six-term structure is evaluated on predicted
//! probabilities ([`ch_quantum`]) and on measured counts ([`ch_from_counts`]).

mod optimize;
pub mod simplex;
mod threshold;

pub use optimize::{optimize_angles, AngleOptimum, OptimizeConfig};
pub use threshold::{critical_efficiency, EfficiencyThresholdResult, ThresholdConfig};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::state::{canonical_angle, EntangledState, PolarizerSetting};

/// Signs of the six CH terms, in [`SettingsQuad::settings`] order.
pub const CH_SIGNS: [i8; 6] = [1, -1, 1, 1, -1, -1];

/// Human-readable labels of the six terms.
pub const CH_TERM_LABELS: [&str; 6] = [
    "N(θ1,θ2)",
    "N(θ1,θ2')",
    "N(θ1',θ2)",
    "N(θ1',θ2')",
    "N(θ1',∞)",
    "N(∞,θ2)",
];

/// The four analyzer angles of a CH test, in radians, each in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingsQuad {
    pub theta1: f64,
    pub theta1_prime: f64,
    pub theta2: f64,
    pub theta2_prime: f64,
}

impl SettingsQuad {
    pub fn new(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Self {
        Self {
            theta1: canonical_angle(theta1),
            theta1_prime: canonical_angle(theta1_prime),
            theta2: canonical_angle(theta2),
            theta2_prime: canonical_angle(theta2_prime),
        }
    }

    pub fn from_degrees(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Self {
        Self::new(
            theta1.to_radians(),
            theta1_prime.to_radians(),
            theta2.to_radians(),
            theta2_prime.to_radians(),
        )
    }

    /// The angles used in the 2002 cascaded-crystal experiment at f ≈ 0.4.
    pub fn reference_f04() -> Self {
        Self::from_degrees(72.24, 17.76, 45.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.theta1_prime, self.theta2, self.theta2_prime]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn degrees(&self) -> [f64; 4] {
        self.as_array().map(f64::to_degrees)
    }

    /// The relabeling `(θ₁, θ₁′, θ₂, θ₂′) → (θ₂′, θ₂, θ₁′, θ₁)` which maps
    /// the CH expression onto itself for any arm-symmetric state.
    pub fn mirrored(&self) -> Self {
        Self::new(self.theta2_prime, self.theta2, self.theta1_prime, self.theta1)
    }

    /// Global reflection `θ → −θ` of every analyzer, which leaves all
    /// probabilities of the real-amplitude state unchanged.
    pub fn reflected(&self) -> Self {
        Self::from_array(self.as_array().map(|t| -t))
    }

    /// Polarizer settings of the six runs, in CH term order.
    pub fn settings(&self) -> [(PolarizerSetting, PolarizerSetting); 6] {
        use PolarizerSetting::{Absent, Angle};
        let (a, ap, b, bp) = (self.theta1, self.theta1_prime, self.theta2, self.theta2_prime);
        [
            (Angle(a), Angle(b)),
            (Angle(a), Angle(bp)),
            (Angle(ap), Angle(b)),
            (Angle(ap), Angle(bp)),
            (Angle(ap), Absent),
            (Absent, Angle(b)),
        ]
    }

    /// Largest per-angle distance modulo π to `other`, in radians.
    pub fn distance(&self, other: &SettingsQuad) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| angular_distance(*a, *b))
            .fold(0.0, f64::max)
    }
}

/// Distance between two polarizer angles, modulo π.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(std::f64::consts::PI - d)
}

/// Six CH terms, stored with their sign applied, plus the signed total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChDecomposition<T = f64> {
    pub terms: [T; 6],
    pub total: T,
}

impl ChDecomposition<f64> {
    pub fn from_unsigned(values: [f64; 6]) -> Self {
        let mut terms = [0.0; 6];
        for (i, v) in values.iter().enumerate() {
            terms[i] = f64::from(CH_SIGNS[i]) * v;
        }
        Self {
            terms,
            total: terms.iter().sum(),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.total > 0.0
    }
}

/// CH evaluated on measured counts with independent-Poisson error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChCounts {
    pub counts: [u64; 6],
    pub decomposition: ChDecomposition<i64>,
    /// `sqrt(ΣN)`
    pub sigma: f64,
    /// `total / sigma`; zero when `sigma` is zero.
    pub significance: f64,
}

impl ChCounts {
    pub fn total(&self) -> i64 {
        self.decomposition.total
    }

    pub fn is_violation(&self) -> bool {
        self.decomposition.total > 0
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// CH on quantum predictions with detection efficiency `eta` on both arms:
/// coincidence terms scale as η², singles terms as η.
pub fn ch_quantum(
    state: &EntangledState,
    quad: &SettingsQuad,
    eta: f64,
) -> Result<ChDecomposition<f64>> {
    check_eta(eta)?;
    let mut values = [0.0; 6];
    for (i, (s1, s2)) in quad.settings().into_iter().enumerate() {
        let p = state.coincidence_probability(s1, s2);
        values[i] = if s1.is_absent() || s2.is_absent() {
            eta * p
        } else {
            eta * eta * p
        };
    }
    Ok(ChDecomposition::from_unsigned(values))
}

/// Coincidence part `A` and singles part `B` of the ideal-detector CH value,
/// so that `CH(η) = η²·A − η·B`. Hot path for the optimizer.
pub(crate) fn ch_parts(f: f64, x: &[f64; 4]) -> (f64, f64) {
    let (sa, ca) = x[0].sin_cos();
    let (sap, cap) = x[1].sin_cos();
    let (sb, cb) = x[2].sin_cos();
    let (sbp, cbp) = x[3].sin_cos();
    let norm = 1.0 / (1.0 + f * f);
    let amp = |c1: f64, s1: f64, c2: f64, s2: f64| {
        let a = c1 * c2 + f * s1 * s2;
        a * a
    };
    let coinc = amp(ca, sa, cb, sb) - amp(ca, sa, cbp, sbp) + amp(cap, sap, cb, sb)
        + amp(cap, sap, cbp, sbp);
    let singles = cap * cap + f * f * sap * sap + cb * cb + f * f * sb * sb;
    (coinc * norm, singles * norm)
}

pub(crate) fn ch_total(f: f64, eta: f64, x: &[f64; 4]) -> f64 {
    let (a, b) = ch_parts(f, x);
    eta * eta * a - eta * b
}

/// CH from the six raw counts, in term order
/// `[N(θ₁,θ₂), N(θ₁,θ₂′), N(θ₁′,θ₂), N(θ₁′,θ₂′), N(θ₁′,∞), N(∞,θ₂)]`.
/// Counts are assumed to come from runs of equal duration.
pub fn ch_from_counts(counts: [i64; 6]) -> Result<ChCounts> {
    if let Some(c) = counts.iter().find(|&&c| c < 0) {
        return Err(invalid("counts", format!("must be nonnegative, got {c}")));
    }
    let unsigned = counts.map(|c| c as u64);
    let mut terms = [0i64; 6];
    for i in 0..6 {
        terms[i] = i64::from(CH_SIGNS[i]) * counts[i];
    }
    let total = terms.iter().sum();
    let sum: u64 = unsigned.iter().sum();
    let sigma = (sum as f64).sqrt();
    let significance = if sigma > 0.0 { total as f64 / sigma } else { 0.0 };
    Ok(ChCounts {
        counts: unsigned,
        decomposition: ChDecomposition { terms, total },
        sigma,
        significance,
    })
}
