//! Local-hidden-variable models.
//!
//! A deterministic strategy fixes, for each of the four analyzer settings,
//! whether the photon is detected; every local model is a convex mixture of
//! the 16 strategies. Detection with no polarizer is fixed to 1, which is
//! the extremal case allowed by the no-enhancement assumption.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{JointPassProbabilities, PairModel, PolarizerSetting};

/// Detection outcomes at θ₁, θ₁′ (arm 1) and θ₂, θ₂′ (arm 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a1: bool,
    pub a1p: bool,
    pub b2: bool,
    pub b2p: bool,
}

impl DeterministicStrategy {
    /// Strategy number `i` in `0..16`; bit 3 is `a1`, bit 0 is `b2p`.
    pub fn from_index(i: usize) -> Self {
        assert!(i < 16, "strategy index out of range: {i}");
        Self {
            a1: i & 8 != 0,
            a1p: i & 4 != 0,
            b2: i & 2 != 0,
            b2p: i & 1 != 0,
        }
    }

    pub fn index(&self) -> usize {
        (usize::from(self.a1) << 3)
            | (usize::from(self.a1p) << 2)
            | (usize::from(self.b2) << 1)
            | usize::from(self.b2p)
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..16).map(Self::from_index)
    }
}

/// `a1·b2 − a1·b2′ + a1′·b2 + a1′·b2′ − a1′ − b2`
pub fn ch_deterministic(s: &DeterministicStrategy) -> i32 {
    let (a1, a1p, b2, b2p) = (
        i32::from(s.a1),
        i32::from(s.a1p),
        i32::from(s.b2),
        i32::from(s.b2p),
    );
    a1 * b2 - a1 * b2p + a1p * b2 + a1p * b2p - a1p - b2
}

/// Convex weights over the 16 strategies, indexed by
/// [`DeterministicStrategy::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvMixture {
    weights: [f64; 16],
}

const SIMPLEX_TOL: f64 = 1e-12;

impl LhvMixture {
    pub fn new(weights: [f64; 16]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::NotSimplex(format!("weight {w} is negative or not finite")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotSimplex(format!("weights sum to {sum}")));
        }
        Ok(Self { weights })
    }

    pub fn point(strategy: DeterministicStrategy) -> Self {
        let mut weights = [0.0; 16];
        weights[strategy.index()] = 1.0;
        Self { weights }
    }

    pub fn uniform() -> Self {
        Self {
            weights: [1.0 / 16.0; 16],
        }
    }

    pub fn weights(&self) -> &[f64; 16] {
        &self.weights
    }
}

pub fn ch_mixture(mix: &LhvMixture) -> f64 {
    DeterministicStrategy::all()
        .map(|s| mix.weights[s.index()] * f64::from(ch_deterministic(&s)))
        .sum()
}

/// Classical polarized-wave model: both photons share a polarization angle
/// λ, uniform on `[0, π)`, and each passes its analyzer with probability
/// `cos²(θ − λ)` independently.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MalusModel;

impl MalusModel {
    pub fn joint_pass(&self, s1: PolarizerSetting, s2: PolarizerSetting) -> JointPassProbabilities {
        use PolarizerSetting::*;
        let single = |s: PolarizerSetting| if s.is_absent() { 1.0 } else { 0.5 };
        let q12 = match (s1, s2) {
            // (1/π)∫cos²(a−λ)cos²(b−λ)dλ
            (Angle(a), Angle(b)) => (2.0 + (2.0 * (a - b)).cos()) / 8.0,
            (Angle(_), Absent) | (Absent, Angle(_)) => 0.5,
            (Absent, Absent) => 1.0,
        };
        JointPassProbabilities {
            q12,
            q1: single(s1),
            q2: single(s2),
        }
    }
}

pub fn malus_joint_pass(model: &MalusModel, theta1: f64, theta2: f64) -> JointPassProbabilities {
    model.joint_pass(PolarizerSetting::angle(theta1), PolarizerSetting::angle(theta2))
}

impl PairModel for MalusModel {
    fn joint_pass(&self, s1: PolarizerSetting, s2: PolarizerSetting) -> JointPassProbabilities {
        MalusModel::joint_pass(self, s1, s2)
    }

    fn describe(&self) -> String {
        "malus".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::SettingsQuad;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn sixteen_strategies() {
        let all: std::collections::HashSet<_> = DeterministicStrategy::all().collect();
        assert_eq!(all.len(), 16);
        for s in DeterministicStrategy::all() {
            assert_eq!(DeterministicStrategy::from_index(s.index()), s);
        }
    }

    #[test]
    fn boundary_strategies() {
        assert_eq!(ch_deterministic(&DeterministicStrategy::from_index(15)), 0);
        assert_eq!(ch_deterministic(&DeterministicStrategy::from_index(0)), 0);
    }

    #[test]
    fn enumeration_extremes() {
        let values: Vec<i32> = DeterministicStrategy::all().map(|s| ch_deterministic(&s)).collect();
        assert_eq!(values.iter().max(), Some(&0));
        assert_eq!(values.iter().min(), Some(&-1));
    }

    /// Treat the no-polarizer outcome as a fifth bit on each arm.
    fn ch_extended(a1: i32, a1p: i32, a_inf: i32, b2: i32, b2p: i32, b_inf: i32) -> i32 {
        a1 * b2 - a1 * b2p + a1p * b2 + a1p * b2p - a1p * b_inf - a_inf * b2
    }

    #[test]
    fn free_absent_outcome_does_not_raise_maximum() {
        let mut best_no_enhancement = i32::MIN;
        let mut best_unconstrained = i32::MIN;
        for i in 0..64 {
            let bit = |k: u32| (i >> k) & 1;
            let (a1, a1p, a_inf, b2, b2p, b_inf) = (bit(5), bit(4), bit(3), bit(2), bit(1), bit(0));
            let v = ch_extended(a1, a1p, a_inf, b2, b2p, b_inf);
            best_unconstrained = best_unconstrained.max(v);
            // a polarizer can only remove photons
            if a1 <= a_inf && a1p <= a_inf && b2 <= b_inf && b2p <= b_inf {
                best_no_enhancement = best_no_enhancement.max(v);
            }
        }
        assert_eq!(best_no_enhancement, 0);
        assert_eq!(best_unconstrained, 2);
    }

    #[test]
    fn mixtures() {
        let mean = DeterministicStrategy::all().map(|s| ch_deterministic(&s)).sum::<i32>() as f64 / 16.0;
        assert!((ch_mixture(&LhvMixture::uniform()) - mean).abs() < 1e-15);
        assert_eq!(ch_mixture(&LhvMixture::point(DeterministicStrategy::from_index(15))), 0.0);
        assert!(LhvMixture::new([0.1; 16]).is_err());
        let mut w = [0.0; 16];
        w[0] = 1.5;
        w[1] = -0.5;
        assert!(LhvMixture::new(w).is_err());
    }

    #[test]
    fn malus_closed_forms() {
        let m = MalusModel;
        assert!((malus_joint_pass(&m, 0.3, 0.3).q12 - 3.0 / 8.0).abs() < 1e-15);
        assert!((malus_joint_pass(&m, 0.1 + PI / 4.0, 0.1).q12 - 0.25).abs() < 1e-15);
        let j = malus_joint_pass(&m, 1.0, 2.0);
        assert_eq!((j.q1, j.q2), (0.5, 0.5));
    }

    #[test]
    fn malus_integral_matches_quadrature() {
        let n = 20_000;
        let (a, b) = (0.4, 1.3);
        let integral: f64 = (0..n)
            .map(|k| {
                let lambda = (k as f64 + 0.5) * PI / n as f64;
                (a - lambda).cos().powi(2) * (b - lambda).cos().powi(2)
            })
            .sum::<f64>()
            / n as f64;
        assert!((integral - malus_joint_pass(&MalusModel, a, b).q12).abs() < 1e-10);
    }

    #[test]
    fn malus_never_violates_on_grid() {
        let m = MalusModel;
        let grid: Vec<f64> = (0..36).map(|i| i as f64 * 5.0).collect();
        let mut best = f64::NEG_INFINITY;
        for &a in &grid {
            for &ap in &grid {
                for &b in &grid {
                    for &bp in &grid {
                        let q = SettingsQuad::from_degrees(a, ap, b, bp);
                        let total: f64 = q
                            .settings()
                            .iter()
                            .zip(crate::inequalities::CH_SIGNS)
                            .map(|((s1, s2), sign)| f64::from(sign) * m.joint_pass(*s1, *s2).q12)
                            .sum();
                        best = best.max(total);
                    }
                }
            }
        }
        assert!(best <= 1e-12, "{best}");
    }

    proptest! {
        #[test]
        fn malus_cauchy_schwarz(a in -4.0f64..4.0, b in -4.0f64..4.0) {
            let j = malus_joint_pass(&MalusModel, a, b);
            prop_assert!(j.q12 >= 0.0 && j.q12 <= j.q1.min(j.q2));
            prop_assert!(j.is_consistent(0.0));
        }
    }
}
