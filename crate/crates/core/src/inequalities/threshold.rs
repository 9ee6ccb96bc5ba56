//! Critical detection efficiency: the smallest symmetric efficiency η at
//! which some choice of analyzer angles still gives CH > 0.

use serde::{Deserialize, Serialize};

use super::optimize::{optimize_angles, OptimizeConfig};
use super::{ch_parts, SettingsQuad};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub search: OptimizeConfig,
    /// Bisection stops once the bracket is narrower than this.
    pub tolerance: f64,
    /// Lower end of the initial bracket; must not admit a violation.
    pub eta_lower: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            search: OptimizeConfig {
                pin_reference: false,
                tolerance: 1e-8,
                ..OptimizeConfig::default()
            },
            tolerance: 1e-3,
            eta_lower: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficiencyThresholdResult {
    pub eta_crit: f64,
    /// Violating quad found at the upper end of the final bracket.
    pub witness_quad: SettingsQuad,
    /// CH of the witness at `bracket.1`.
    pub witness_ch: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Bisect η on the predicate "the optimized CH is strictly positive".
///
/// The predicate is monotone in η: `CH(η) = η·(η·A − B)` with `A, B ≥ 0`,
/// so once a quad violates at η it violates at every larger η. The witness
/// is checked to have `A > 0`.
pub fn critical_efficiency(f: f64, config: &ThresholdConfig) -> Result<EfficiencyThresholdResult> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(invalid("f", format!("must lie in (0, 1], got {f}")));
    }
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(invalid("tolerance", "must be positive"));
    }
    if !(config.eta_lower > 0.0 && config.eta_lower < 1.0) {
        return Err(invalid("eta_lower", "must lie in (0, 1)"));
    }

    let mut evaluations = 0;
    let mut probe = |eta: f64| -> Result<Option<(SettingsQuad, f64)>> {
        evaluations += 1;
        let r = optimize_angles(f, eta, &config.search)?;
        Ok((r.ch_max > 0.0).then_some((r.quad, r.ch_max)))
    };

    let (mut lo, mut hi) = (config.eta_lower, 1.0);
    if let Some((_, v)) = probe(lo)? {
        return Err(Error::BracketFailure(format!(
            "violation CH={v:e} already at lower end eta={lo}"
        )));
    }
    let mut witness = probe(hi)?.ok_or_else(|| {
        Error::BracketFailure(format!("no violation at eta=1 for f={f}"))
    })?;

    while hi - lo > config.tolerance {
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Some(w) => {
                hi = mid;
                witness = w;
            }
            None => lo = mid,
        }
    }

    let (coinc, _) = ch_parts(f, &witness.0.as_array());
    if coinc <= 0.0 {
        return Err(Error::BracketFailure(format!(
            "witness has non-positive coincidence part {coinc:e}; monotonicity in eta not guaranteed"
        )));
    }

    Ok(EfficiencyThresholdResult {
        eta_crit: 0.5 * (lo + hi),
        witness_quad: witness.0,
        witness_ch: witness.1,
        bracket: (lo, hi),
        evaluations,
    })
}
