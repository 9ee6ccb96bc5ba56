use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Power-normalized up-conversion to down-conversion ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpucBound {
    /// `(n_spuc / P_spuc) / (n_pdc / P_pdc)`
    pub ratio: f64,
    /// `1 / ratio`; infinite when no up-conversion was seen.
    pub suppression: f64,
}

/// Bound the spontaneous up-conversion signal relative to down-conversion
/// after normalizing each count by its pump power (W).
pub fn spuc_bound(
    n_spuc_upper: f64,
    n_pdc: f64,
    pump_power_spuc: f64,
    pump_power_pdc: f64,
) -> Result<SpucBound> {
    if !(n_spuc_upper >= 0.0 && n_spuc_upper.is_finite()) {
        return Err(invalid("n_spuc_upper", format!("must be finite and >= 0, got {n_spuc_upper}")));
    }
    for (name, v) in [
        ("n_pdc", n_pdc),
        ("pump_power_spuc", pump_power_spuc),
        ("pump_power_pdc", pump_power_pdc),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, format!("must be finite and > 0, got {v}")));
        }
    }
    let ratio = (n_spuc_upper / pump_power_spuc) / (n_pdc / pump_power_pdc);
    Ok(SpucBound {
        ratio,
        suppression: 1.0 / ratio,
    })
}
