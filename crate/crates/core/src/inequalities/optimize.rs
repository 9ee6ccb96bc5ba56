//! Multi-start search for the analyzer angles that maximize CH.
//!
//! A coarse grid over the four angles ranks starting points; the best of
//! them (plus any caller-supplied quads) are refined with Nelder-Mead, and
//! the winner is polished at a much tighter tolerance.
//!
//! For `f ≠ 1` the maximum is generally not isolated: it lies on a
//! one-parameter ridge of equally good quads. When `pin_reference` is set
//! the optimizer looks for a representative with `θ₂′ = 0` (arm-2 reference
//! analyzer along H) and reports that one if it reaches the same value,
//! reflected if needed so that `θ₂ ≤ 90°`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simplex::{self, SimplexOptions};
use super::{ch_total, SettingsQuad};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeConfig {
    /// Number of best grid points refined.
    pub restarts: usize,
    /// Pitch of the seeding grid, degrees.
    pub grid_pitch_deg: f64,
    /// Simplex convergence tolerance on the angles, radians.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Extra starting quads, always refined in addition to the grid seeds.
    pub seeds: Vec<SettingsQuad>,
    pub pin_reference: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            grid_pitch_deg: 15.0,
            tolerance: 1e-4,
            max_iter: 20_000,
            seeds: Vec::new(),
            pin_reference: true,
        }
    }
}

/// Best quad found and every distinct local optimum reached by a restart.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleOptimum {
    pub quad: SettingsQuad,
    pub ch_max: f64,
    /// Distinct optima (modulo π per angle, 0.5° apart), best first.
    pub optima: Vec<(SettingsQuad, f64)>,
    pub converged_restarts: usize,
    /// True when `quad` has `θ₂′ = 0`.
    pub reference_pinned: bool,
}

const DISTINCT_RAD: f64 = 0.5 * std::f64::consts::PI / 180.0;
const PIN_SLACK: f64 = 1e-11;

fn grid_angles(pitch_deg: f64) -> Vec<f64> {
    let n = (180.0 / pitch_deg).round().max(1.0) as usize;
    (0..n).map(|i| (i as f64 * 180.0 / n as f64).to_radians()).collect()
}

/// Indices of the `k` largest values, ties broken by position.
fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

fn refine<const N: usize>(
    objective: impl Fn(&[f64; N]) -> f64 + Sync,
    starts: &[[f64; N]],
    step: f64,
    opts: SimplexOptions,
) -> Vec<simplex::SimplexResult<N>> {
    starts
        .par_iter()
        .map(|x0| simplex::minimize(|x| -objective(x), *x0, step, opts))
        .collect()
}

fn polish<const N: usize>(
    objective: impl Fn(&[f64; N]) -> f64,
    x: [f64; N],
    tolerance: f64,
    max_iter: usize,
) -> ([f64; N], f64) {
    let tight = SimplexOptions {
        xtol: (tolerance * 1e-4).max(1e-12),
        ftol: 0.0,
        max_iter,
    };
    let r = simplex::minimize(|x| -objective(x), x, tolerance.max(1e-6) * 10.0, tight);
    let start = objective(&x);
    if -r.value >= start {
        (r.x, -r.value)
    } else {
        (x, start)
    }
}

/// Maximize the CH total over the four analyzer angles at efficiency `eta`.
pub fn optimize_angles(f: f64, eta: f64, config: &OptimizeConfig) -> Result<AngleOptimum> {
    if !f.is_finite() || f < 0.0 {
        return Err(invalid("f", format!("must be finite and >= 0, got {f}")));
    }
    super::check_eta(eta)?;
    if config.restarts == 0 && config.seeds.is_empty() {
        return Err(invalid("restarts", "need at least one start"));
    }
    if !(config.grid_pitch_deg > 0.0 && config.grid_pitch_deg <= 90.0) {
        return Err(invalid("grid_pitch_deg", "must lie in (0, 90]"));
    }
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(invalid("tolerance", "must be positive"));
    }

    let objective = |x: &[f64; 4]| ch_total(f, eta, x);
    let grid = grid_angles(config.grid_pitch_deg);
    let step = config.grid_pitch_deg.to_radians() / 2.0;
    let opts = SimplexOptions {
        xtol: config.tolerance,
        ftol: 1e-13,
        max_iter: config.max_iter,
    };

    let points: Vec<[f64; 4]> = iproduct4(&grid);
    let values: Vec<f64> = points.par_iter().map(objective).collect();
    let mut starts: Vec<[f64; 4]> = top_k(&values, config.restarts)
        .into_iter()
        .map(|i| points[i])
        .collect();
    starts.extend(config.seeds.iter().map(SettingsQuad::as_array));

    let results = refine(objective, &starts, step, opts);
    let converged_restarts = results.iter().filter(|r| r.converged).count();
    if converged_restarts == 0 {
        return Err(Error::NonConvergence(format!(
            "none of {} restarts reached angle tolerance {} within {} iterations",
            starts.len(),
            config.tolerance,
            config.max_iter
        )));
    }

    let mut optima: Vec<(SettingsQuad, f64)> = Vec::new();
    let mut ranked: Vec<(SettingsQuad, f64)> = results
        .iter()
        .filter(|r| r.converged)
        .map(|r| (SettingsQuad::from_array(r.x), -r.value))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (q, v) in ranked {
        if optima.iter().all(|(o, _)| o.distance(&q) > DISTINCT_RAD) {
            optima.push((q, v));
        }
    }

    let (best_x, best_v) = polish(objective, optima[0].0.as_array(), config.tolerance, config.max_iter);
    let mut quad = SettingsQuad::from_array(best_x);
    let mut ch_max = best_v;
    optima[0] = (quad, ch_max);

    let mut reference_pinned = quad.theta2_prime == 0.0;
    if config.pin_reference && !reference_pinned {
        if let Some((q, v)) = pinned_search(f, eta, config, &grid, step, opts) {
            if v >= ch_max - PIN_SLACK {
                quad = if q.theta2 > FRAC_PI_2 { q.reflected() } else { q };
                ch_max = ch_max.max(v);
                reference_pinned = true;
            }
        }
    }

    Ok(AngleOptimum {
        quad,
        ch_max,
        optima,
        converged_restarts,
        reference_pinned,
    })
}

/// Same search restricted to the slice `θ₂′ = 0`.
fn pinned_search(
    f: f64,
    eta: f64,
    config: &OptimizeConfig,
    grid: &[f64],
    step: f64,
    opts: SimplexOptions,
) -> Option<(SettingsQuad, f64)> {
    let objective = |x: &[f64; 3]| ch_total(f, eta, &[x[0], x[1], x[2], 0.0]);
    let mut points = Vec::with_capacity(grid.len().pow(3));
    for &a in grid {
        for &ap in grid {
            for &b in grid {
                points.push([a, ap, b]);
            }
        }
    }
    let values: Vec<f64> = points.iter().map(objective).collect();
    let mut starts: Vec<[f64; 3]> = top_k(&values, config.restarts.max(1))
        .into_iter()
        .map(|i| points[i])
        .collect();
    starts.extend(config.seeds.iter().filter(|s| s.theta2_prime == 0.0).map(|s| {
        [s.theta1, s.theta1_prime, s.theta2]
    }));
    let best = refine(objective, &starts, step, opts)
        .into_iter()
        .filter(|r| r.converged)
        .min_by(|a, b| a.value.total_cmp(&b.value))?;
    let (x, v) = polish(objective, best.x, config.tolerance, config.max_iter);
    Some((SettingsQuad::new(x[0], x[1], x[2], 0.0), v))
}

fn iproduct4(grid: &[f64]) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(grid.len().pow(4));
    for &a in grid {
        for &ap in grid {
            for &b in grid {
                for &bp in grid {
                    out.push([a, ap, b, bp]);
                }
            }
        }
    }
    out
}
