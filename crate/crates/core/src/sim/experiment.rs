use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{count_coincidences, simulate_run_stream, CoincidenceCounts, DetectorModel, EventLog, SourceConfig};
use crate::error::Result;
use crate::inequalities::{ch_from_counts, ChCounts, SettingsQuad};

/// Outcome of the six acquisitions needed for one CH value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChExperiment {
    pub seed: u64,
    pub window: f64,
    pub quad: SettingsQuad,
    /// One entry per CH term, in term order.
    pub runs: Vec<CoincidenceCounts>,
    pub ch: ChCounts,
}

/// Simulate the six runs `(θ₁,θ₂), (θ₁,θ₂′), (θ₁′,θ₂), (θ₁′,θ₂′), (θ₁′,∞),
/// (∞,θ₂)` and evaluate CH on their coincidence counts. Run `k` (0-based)
/// uses generator stream `k + 1` of `seed`.
pub fn run_ch_experiment(
    source: &SourceConfig,
    det: &DetectorModel,
    quad: &SettingsQuad,
    window: f64,
    seed: u64,
) -> Result<ChExperiment> {
    run(source, det, quad, window, seed, false).map(|(e, _)| e)
}

/// [`run_ch_experiment`], also returning the six event logs.
pub fn run_ch_experiment_logged(
    source: &SourceConfig,
    det: &DetectorModel,
    quad: &SettingsQuad,
    window: f64,
    seed: u64,
) -> Result<(ChExperiment, Vec<EventLog>)> {
    run(source, det, quad, window, seed, true)
}

fn run(
    source: &SourceConfig,
    det: &DetectorModel,
    quad: &SettingsQuad,
    window: f64,
    seed: u64,
    keep_logs: bool,
) -> Result<(ChExperiment, Vec<EventLog>)> {
    let per_run: Vec<(CoincidenceCounts, Option<EventLog>)> = quad
        .settings()
        .par_iter()
        .enumerate()
        .map(|(k, (s1, s2))| {
            let log = simulate_run_stream(source, det, *s1, *s2, seed, k as u64 + 1)?;
            let counts = count_coincidences(&log, window)?;
            Ok((counts, keep_logs.then_some(log)))
        })
        .collect::<Result<_>>()?;

    let (runs, logs): (Vec<_>, Vec<_>) = per_run.into_iter().unzip();
    let mut raw = [0i64; 6];
    for (slot, c) in raw.iter_mut().zip(&runs) {
        *slot = c.n_coinc as i64;
    }
    let ch = ch_from_counts(raw)?;
    Ok((
        ChExperiment {
            seed,
            window,
            quad: *quad,
            runs,
            ch,
        },
        logs.into_iter().flatten().collect(),
    ))
}
