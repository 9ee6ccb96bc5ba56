//! Event-level simulation of a two-arm coincidence experiment.
//!
//! Pairs are created by a homogeneous Poisson process; each pair's joint
//! pass outcome is drawn from a [`PairModel`]; passing photons are detected
//! with per-arm efficiency, smeared by Gaussian timing jitter, and mixed
//! with Poisson dark counts. Coincidences are then found by a greedy
//! single-use window match.
//!
//! # Seeding
//!
//! Every run draws from a ChaCha8 generator keyed by the 64-bit master seed
//! with an explicit stream number. A standalone [`simulate_run`] uses
//! stream 0; the six runs of [`run_ch_experiment`] use streams 1 to 6 in
//! CH term order. Results therefore do not depend on how runs are
//! scheduled across threads.

mod counting;
mod experiment;
mod generate;
pub mod io;

pub use counting::{accidental_rate, count_coincidences};
pub use experiment::{run_ch_experiment, run_ch_experiment_logged, ChExperiment};
pub use generate::{simulate_run, simulate_run_stream, simulate_with_model};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lhv::MalusModel;
use crate::state::{EntangledState, JointPassProbabilities, PairModel, PolarizerSetting};

/// Longest accepted run. At 10⁵ s the spacing of adjacent doubles is
/// about 15 ps, well below any realistic coincidence window.
pub const MAX_DURATION_S: f64 = 1e5;

/// Which model supplies the per-pair pass probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceModel {
    Quantum { f: f64 },
    Malus,
}

impl SourceModel {
    pub fn quantum(state: EntangledState) -> Self {
        SourceModel::Quantum { f: state.f() }
    }

    fn validate(&self) -> Result<()> {
        if let SourceModel::Quantum { f } = self {
            EntangledState::new(*f)?;
        }
        Ok(())
    }
}

impl PairModel for SourceModel {
    fn joint_pass(&self, s1: PolarizerSetting, s2: PolarizerSetting) -> JointPassProbabilities {
        match self {
            // f is validated before any run starts
            SourceModel::Quantum { f } => EntangledState::new(*f)
                .map(|s| s.joint_pass_probabilities(s1, s2))
                .unwrap_or(JointPassProbabilities { q12: f64::NAN, q1: f64::NAN, q2: f64::NAN }),
            SourceModel::Malus => MalusModel.joint_pass(s1, s2),
        }
    }

    fn describe(&self) -> String {
        match self {
            SourceModel::Quantum { f } => format!("quantum(f={f})"),
            SourceModel::Malus => "malus".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// Pairs per second.
    pub pair_rate: f64,
    /// Seconds.
    pub duration: f64,
    pub model: SourceModel,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_rate > 0.0 && self.pair_rate.is_finite()) {
            return Err(invalid("pair_rate", format!("must be > 0, got {}", self.pair_rate)));
        }
        if !(self.duration > 0.0 && self.duration <= MAX_DURATION_S) {
            return Err(invalid(
                "duration",
                format!("must lie in (0, {MAX_DURATION_S}] s, got {}", self.duration),
            ));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    pub eta1: f64,
    pub eta2: f64,
    /// Dark-count rates, counts per second.
    pub dark1: f64,
    pub dark2: f64,
    /// Standard deviation of the timing jitter, seconds.
    pub jitter_sigma: f64,
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self {
            eta1: 1.0,
            eta2: 1.0,
            dark1: 0.0,
            dark2: 0.0,
            jitter_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(invalid(name, format!("must lie in [0, 1], got {eta}")));
            }
        }
        for (name, v) in [
            ("dark1", self.dark1),
            ("dark2", self.dark2),
            ("jitter_sigma", self.jitter_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Origin of an [`EventLog`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMetadata {
    pub seed: u64,
    pub stream: u64,
    pub settings: (PolarizerSetting, PolarizerSetting),
    pub source: SourceConfig,
    pub detector: DetectorModel,
    pub pairs_generated: u64,
}

/// Sorted detection timestamps (seconds) on each arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub arm1: Vec<f64>,
    pub arm2: Vec<f64>,
    pub meta: RunMetadata,
}

impl EventLog {
    pub fn duration(&self) -> f64 {
        self.meta.source.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    pub n_coinc: u64,
    pub singles1: u64,
    pub singles2: u64,
    /// Full window width, seconds; events pair when `|Δt| ≤ window/2`.
    pub window: f64,
    pub duration: f64,
    pub settings: (PolarizerSetting, PolarizerSetting),
}
