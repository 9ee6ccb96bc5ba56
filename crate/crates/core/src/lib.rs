//! Software laboratory for Clauser-Horne tests with non-maximally
//! polarization-entangled photon pairs.
//!
//! - [`state`]: the entangled state and its detection probabilities
//! - [`inequalities`]: CH evaluation, angle optimization, critical efficiency
//! - [`lhv`]: local-hidden-variable strategies and a classical Malus model
//! - [`sim`]: event-stream simulation and coincidence counting
//! - [`analysis`]: stochastic-optics rate bound, up-conversion bound, and the
//!   Bohmian semiplane test

pub mod analysis;
pub mod error;
pub mod inequalities;
pub mod lhv;
pub mod sim;
pub mod state;

pub use error::{Error, Result};
pub use inequalities::{
    ch_from_counts, ch_quantum, critical_efficiency, optimize_angles, AngleOptimum, ChCounts,
    ChDecomposition, EfficiencyThresholdResult, OptimizeConfig, SettingsQuad, ThresholdConfig,
};
pub use state::{Arm, EntangledState, JointPassProbabilities, PairModel, PolarizerSetting};
