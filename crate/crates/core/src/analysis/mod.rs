//! Tests of specific alternatives to quantum optics: the stochastic-optics
//! singles-rate bound, the spontaneous up-conversion search, and the
//! Bohmian same-semiplane coincidence test.

mod dbb;
mod sed;
mod spuc;

pub use dbb::{dbb_semiplane_log_pvalue, dbb_semiplane_pvalue};
pub use sed::{
    sed_implied_t, sed_rate_threshold, sed_verdict, SedGeometry, SedParams, SedVerdict,
    DEFAULT_T_MAX_S,
};
pub use spuc::{spuc_bound, SpucBound};
