//! Python bindings. Angles are radians; `None` stands for an absent
//! polarizer. Composite results come back as plain dicts.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use chlab_core::analysis::{self, SedGeometry, SedParams, DEFAULT_T_MAX_S};
use chlab_core::lhv::{self, DeterministicStrategy, LhvMixture};
use chlab_core::sim::{self, DetectorModel, SourceConfig, SourceModel};
use chlab_core::{Arm, Error, OptimizeConfig, PolarizerSetting, ThresholdConfig};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence(_) | Error::BracketFailure(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialize through JSON so Python sees ordinary dicts and lists.
fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn setting(theta: Option<f64>) -> PolarizerSetting {
    theta.map_or(PolarizerSetting::Absent, PolarizerSetting::angle)
}

fn arm(n: u8) -> PyResult<Arm> {
    match n {
        1 => Ok(Arm::One),
        2 => Ok(Arm::Two),
        _ => Err(PyValueError::new_err(format!("arm must be 1 or 2, got {n}"))),
    }
}

/// `(|HH> + f|VV>) / sqrt(1 + f²)`.
#[pyclass(frozen, from_py_object, module = "chlab")]
#[derive(Clone, Copy)]
struct EntangledState(chlab_core::EntangledState);

#[pymethods]
impl EntangledState {
    #[new]
    fn new(f: f64) -> PyResult<Self> {
        chlab_core::EntangledState::new(f).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn maximal() -> Self {
        Self(chlab_core::EntangledState::maximal())
    }

    #[getter]
    fn f(&self) -> f64 {
        self.0.f()
    }

    fn coincidence_probability(&self, theta1: Option<f64>, theta2: Option<f64>) -> f64 {
        self.0.coincidence_probability(setting(theta1), setting(theta2))
    }

    #[pyo3(signature = (theta, arm=1))]
    fn single_pass_probability(&self, theta: Option<f64>, arm: u8) -> PyResult<f64> {
        Ok(self.0.single_pass_probability(setting(theta), self::arm(arm)?))
    }

    /// `(q12, q1, q2)`
    fn joint_pass_probabilities(&self, theta1: Option<f64>, theta2: Option<f64>) -> (f64, f64, f64) {
        let j = self.0.joint_pass_probabilities(setting(theta1), setting(theta2));
        (j.q12, j.q1, j.q2)
    }

    fn __repr__(&self) -> String {
        format!("EntangledState(f={})", self.0.f())
    }
}

/// Analyzer angles `(θ1, θ1′, θ2, θ2′)`, stored modulo π.
#[pyclass(frozen, from_py_object, module = "chlab")]
#[derive(Clone, Copy)]
struct SettingsQuad(chlab_core::SettingsQuad);

#[pymethods]
impl SettingsQuad {
    #[new]
    fn new(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Self {
        Self(chlab_core::SettingsQuad::new(theta1, theta1_prime, theta2, theta2_prime))
    }

    #[staticmethod]
    fn from_degrees(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Self {
        Self(chlab_core::SettingsQuad::from_degrees(theta1, theta1_prime, theta2, theta2_prime))
    }

    /// (72.24°, 17.76°, 45°, 0°)
    #[staticmethod]
    fn reference() -> Self {
        Self(chlab_core::SettingsQuad::reference_f04())
    }

    fn radians(&self) -> [f64; 4] {
        self.0.as_array()
    }

    fn degrees(&self) -> [f64; 4] {
        self.0.degrees()
    }

    fn __repr__(&self) -> String {
        let [a, ap, b, bp] = self.0.degrees();
        format!("SettingsQuad.from_degrees({a}, {ap}, {b}, {bp})")
    }
}

fn quad_or_reference(quad: Option<SettingsQuad>) -> chlab_core::SettingsQuad {
    quad.map_or_else(chlab_core::SettingsQuad::reference_f04, |q| q.0)
}

/// Signed CH terms and total for the quantum prediction (per pair).
#[pyfunction]
#[pyo3(signature = (f, quad=None, eta=1.0))]
fn ch_quantum<'py>(py: Python<'py>, f: f64, quad: Option<SettingsQuad>, eta: f64) -> PyResult<Bound<'py, PyAny>> {
    let state = chlab_core::EntangledState::new(f).map_err(to_py)?;
    let d = chlab_core::ch_quantum(&state, &quad_or_reference(quad), eta).map_err(to_py)?;
    to_dict(py, &d)
}

#[pyfunction]
fn ch_from_counts<'py>(py: Python<'py>, counts: [i64; 6]) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &chlab_core::ch_from_counts(counts).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (f, eta=1.0, restarts=16, grid_pitch_deg=15.0, tolerance=1e-4, pin_reference=true))]
fn optimize_angles<'py>(
    py: Python<'py>,
    f: f64,
    eta: f64,
    restarts: usize,
    grid_pitch_deg: f64,
    tolerance: f64,
    pin_reference: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = OptimizeConfig { restarts, grid_pitch_deg, tolerance, pin_reference, ..OptimizeConfig::default() };
    let r = py.detach(|| chlab_core::optimize_angles(f, eta, &cfg)).map_err(to_py)?;
    to_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (f, tolerance=1e-3, eta_lower=0.5))]
fn critical_efficiency<'py>(py: Python<'py>, f: f64, tolerance: f64, eta_lower: f64) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ThresholdConfig { tolerance, eta_lower, ..ThresholdConfig::default() };
    let r = py.detach(|| chlab_core::critical_efficiency(f, &cfg)).map_err(to_py)?;
    to_dict(py, &r)
}

/// Six simulated acquisitions and their CH value. `f=None` selects the
/// classical Malus source.
#[pyfunction]
#[pyo3(signature = (
    f, pair_rate, duration, quad=None, window=1e-8, seed=0,
    eta1=1.0, eta2=1.0, dark1=0.0, dark2=0.0, jitter_sigma=0.0,
))]
#[allow(clippy::too_many_arguments)]
fn run_ch_experiment<'py>(
    py: Python<'py>,
    f: Option<f64>,
    pair_rate: f64,
    duration: f64,
    quad: Option<SettingsQuad>,
    window: f64,
    seed: u64,
    eta1: f64,
    eta2: f64,
    dark1: f64,
    dark2: f64,
    jitter_sigma: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let model = f.map_or(SourceModel::Malus, |f| SourceModel::Quantum { f });
    let source = SourceConfig { pair_rate, duration, model };
    let det = DetectorModel { eta1, eta2, dark1, dark2, jitter_sigma };
    let quad = quad_or_reference(quad);
    let e = py.detach(|| sim::run_ch_experiment(&source, &det, &quad, window, seed)).map_err(to_py)?;
    to_dict(py, &e)
}

#[pyfunction]
fn accidental_rate(singles1_rate: f64, singles2_rate: f64, window: f64) -> f64 {
    sim::accidental_rate(singles1_rate, singles2_rate, window)
}

/// SI units throughout (m, s).
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn sed_rate_threshold(
    eta: f64,
    focal_length: f64,
    crystal_radius: f64,
    coherence_time: f64,
    distance: f64,
    wavelength: f64,
    detector_depth: f64,
    absorption_time: f64,
) -> PyResult<f64> {
    let geometry = SedGeometry { eta, focal_length, crystal_radius, coherence_time, distance, wavelength, detector_depth };
    analysis::sed_rate_threshold(&SedParams { geometry, absorption_time }).map_err(to_py)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn sed_implied_t(
    eta: f64,
    focal_length: f64,
    crystal_radius: f64,
    coherence_time: f64,
    distance: f64,
    wavelength: f64,
    detector_depth: f64,
    observed_rate: f64,
) -> PyResult<f64> {
    let g = SedGeometry { eta, focal_length, crystal_radius, coherence_time, distance, wavelength, detector_depth };
    analysis::sed_implied_t(&g, observed_rate).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (
    eta, focal_length, crystal_radius, coherence_time, distance, wavelength, detector_depth,
    observed_rate, t_max=DEFAULT_T_MAX_S, violation_observed=true,
))]
#[allow(clippy::too_many_arguments)]
fn sed_verdict<'py>(
    py: Python<'py>,
    eta: f64,
    focal_length: f64,
    crystal_radius: f64,
    coherence_time: f64,
    distance: f64,
    wavelength: f64,
    detector_depth: f64,
    observed_rate: f64,
    t_max: f64,
    violation_observed: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let g = SedGeometry { eta, focal_length, crystal_radius, coherence_time, distance, wavelength, detector_depth };
    to_dict(py, &analysis::sed_verdict(&g, observed_rate, t_max, violation_observed).map_err(to_py)?)
}

/// `(ratio, suppression)`; suppression is `inf` when no up-conversion was seen.
#[pyfunction]
fn spuc_bound(n_spuc_upper: f64, n_pdc: f64, pump_power_spuc: f64, pump_power_pdc: f64) -> PyResult<(f64, f64)> {
    let b = analysis::spuc_bound(n_spuc_upper, n_pdc, pump_power_spuc, pump_power_pdc).map_err(to_py)?;
    Ok((b.ratio, b.suppression))
}

fn check_background(mu: f64) -> PyResult<()> {
    if mu >= 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(PyValueError::new_err(format!("background_mean must be finite and >= 0, got {mu}")))
    }
}

#[pyfunction]
fn dbb_semiplane_pvalue(observed: u64, background_mean: f64) -> PyResult<f64> {
    check_background(background_mean)?;
    Ok(analysis::dbb_semiplane_pvalue(observed, background_mean))
}

/// Natural log of the p-value; stays finite where the p-value underflows.
#[pyfunction]
fn dbb_semiplane_log_pvalue(observed: u64, background_mean: f64) -> PyResult<f64> {
    check_background(background_mean)?;
    Ok(analysis::dbb_semiplane_log_pvalue(observed, background_mean))
}

/// CH of deterministic strategy `index` in 0..16.
#[pyfunction]
fn ch_deterministic(index: usize) -> PyResult<i32> {
    if index >= 16 {
        return Err(PyValueError::new_err(format!("strategy index must be < 16, got {index}")));
    }
    Ok(lhv::ch_deterministic(&DeterministicStrategy::from_index(index)))
}

/// CH of a convex mixture of the 16 deterministic strategies.
#[pyfunction]
fn ch_mixture(weights: [f64; 16]) -> PyResult<f64> {
    Ok(lhv::ch_mixture(&LhvMixture::new(weights).map_err(to_py)?))
}

#[pymodule]
fn chlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<EntangledState>()?;
    m.add_class::<SettingsQuad>()?;
    m.add_function(wrap_pyfunction!(ch_quantum, m)?)?;
    m.add_function(wrap_pyfunction!(ch_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_angles, m)?)?;
    m.add_function(wrap_pyfunction!(critical_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(run_ch_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(accidental_rate, m)?)?;
    m.add_function(wrap_pyfunction!(sed_rate_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(sed_implied_t, m)?)?;
    m.add_function(wrap_pyfunction!(sed_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(spuc_bound, m)?)?;
    m.add_function(wrap_pyfunction!(dbb_semiplane_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(dbb_semiplane_log_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(ch_deterministic, m)?)?;
    m.add_function(wrap_pyfunction!(ch_mixture, m)?)?;
    m.add("DEFAULT_T_MAX_S", DEFAULT_T_MAX_S)?;
    Ok(())
}
