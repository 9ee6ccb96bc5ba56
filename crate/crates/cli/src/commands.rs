use std::path::PathBuf;

use chlab_core::analysis::{self, SedGeometry, SedParams};
use chlab_core::inequalities::CH_TERM_LABELS;
use chlab_core::sim::{self, io::write_event_log};
use chlab_core::{
    ch_from_counts, ch_quantum, critical_efficiency, optimize_angles, Arm, ChCounts,
    EntangledState, OptimizeConfig, PolarizerSetting, SettingsQuad, ThresholdConfig,
};
use clap::{ArgGroup, Args};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{QuadDegrees, RunConfig};
use crate::error::CliError;

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(std::io::Error::other(e)))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn setting_json(s: PolarizerSetting) -> Value {
    match s {
        PolarizerSetting::Angle(t) => json!({"kind": "angle", "theta_deg": t.to_degrees()}),
        PolarizerSetting::Absent => json!({"kind": "absent"}),
    }
}

fn quad_json(q: &SettingsQuad) -> Value {
    let [a, ap, b, bp] = q.degrees();
    json!({"theta1": a, "theta1_prime": ap, "theta2": b, "theta2_prime": bp})
}

fn terms_json<T: Serialize + Copy>(terms: &[T; 6]) -> Value {
    Value::Array(
        CH_TERM_LABELS
            .iter()
            .zip(terms)
            .map(|(label, v)| json!({"term": label, "signed_value": v}))
            .collect(),
    )
}

fn counts_json(c: &ChCounts) -> Value {
    json!({
        "counts": c.counts,
        "terms": terms_json(&c.decomposition.terms),
        "total": c.decomposition.total,
        "sigma": c.sigma,
        "significance": c.significance,
        "violation": c.is_violation(),
    })
}

fn parse_quad(text: &str) -> Result<SettingsQuad, CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad quad `{text}`: {e}")))?;
    match v.as_slice() {
        [a, ap, b, bp] if v.iter().all(|t| t.is_finite()) => Ok(SettingsQuad::from_degrees(*a, *ap, *b, *bp)),
        _ => Err(usage(format!("quad `{text}` must be four finite angles in degrees"))),
    }
}

/// Coincidence and single pass probabilities of the entangled state.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
#[command(group(ArgGroup::new("arm1").required(true).args(["theta1", "absent1"])))]
#[command(group(ArgGroup::new("arm2").required(true).args(["theta2", "absent2"])))]
pub struct PredictArgs {
    /// Amplitude ratio f of |VV> to |HH> (dimensionless, >= 0).
    #[arg(long)]
    f: f64,
    /// Arm-1 analyzer angle, degrees from H.
    #[arg(long)]
    theta1: Option<f64>,
    /// No polarizer on arm 1.
    #[arg(long)]
    absent1: bool,
    /// Arm-2 analyzer angle, degrees from H.
    #[arg(long)]
    theta2: Option<f64>,
    /// No polarizer on arm 2.
    #[arg(long)]
    absent2: bool,
}

fn setting_arg(theta: Option<f64>) -> Result<PolarizerSetting, CliError> {
    match theta {
        Some(t) if t.is_finite() => Ok(PolarizerSetting::degrees(t)),
        Some(t) => Err(usage(format!("angle must be finite, got {t}"))),
        None => Ok(PolarizerSetting::Absent),
    }
}

pub fn predict(a: PredictArgs) -> Result<Value, CliError> {
    let state = EntangledState::new(a.f)?;
    let s1 = setting_arg(a.theta1)?;
    let s2 = setting_arg(a.theta2)?;
    Ok(json!({
        "command": "predict",
        "f": a.f,
        "setting1": setting_json(s1),
        "setting2": setting_json(s2),
        "coincidence": state.coincidence_probability(s1, s2),
        "single1": state.single_pass_probability(s1, Arm::One),
        "single2": state.single_pass_probability(s2, Arm::Two),
    }))
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    /// θ1, degrees.
    #[arg(long, default_value_t = 72.24)]
    theta1: f64,
    /// θ1', degrees.
    #[arg(long, default_value_t = 17.76)]
    theta1_prime: f64,
    /// θ2, degrees.
    #[arg(long, default_value_t = 45.0)]
    theta2: f64,
    /// θ2', degrees.
    #[arg(long, default_value_t = 0.0)]
    theta2_prime: f64,
}

impl QuadArgs {
    fn quad(&self) -> Result<SettingsQuad, CliError> {
        let q = QuadDegrees {
            theta1: self.theta1,
            theta1_prime: self.theta1_prime,
            theta2: self.theta2,
            theta2_prime: self.theta2_prime,
        };
        if ![q.theta1, q.theta1_prime, q.theta2, q.theta2_prime].iter().all(|t| t.is_finite()) {
            return Err(usage("angles must be finite"));
        }
        Ok(q.to_quad())
    }
}

/// Clauser-Horne value from predictions (--f) or from six measured counts (--counts).
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
#[command(group(ArgGroup::new("mode").required(true).args(["f", "counts"])))]
pub struct ChArgs {
    /// Amplitude ratio f (dimensionless, >= 0).
    #[arg(long)]
    f: Option<f64>,
    /// Symmetric detection efficiency, probability in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[command(flatten)]
    quad: QuadArgs,
    /// Six raw coincidence counts N(θ1,θ2),N(θ1,θ2'),N(θ1',θ2),N(θ1',θ2'),N(θ1',∞),N(∞,θ2), comma separated.
    #[arg(long, value_delimiter = ',')]
    counts: Option<Vec<i64>>,
}

pub fn ch(a: ChArgs) -> Result<Value, CliError> {
    if let Some(counts) = a.counts {
        let arr: [i64; 6] = counts
            .try_into()
            .map_err(|_| usage("--counts needs exactly six values"))?;
        let c = ch_from_counts(arr)?;
        let mut doc = json!({"command": "ch", "mode": "counts"});
        doc.as_object_mut().unwrap().extend(counts_json(&c).as_object().unwrap().clone());
        return Ok(doc);
    }
    let f = a.f.expect("clap enforces one mode");
    let state = EntangledState::new(f)?;
    let quad = a.quad.quad()?;
    let d = ch_quantum(&state, &quad, a.eta)?;
    Ok(json!({
        "command": "ch",
        "mode": "quantum",
        "f": f,
        "eta": a.eta,
        "settings_deg": quad_json(&quad),
        "terms": terms_json(&d.terms),
        "total": d.total,
        "violation": d.is_violation(),
    }))
}

/// Analyzer angles maximizing CH (multi-start simplex search).
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct OptimizeArgs {
    /// Amplitude ratio f (dimensionless, >= 0).
    #[arg(long)]
    f: f64,
    /// Symmetric detection efficiency, probability in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Number of best grid points refined.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Seeding grid pitch, degrees.
    #[arg(long, default_value_t = 15.0)]
    grid_pitch_deg: f64,
    /// Simplex convergence tolerance on angles, radians.
    #[arg(long, default_value_t = 1e-4)]
    tolerance_rad: f64,
    /// Simplex iteration cap per restart.
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Extra starting quad "θ1,θ1',θ2,θ2'" in degrees; repeatable.
    #[arg(long = "start", value_name = "DEG,DEG,DEG,DEG", allow_hyphen_values = true)]
    starts: Vec<String>,
    /// Report the best quad as found instead of the θ2' = 0 representative.
    #[arg(long)]
    no_pin: bool,
}

pub fn optimize(a: OptimizeArgs) -> Result<Value, CliError> {
    let cfg = OptimizeConfig {
        restarts: a.restarts,
        grid_pitch_deg: a.grid_pitch_deg,
        tolerance: a.tolerance_rad,
        max_iter: a.max_iter,
        seeds: a.starts.iter().map(|s| parse_quad(s)).collect::<Result<_, _>>()?,
        pin_reference: !a.no_pin,
    };
    let r = optimize_angles(a.f, a.eta, &cfg)?;
    Ok(json!({
        "command": "optimize",
        "f": a.f,
        "eta": a.eta,
        "settings_deg": quad_json(&r.quad),
        "ch_max": r.ch_max,
        "reference_pinned": r.reference_pinned,
        "converged_restarts": r.converged_restarts,
        "optima": r.optima.iter().map(|(q, v)| json!({"settings_deg": quad_json(q), "ch": v})).collect::<Vec<_>>(),
    }))
}

/// Critical detection efficiency for a loophole-free CH violation.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ThresholdArgs {
    /// Amplitude ratio f (dimensionless, in (0, 1]).
    #[arg(long)]
    f: f64,
    /// Bisection tolerance on efficiency (probability units).
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Lower end of the efficiency bracket (probability).
    #[arg(long, default_value_t = 0.5)]
    eta_lower: f64,
    /// Grid points refined per angle search.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

pub fn threshold(a: ThresholdArgs) -> Result<Value, CliError> {
    let mut cfg = ThresholdConfig {
        tolerance: a.tolerance,
        eta_lower: a.eta_lower,
        ..Default::default()
    };
    cfg.search.restarts = a.restarts;
    let r = critical_efficiency(a.f, &cfg)?;
    Ok(json!({
        "command": "threshold",
        "f": a.f,
        "eta_crit": r.eta_crit,
        "bracket": [r.bracket.0, r.bracket.1],
        "witness_settings_deg": quad_json(&r.witness_quad),
        "witness_ch": r.witness_ch,
        "evaluations": r.evaluations,
    }))
}

/// Simulate the six CH runs described by a JSON config (schema chlab.run/v1).
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Run configuration file (JSON). Times in seconds, rates in 1/s, angles in degrees.
    #[arg(long)]
    config: PathBuf,
    /// Directory for per-run event CSVs (overrides output.events_dir).
    #[arg(long)]
    events_dir: Option<PathBuf>,
}

pub fn simulate(a: SimulateArgs, seed: Option<u64>) -> Result<Value, CliError> {
    let cfg = RunConfig::load(&a.config)?;
    let seed = seed.unwrap_or(cfg.seed);
    let quad = cfg.settings_deg.to_quad();
    let events_dir = a.events_dir.or(cfg.output.events_dir.clone());

    let (exp, logs) = if events_dir.is_some() {
        sim::run_ch_experiment_logged(&cfg.source, &cfg.detector, &quad, cfg.window_s, seed)?
    } else {
        (sim::run_ch_experiment(&cfg.source, &cfg.detector, &quad, cfg.window_s, seed)?, Vec::new())
    };

    if let Some(dir) = &events_dir {
        std::fs::create_dir_all(dir)?;
        for (k, log) in logs.iter().enumerate() {
            let stem = format!("run{}", k + 1);
            write_event_log(
                log,
                &dir.join(format!("{stem}.csv")),
                &dir.join(format!("{stem}.meta.json")),
            )
            .map_err(CliError::from)?;
        }
    }

    let runs: Vec<Value> = exp
        .runs
        .iter()
        .zip(CH_TERM_LABELS)
        .map(|(c, label)| {
            json!({
                "term": label,
                "setting1": setting_json(c.settings.0),
                "setting2": setting_json(c.settings.1),
                "n_coinc": c.n_coinc,
                "singles1": c.singles1,
                "singles2": c.singles2,
                "duration_s": c.duration,
            })
        })
        .collect();
    let mut doc = json!({
        "command": "simulate",
        "seed": seed,
        "source": to_value(&cfg.source)?,
        "detector": to_value(&cfg.detector)?,
        "window_s": cfg.window_s,
        "settings_deg": quad_json(&quad),
        "runs": runs,
    });
    doc.as_object_mut().unwrap().extend(counts_json(&exp.ch).as_object().unwrap().clone());

    if let Some(path) = &cfg.output.counts {
        let mut text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(doc)
}

/// Stochastic-optics singles-rate bound and the absorption time it implies.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SedArgs {
    /// Detection quantum efficiency, in (0, 1].
    #[arg(long)]
    eta: f64,
    /// Focal distance of the lens in front of the detectors, mm.
    #[arg(long)]
    focal_mm: f64,
    /// Radius of the active area of the non-linear medium, mm.
    #[arg(long)]
    radius_mm: f64,
    /// Coherence time of the incident photons, ps.
    #[arg(long)]
    coherence_ps: f64,
    /// Distance from non-linear medium to detectors, mm.
    #[arg(long)]
    distance_mm: f64,
    /// Mean detected wavelength, nm.
    #[arg(long)]
    wavelength_nm: f64,
    /// Active depth of the detector, µm.
    #[arg(long)]
    depth_um: f64,
    /// Photon absorption time T, ns; prints the threshold singles rate.
    #[arg(long)]
    absorption_ns: Option<f64>,
    /// Observed singles rate, counts/s; prints the implied T and the verdict.
    #[arg(long)]
    observed_rate: Option<f64>,
    /// Ceiling on a physical absorption time, ns.
    #[arg(long, default_value_t = 10.0)]
    t_max_ns: f64,
    /// No Bell violation was observed at this rate.
    #[arg(long)]
    no_violation: bool,
}

pub fn sed(a: SedArgs) -> Result<Value, CliError> {
    if a.absorption_ns.is_none() && a.observed_rate.is_none() {
        return Err(usage("give --absorption-ns and/or --observed-rate"));
    }
    let g = SedGeometry {
        eta: a.eta,
        focal_length: a.focal_mm / 1e3,
        crystal_radius: a.radius_mm / 1e3,
        coherence_time: a.coherence_ps / 1e12,
        distance: a.distance_mm / 1e3,
        wavelength: a.wavelength_nm / 1e9,
        detector_depth: a.depth_um / 1e6,
    };
    g.validate()?;
    let mut doc = json!({"command": "sed", "geometry_si": to_value(&g)?});
    let obj = doc.as_object_mut().unwrap();
    if let Some(t_ns) = a.absorption_ns {
        let rate = analysis::sed_rate_threshold(&SedParams { geometry: g, absorption_time: t_ns / 1e9 })?;
        obj.insert("absorption_time_s".into(), json!(t_ns / 1e9));
        obj.insert("threshold_rate_hz".into(), json!(rate));
    }
    if let Some(r) = a.observed_rate {
        let v = analysis::sed_verdict(&g, r, a.t_max_ns / 1e9, !a.no_violation)?;
        obj.insert("verdict".into(), to_value(&v)?);
    }
    Ok(doc)
}

/// Power-normalized bound on spontaneous up-conversion relative to down-conversion.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpucArgs {
    /// Upper limit on up-conversion counts.
    #[arg(long)]
    n_spuc: f64,
    /// Down-conversion counts (> 0).
    #[arg(long)]
    n_pdc: f64,
    /// Pump power for the up-conversion search, W.
    #[arg(long)]
    power_spuc_w: f64,
    /// Pump power for the down-conversion measurement, W.
    #[arg(long)]
    power_pdc_w: f64,
}

pub fn spuc(a: SpucArgs) -> Result<Value, CliError> {
    let b = analysis::spuc_bound(a.n_spuc, a.n_pdc, a.power_spuc_w, a.power_pdc_w)?;
    Ok(json!({
        "command": "spuc",
        "ratio": b.ratio,
        "suppression": b.suppression.is_finite().then_some(b.suppression),
        "infinite_suppression": b.suppression.is_infinite(),
    }))
}

/// Poisson tail probability of same-semiplane coincidences under a background-only hypothesis.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct DbbArgs {
    /// Observed same-semiplane coincidences (counts).
    #[arg(long)]
    observed: u64,
    /// Expected background coincidences over the same time (counts, >= 0).
    #[arg(long)]
    background: f64,
}

pub fn dbb(a: DbbArgs) -> Result<Value, CliError> {
    if !(a.background >= 0.0 && a.background.is_finite()) {
        return Err(usage(format!("--background must be finite and >= 0, got {}", a.background)));
    }
    let ln_p = analysis::dbb_semiplane_log_pvalue(a.observed, a.background);
    Ok(json!({
        "command": "dbb",
        "observed": a.observed,
        "background_mean": a.background,
        "p_value": ln_p.exp(),
        "log10_p_value": ln_p.is_finite().then_some(ln_p / std::f64::consts::LN_10),
    }))
}
