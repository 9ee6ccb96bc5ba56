//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p chlab-cli --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chlab_core::analysis::{
    dbb_semiplane_log_pvalue, dbb_semiplane_pvalue, sed_implied_t, sed_rate_threshold, sed_verdict,
    SedGeometry, SedParams, DEFAULT_T_MAX_S,
};
use chlab_core::lhv::{ch_deterministic, ch_mixture, DeterministicStrategy, LhvMixture};
use chlab_core::sim::{
    count_coincidences, run_ch_experiment, simulate_run, DetectorModel, SourceConfig, SourceModel,
};
use chlab_core::{
    ch_quantum, critical_efficiency, optimize_angles, EntangledState, OptimizeConfig,
    PolarizerSetting, SettingsQuad, ThresholdConfig,
};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- oracles

/// Projection of the state vector (|HH> + f|VV>)/norm onto analyzer kets,
/// summing over an orthonormal pair when a polarizer is absent.
fn projection_probability(f: f64, s1: Option<f64>, s2: Option<f64>) -> f64 {
    let norm2 = 1.0 + f * f;
    let psi = [1.0, 0.0, 0.0, f]; // HH, HV, VH, VV
    let kets = |s: Option<f64>| -> Vec<[f64; 2]> {
        match s {
            Some(t) => vec![[t.cos(), t.sin()]],
            None => vec![[1.0, 0.0], [0.0, 1.0]],
        }
    };
    let mut p = 0.0;
    for a in kets(s1) {
        for b in kets(s2) {
            let amp = a[0] * b[0] * psi[0] + a[0] * b[1] * psi[1] + a[1] * b[0] * psi[2] + a[1] * b[1] * psi[3];
            p += amp * amp / norm2;
        }
    }
    p
}

fn projection_ch(f: f64, q: [f64; 4]) -> f64 {
    let [a, ap, b, bp] = q;
    let p = |x, y| projection_probability(f, x, y);
    p(Some(a), Some(b)) - p(Some(a), Some(bp)) + p(Some(ap), Some(b)) + p(Some(ap), Some(bp))
        - p(Some(ap), None)
        - p(None, Some(b))
}

/// Minimum over a 4-D angle grid of singles/coincidence ratio B/A, i.e. the
/// smallest η with η·A − B > 0 among grid quads.
fn grid_eta_crit(f: f64, pitch_deg: f64) -> f64 {
    let n = (180.0 / pitch_deg).round() as usize;
    let angles: Vec<f64> = (0..n).map(|i| (i as f64 * pitch_deg).to_radians()).collect();
    let pc = |x: f64, y: f64| projection_probability(f, Some(x), Some(y));
    let pair: Vec<Vec<f64>> = angles.iter().map(|&x| angles.iter().map(|&y| pc(x, y)).collect()).collect();
    let single: Vec<f64> = angles.iter().map(|&x| projection_probability(f, Some(x), None)).collect();
    let mut best = f64::INFINITY;
    for a in 0..n {
        for ap in 0..n {
            for b in 0..n {
                for bp in 0..n {
                    let coinc = pair[a][b] - pair[a][bp] + pair[ap][b] + pair[ap][bp];
                    if coinc > 1e-12 {
                        best = best.min((single[ap] + single[b]) / coinc);
                    }
                }
            }
        }
    }
    best
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// exp(−μ) for integer μ as a truncated rational series; 120 terms keep the
/// error far below 1e-60 for μ ≤ 3.
fn exp_neg(mu: i64) -> BigRational {
    (0..120u32).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::from(-mu).pow(k), factorial(k))
    })
}

/// P(X ≥ k | μ) with exact rational arithmetic (upper sum truncated at
/// k + 150 terms, far past any double-precision contribution).
fn exact_tail(k: u32, mu: i64) -> BigRational {
    let pmf = |j: u32| BigRational::new(BigInt::from(mu).pow(j), factorial(j));
    let body = if (k as i64) > mu {
        (k..k + 150).fold(BigRational::zero(), |acc, j| acc + pmf(j))
    } else {
        let lower = (0..k).fold(BigRational::zero(), |acc, j| acc + pmf(j));
        return BigRational::one() - lower * exp_neg(mu);
    };
    body * exp_neg(mu)
}

fn rational_log10(x: &BigRational) -> f64 {
    // scale into double range before converting
    let digits = x.denom().to_string().len() as i32 - x.numer().to_string().len() as i32;
    let scaled = x * BigRational::from_integer(BigInt::from(10).pow(digits.max(0) as u32));
    scaled.to_f64().unwrap().log10() - f64::from(digits.max(0))
}

fn chlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chlab"))
}

// ---------------------------------------------------------------- criteria

const REFERENCE_CH: f64 = 0.107_296_761_992_708_98; // 40-digit closed form

fn c1_ch_at_reference_angles() -> Outcome {
    let q = SettingsQuad::reference_f04();
    let oracle = projection_ch(0.4, q.as_array());
    if (oracle - REFERENCE_CH).abs() > 1e-14 {
        return Err(format!("oracle {oracle} disagrees with frozen {REFERENCE_CH}"));
    }
    let value = ch_quantum(&EntangledState::new(0.4).unwrap(), &q, 1.0).map_err(|e| e.to_string())?.total;
    check(
        (value - oracle).abs() <= 5e-4 && (value - 0.1073).abs() <= 5e-4,
        format!("CH = {value:.10} (oracle {oracle:.10}, target 0.1073 ± 0.0005)"),
    )
}

/// Per-angle distance modulo π, minimized over the symmetry images
/// {identity, reflection θ→−θ, mirror relabeling, both}.
fn symmetric_distance(a: &SettingsQuad, b: &SettingsQuad) -> f64 {
    [*a, a.reflected(), a.mirrored(), a.mirrored().reflected()]
        .iter()
        .map(|x| x.distance(b))
        .fold(f64::INFINITY, f64::min)
}

fn c2_angle_optimization() -> Outcome {
    let r = optimize_angles(0.4, 1.0, &OptimizeConfig::default()).map_err(|e| e.to_string())?;
    let reference = SettingsQuad::reference_f04();
    let at_reference = ch_quantum(&EntangledState::new(0.4).unwrap(), &reference, 1.0).unwrap().total;
    let dist_deg = symmetric_distance(&r.quad, &reference).to_degrees();
    let [a, ap, b, bp] = r.quad.degrees();
    check(
        dist_deg <= 0.5 && r.ch_max >= at_reference,
        format!(
            "quad ({a:.3}°, {ap:.3}°, {b:.3}°, {bp:.3}°), max angle offset {dist_deg:.3}° (≤ 0.5°), ch_max {:.7} ≥ {:.7}",
            r.ch_max, at_reference
        ),
    )
}

fn c3_efficiency_thresholds() -> Outcome {
    let oracle = grid_eta_crit(1.0, 2.5);
    let analytic = 2.0 * (2f64.sqrt() - 1.0);
    if (oracle - analytic).abs() > 1e-9 {
        return Err(format!("grid oracle {oracle} misses 2(√2−1) = {analytic}"));
    }
    let cfg = ThresholdConfig::default();
    let fs = [1.0, 0.7, 0.4, 0.1, 0.01];
    let mut etas = Vec::new();
    for f in fs {
        etas.push(critical_efficiency(f, &cfg).map_err(|e| format!("f={f}: {e}"))?.eta_crit);
    }
    let decreasing = etas.windows(2).all(|w| w[1] < w[0]);
    let toward_two_thirds = etas.iter().all(|&e| e > 2.0 / 3.0 - 2.0 * cfg.tolerance)
        && etas[4] - 2.0 / 3.0 < 0.005;
    let ok = (etas[0] - oracle).abs() <= 0.005
        && (etas[0] - 0.8284).abs() <= 0.005
        && etas[4] < 0.70
        && decreasing
        && toward_two_thirds;
    let listing: Vec<String> = fs.iter().zip(&etas).map(|(f, e)| format!("f={f}:{e:.4}")).collect();
    check(
        ok,
        format!("grid oracle {oracle:.4}; {} (decreasing: {decreasing})", listing.join(" ")),
    )
}

fn c4_lhv_bound() -> Outcome {
    let values: Vec<i32> = DeterministicStrategy::all().map(|s| ch_deterministic(&s)).collect();
    let max = *values.iter().max().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100_000 {
        let mut w = [0.0; 16];
        // alternate dense Dirichlet(1) draws with sparse ones near the faces
        let support = if i % 2 == 0 { 16 } else { rng.random_range(1..=3) };
        for _ in 0..support {
            let k = if support == 16 { w.iter().position(|&x| x == 0.0).unwrap() } else { rng.random_range(0..16) };
            w[k] += <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng) + f64::MIN_POSITIVE;
        }
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= sum);
        let mix = LhvMixture::new(w).map_err(|e| e.to_string())?;
        worst = worst.max(ch_mixture(&mix));
    }
    check(
        max == 0 && worst <= 1e-12,
        format!("max over 16 strategies = {max}; max over 1e5 mixtures = {worst:e}"),
    )
}

fn c5_simulated_violation() -> Outcome {
    let det = DetectorModel::ideal();
    let quad = SettingsQuad::reference_f04();
    let window = 1e-8;
    let mut strong = 0;
    let mut totals = Vec::new();
    let mut sigmas = Vec::new();
    let source = SourceConfig { pair_rate: 1e4, duration: 1.0, model: SourceModel::Quantum { f: 0.4 } };
    for seed in 0..100 {
        let e = run_ch_experiment(&source, &det, &quad, window, seed).map_err(|e| e.to_string())?;
        if e.ch.total() > 0 && e.ch.significance > 5.0 {
            strong += 1;
        }
        totals.push(e.ch.total() as f64);
        sigmas.push(e.ch.sigma);
    }
    let n = totals.len() as f64;
    let mean = totals.iter().sum::<f64>() / n;
    let sd = (totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let sigma_mean = sigmas.iter().sum::<f64>() / n;
    // three standard errors of a sample sd from 100 draws: 3/sqrt(2·99)
    let sd_law = (sd / sigma_mean - 1.0).abs() <= 3.0 / (2.0 * 99f64).sqrt();

    let malus = SourceConfig { model: SourceModel::Malus, ..source };
    let mut lhv_ok = 0;
    for seed in 0..100 {
        let e = run_ch_experiment(&malus, &det, &quad, window, seed).map_err(|e| e.to_string())?;
        if (e.ch.total() as f64) <= 3.0 * e.ch.sigma {
            lhv_ok += 1;
        }
    }
    check(
        strong >= 95 && lhv_ok == 100 && sd_law,
        format!(
            "quantum >5σ in {strong}/100 (need ≥95), mean CH {mean:.0} (expected ≈{:.0}); empirical sd {sd:.1} vs sqrt(ΣN) {sigma_mean:.1}; Malus ≤ +3σ in {lhv_ok}/100",
            REFERENCE_CH * 1e4
        ),
    )
}

fn c6_accidentals() -> Outcome {
    let (rate, window) = (1e5, 2e-8);
    let source = SourceConfig { pair_rate: 1.0, duration: 1.0, model: SourceModel::Quantum { f: 0.4 } };
    let det = DetectorModel { eta1: 0.0, eta2: 0.0, dark1: rate, dark2: rate, jitter_sigma: 0.0 };
    let (mut observed, mut expected) = (0.0, 0.0);
    for seed in 0..100 {
        let log = simulate_run(&source, &det, PolarizerSetting::Absent, PolarizerSetting::Absent, seed)
            .map_err(|e| e.to_string())?;
        let c = count_coincidences(&log, window).map_err(|e| e.to_string())?;
        observed += c.n_coinc as f64;
        let s1 = c.singles1 as f64 / c.duration;
        let s2 = c.singles2 as f64 / c.duration;
        expected += chlab_core::sim::accidental_rate(s1, s2, window) * c.duration;
    }
    let sigma = expected.sqrt();
    check(
        (observed - expected).abs() <= 3.0 * sigma,
        format!("{observed} coincidences over 100 seeds vs S1·S2·window {expected:.1} ± {sigma:.1}"),
    )
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn random_sed(rng: &mut ChaCha8Rng) -> SedParams {
    SedParams {
        geometry: SedGeometry {
            eta: log_uniform(rng, 0.01, 1.0),
            focal_length: log_uniform(rng, 1e-3, 1.0),
            crystal_radius: log_uniform(rng, 1e-4, 1e-2),
            coherence_time: log_uniform(rng, 1e-14, 1e-9),
            distance: log_uniform(rng, 1e-2, 10.0),
            wavelength: log_uniform(rng, 2e-7, 2e-6),
            detector_depth: log_uniform(rng, 1e-7, 1e-3),
        },
        absorption_time: log_uniform(rng, 1e-12, 1e2),
    }
}

fn c7_sed_analysis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel = 0.0f64;
    let mut monotone_failures = Vec::new();
    let mut verdict_failures = 0;
    for _ in 0..1000 {
        let p = random_sed(&mut rng);
        let r = sed_rate_threshold(&p).map_err(|e| e.to_string())?;
        let t = sed_implied_t(&p.geometry, r).map_err(|e| e.to_string())?;
        worst_rel = worst_rel.max((t / p.absorption_time - 1.0).abs());

        // +1: threshold grows with the parameter, −1: shrinks
        let k = 1.0 + 9.0 * rng.random::<f64>();
        let bumps: [(&str, i32, SedParams); 8] = {
            let mut v = [p; 8];
            v[0].geometry.eta = (p.geometry.eta * k).min(1.0);
            v[1].geometry.focal_length *= k;
            v[2].geometry.crystal_radius *= k;
            v[3].geometry.detector_depth *= k;
            v[4].geometry.distance *= k;
            v[5].geometry.wavelength *= k;
            v[6].geometry.coherence_time *= k;
            v[7].absorption_time *= k;
            [
                ("eta", 1, v[0]), ("F", 1, v[1]), ("R_c", 1, v[2]), ("L", -1, v[3]),
                ("d", -1, v[4]), ("lambda", -1, v[5]), ("tau", -1, v[6]), ("T", -1, v[7]),
            ]
        };
        for (name, dir, q) in bumps {
            let rq = sed_rate_threshold(&q).map_err(|e| e.to_string())?;
            let changed = q != p;
            let ok = !changed || if dir > 0 { rq > r } else { rq < r };
            if !ok {
                monotone_failures.push(name);
            }
        }

        let observed = log_uniform(&mut rng, 1e-3, 1e12);
        let v = sed_verdict(&p.geometry, observed, DEFAULT_T_MAX_S, true).map_err(|e| e.to_string())?;
        let expect_falsified = v.implied_t_min > DEFAULT_T_MAX_S;
        if v.falsified != expect_falsified || v.consistent == expect_falsified {
            verdict_failures += 1;
        }
    }
    check(
        worst_rel <= 1e-12 && monotone_failures.is_empty() && verdict_failures == 0,
        format!(
            "round-trip worst rel err {worst_rel:e}; monotonicity failures {monotone_failures:?}; verdict failures {verdict_failures}"
        ),
    )
}

fn c8_dbb_significance() -> Outcome {
    let p78 = dbb_semiplane_pvalue(78, 1.0);
    let exact23 = exact_tail(2, 3).to_f64().unwrap();
    let p23 = dbb_semiplane_pvalue(2, 3.0);
    let exact78_log10 = rational_log10(&exact_tail(78, 1));
    let ours78_log10 = dbb_semiplane_log_pvalue(78, 1.0) / std::f64::consts::LN_10;
    check(
        p78 < 1e-50
            && p78 > 0.0
            && (p23 - exact23).abs() <= 1e-4
            && (p23 - 0.8009).abs() <= 1e-4
            && (ours78_log10 - exact78_log10).abs() <= 1e-9,
        format!(
            "P(X≥78|1) = {p78:e} (exact log10 {exact78_log10:.6}); P(X≥2|3) = {p23:.6} vs exact {exact23:.6}"
        ),
    )
}

fn c9_cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let reference = configs.join("f04_reference.json");
    let malus_body = std::fs::read_to_string(configs.join("malus_lhv.json")).unwrap().replace(
        "\"events_dir\": \"malus_events\"",
        &format!("\"events_dir\": {:?}", dir.path().join("ev").to_str().unwrap()),
    );
    let malus = dir.path().join("malus.json");
    std::fs::write(&malus, malus_body).unwrap();

    let invocations: Vec<Vec<String>> = vec![
        vec!["simulate".into(), "--config".into(), reference.display().to_string(), "--seed".into(), "5".into()],
        vec!["simulate".into(), "--config".into(), malus.display().to_string(), "--seed".into(), "6".into()],
        vec!["optimize".into(), "--f".into(), "0.4".into(), "--seed".into(), "1".into()],
        vec!["threshold".into(), "--f".into(), "0.4".into(), "--seed".into(), "1".into()],
        vec!["ch".into(), "--f".into(), "0.4".into(), "--seed".into(), "1".into()],
        vec!["predict".into(), "--f".into(), "0.4".into(), "--theta1".into(), "10".into(), "--absent2".into(), "--seed".into(), "1".into()],
        vec!["dbb".into(), "--observed".into(), "78".into(), "--background".into(), "1".into(), "--seed".into(), "1".into()],
    ];
    let mut mismatches = Vec::new();
    for args in &invocations {
        let mut outputs = Vec::new();
        for threads in [None, Some("1"), Some("4")] {
            let mut cmd = chlab();
            cmd.args(args);
            if let Some(n) = threads {
                cmd.args(["--threads", n]);
            }
            let out = cmd.output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
            }
            outputs.push(out.stdout);
        }
        let mut again = chlab();
        outputs.push(again.args(args).output().map_err(|e| e.to_string())?.stdout);
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(args[0].clone());
        }
    }
    check(
        mismatches.is_empty(),
        format!("{} seeded invocations × (2 runs, 1/4/default threads); mismatches {mismatches:?}", invocations.len()),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "CH at reference angles", Duration::from_secs(1), c1_ch_at_reference_angles),
        (2, "angle optimization", Duration::from_secs(10), c2_angle_optimization),
        (3, "efficiency thresholds", Duration::from_secs(120), c3_efficiency_thresholds),
        (4, "LHV bound", Duration::from_secs(5), c4_lhv_bound),
        (5, "simulated violation", Duration::from_secs(120), c5_simulated_violation),
        (6, "accidental coincidences", Duration::from_secs(30), c6_accidentals),
        (7, "SED analysis", Duration::from_secs(10), c7_sed_analysis),
        (8, "dBB significance", Duration::from_secs(1), c8_dbb_significance),
        (9, "determinism", Duration::from_secs(60), c9_cli_determinism),
    ];
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= budget, d),
            Err(d) => (false, d),
        };
        println!(
            "[{}] criterion {n} ({name}): {detail} [{:.2?} / budget {:?}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            budget
        );
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
