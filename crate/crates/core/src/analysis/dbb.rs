//! In Bohmian mechanics two identical bosons from a symmetric double slit
//! never cross the symmetry axis, so same-semiplane coincidences should be
//! background only. The test statistic is the Poisson upper tail
//! `P(X ≥ observed | μ = background_mean)`.

use statrs::function::gamma::ln_gamma;

/// Relative size of the last term kept in the tail series.
const SERIES_CUTOFF: f64 = 1e-16;

fn ln_pmf(k: u64, mu: f64) -> f64 {
    k as f64 * mu.ln() - mu - ln_gamma(k as f64 + 1.0)
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Natural log of `P(X ≥ observed)` for `X ~ Poisson(background_mean)`.
///
/// Far in the upper tail the sum runs upward from `observed` with each term
/// taken relative to the first; otherwise it is `1 − P(X < observed)`.
pub fn dbb_semiplane_log_pvalue(observed: u64, background_mean: f64) -> f64 {
    assert!(
        background_mean >= 0.0 && background_mean.is_finite(),
        "background mean must be finite and >= 0, got {background_mean}"
    );
    if observed == 0 {
        return 0.0;
    }
    let mu = background_mean;
    if mu == 0.0 {
        return f64::NEG_INFINITY;
    }
    if observed as f64 > mu {
        let mut rel = 1.0;
        let mut sum = 1.0;
        let mut j = observed;
        loop {
            j += 1;
            rel *= mu / j as f64;
            sum += rel;
            if rel < SERIES_CUTOFF * sum {
                break;
            }
        }
        ln_pmf(observed, mu) + sum.ln()
    } else {
        let lower = log_sum_exp((0..observed).map(|k| ln_pmf(k, mu))).exp();
        (1.0 - lower).max(0.0).ln()
    }
}

pub fn dbb_semiplane_pvalue(observed: u64, background_mean: f64) -> f64 {
    dbb_semiplane_log_pvalue(observed, background_mean).exp()
}
