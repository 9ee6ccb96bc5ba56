use super::{CoincidenceCounts, EventLog};
use crate::error::{invalid, Error, Result};

fn check_sorted(arm: u8, stamps: &[f64]) -> Result<()> {
    if let Some(i) = stamps.iter().position(|t| !t.is_finite()) {
        return Err(Error::MalformedLog(format!("arm {arm} timestamp {i} is not finite")));
    }
    match stamps.windows(2).position(|w| w[0] > w[1]) {
        Some(i) => Err(Error::UnsortedLog { arm, index: i + 1 }),
        None => Ok(()),
    }
}

/// Greedy earliest-first matching with single use: walk both streams in
/// time order; if the two earliest unmatched events are within `window/2`
/// they form a coincidence, otherwise the earlier one is discarded.
///
/// On a line with a symmetric window this greedy rule yields a maximum
/// matching, so widening the window never lowers the count.
pub fn count_coincidences(log: &EventLog, window: f64) -> Result<CoincidenceCounts> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(invalid("window", format!("must be finite and > 0, got {window}")));
    }
    check_sorted(1, &log.arm1)?;
    check_sorted(2, &log.arm2)?;

    let half = window / 2.0;
    let (a, b) = (&log.arm1, &log.arm2);
    let (mut i, mut j) = (0, 0);
    let mut n = 0u64;
    while i < a.len() && j < b.len() {
        let dt = b[j] - a[i];
        if dt.abs() <= half {
            n += 1;
            i += 1;
            j += 1;
        } else if dt > 0.0 {
            i += 1;
        } else {
            j += 1;
        }
    }

    Ok(CoincidenceCounts {
        n_coinc: n,
        singles1: a.len() as u64,
        singles2: b.len() as u64,
        window,
        duration: log.duration(),
        settings: log.meta.settings,
    })
}

/// Expected rate of accidental coincidences between two uncorrelated
/// streams: `S₁·S₂·window`. Inputs are nonnegative rates (1/s) and a
/// window in seconds.
pub fn accidental_rate(singles1_rate: f64, singles2_rate: f64, window: f64) -> f64 {
    singles1_rate * singles2_rate * window
}
