use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};

use super::{DetectorModel, EventLog, RunMetadata, SourceConfig};
use crate::error::{Error, Result};
use crate::state::{PairModel, PolarizerSetting};

const CONSISTENCY_TOL: f64 = 1e-12;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One acquisition at fixed settings, generator stream 0.
pub fn simulate_run(
    source: &SourceConfig,
    det: &DetectorModel,
    s1: PolarizerSetting,
    s2: PolarizerSetting,
    seed: u64,
) -> Result<EventLog> {
    simulate_run_stream(source, det, s1, s2, seed, 0)
}

pub fn simulate_run_stream(
    source: &SourceConfig,
    det: &DetectorModel,
    s1: PolarizerSetting,
    s2: PolarizerSetting,
    seed: u64,
    stream: u64,
) -> Result<EventLog> {
    simulate_with_model(&source.model, source, det, s1, s2, seed, stream)
}

/// Like [`simulate_run_stream`] but with pass probabilities from an
/// arbitrary `model`; `source.model` is only recorded in the metadata.
pub fn simulate_with_model(
    model: &dyn PairModel,
    source: &SourceConfig,
    det: &DetectorModel,
    s1: PolarizerSetting,
    s2: PolarizerSetting,
    seed: u64,
    stream: u64,
) -> Result<EventLog> {
    source.validate()?;
    det.validate()?;
    s1.validate()?;
    s2.validate()?;

    let probs = model.joint_pass(s1, s2);
    if !probs.is_consistent(CONSISTENCY_TOL) {
        return Err(Error::InconsistentProbabilities {
            q1: probs.q1,
            q2: probs.q2,
            q12: probs.q12,
        });
    }
    let [p_both, p_one, p_two, _] = probs.outcomes().map(|p| p.max(0.0));
    let cut_one = p_both + p_one;
    let cut_two = cut_one + p_two;

    let mut rng = rng_for(seed, stream);
    let duration = source.duration;
    let inter_arrival = Exp::new(source.pair_rate).expect("validated rate");
    let jitter = (det.jitter_sigma > 0.0)
        .then(|| Normal::new(0.0, det.jitter_sigma).expect("validated jitter"));

    let expected = (source.pair_rate * duration).min(1e8) as usize;
    let mut arm1 = Vec::with_capacity(expected / 2);
    let mut arm2 = Vec::with_capacity(expected / 2);
    let mut pairs = 0u64;
    let mut t = 0.0;
    loop {
        t += inter_arrival.sample(&mut rng);
        if t > duration {
            break;
        }
        pairs += 1;
        let u: f64 = rng.random();
        let (pass1, pass2) = if u < p_both {
            (true, true)
        } else if u < cut_one {
            (true, false)
        } else if u < cut_two {
            (false, true)
        } else {
            (false, false)
        };
        for (passed, eta, arm) in [(pass1, det.eta1, &mut arm1), (pass2, det.eta2, &mut arm2)] {
            if !passed || rng.random::<f64>() >= eta {
                continue;
            }
            let stamp = match &jitter {
                Some(n) => t + n.sample(&mut rng),
                None => t,
            };
            // smeared outside the acquisition gate
            if (0.0..=duration).contains(&stamp) {
                arm.push(stamp);
            }
        }
    }

    for (rate, arm) in [(det.dark1, &mut arm1), (det.dark2, &mut arm2)] {
        if rate > 0.0 {
            let n = Poisson::new(rate * duration).expect("validated dark rate").sample(&mut rng) as u64;
            arm.extend((0..n).map(|_| rng.random::<f64>() * duration));
        }
    }
    arm1.sort_by(f64::total_cmp);
    arm2.sort_by(f64::total_cmp);

    Ok(EventLog {
        arm1,
        arm2,
        meta: RunMetadata {
            seed,
            stream,
            settings: (s1, s2),
            source: *source,
            detector: *det,
            pairs_generated: pairs,
        },
    })
}
