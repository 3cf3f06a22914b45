//! Repeated independent sessions and rate estimation.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::rng::{child_rng, derive_seed, SimRng};

use super::channel::ChannelKind;
use super::oracle::Instance;
use super::session::{run_session, Protocol, SessionOptions, SessionResult};
use super::HarnessError;

/// Where each trial's hidden instance comes from.
#[derive(Clone)]
pub enum InstanceSource {
    Fixed(Arc<Instance>),
    Sampled(Arc<dyn Fn(&mut SimRng) -> Instance + Send + Sync>),
}

impl InstanceSource {
    pub fn sampled(f: impl Fn(&mut SimRng) -> Instance + Send + Sync + 'static) -> Self {
        InstanceSource::Sampled(Arc::new(f))
    }

    pub fn fixed(instance: Instance) -> Self {
        InstanceSource::Fixed(Arc::new(instance))
    }

    pub fn draw(&self, rng: &mut SimRng) -> Arc<Instance> {
        match self {
            InstanceSource::Fixed(x) => Arc::clone(x),
            InstanceSource::Sampled(f) => Arc::new(f(rng)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BatchOptions {
    pub trials: usize,
    pub seed: u64,
    pub channel: ChannelKind,
    pub record_transcripts: bool,
}

impl BatchOptions {
    pub fn new(trials: usize, seed: u64, channel: ChannelKind) -> Self {
        Self {
            trials,
            seed,
            channel,
            record_transcripts: false,
        }
    }
}

pub struct Trial<O> {
    pub index: usize,
    pub instance: Arc<Instance>,
    pub result: SessionResult<O>,
}

/// Seed of trial `index` under batch seed `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// Runs `trials` independent sessions in parallel. Results are in trial
/// order and do not depend on the thread schedule. The first harness error
/// (memory or channel violation) fails the whole batch.
pub fn run_batch<P, F>(protocol: &P, make_prover: F, source: &InstanceSource, options: BatchOptions) -> Result<Vec<Trial<P::Output>>, HarnessError>
where
    P: Protocol,
    F: Fn() -> Box<P::Prover> + Sync,
{
    (0..options.trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(options.seed, index);
            let instance = source.draw(&mut child_rng(seed, 0));
            let mut prover = make_prover();
            let result = run_session(
                protocol,
                &mut *prover,
                Arc::clone(&instance),
                Arc::clone(&instance),
                options.channel,
                SessionOptions {
                    seed,
                    record_transcript: options.record_transcripts,
                },
            )?;
            Ok(Trial { index, instance, result })
        })
        .collect()
}

/// A proportion with its Wilson 95% score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub count: usize,
    pub trials: usize,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

impl Rate {
    pub fn new(count: usize, trials: usize) -> Self {
        let (lower, upper) = wilson_interval(count, trials);
        let rate = if trials == 0 { 0.0 } else { count as f64 / trials as f64 };
        Self {
            count,
            trials,
            rate,
            lower,
            upper,
        }
    }
}

/// Wilson score interval at 95%; `[0, 1]` for zero trials.
pub fn wilson_interval(count: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = count as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Outcome rates of a batch; the three rates sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRecord {
    pub trials: usize,
    pub accept_and_valid: Rate,
    pub accept_and_invalid: Rate,
    pub abort: Rate,
}

/// Classifies every trial with an exact judge that sees the hidden
/// instance. Only report and test code may call this.
pub fn rates<O>(trials: &[Trial<O>], judge: impl Fn(&Instance, &O) -> bool) -> RateRecord {
    let n = trials.len();
    let mut valid = 0;
    let mut invalid = 0;
    for t in trials {
        match t.result.verdict.output() {
            Some(o) if judge(&t.instance, o) => valid += 1,
            Some(_) => invalid += 1,
            None => {}
        }
    }
    RateRecord {
        trials: n,
        accept_and_valid: Rate::new(valid, n),
        accept_and_invalid: Rate::new(invalid, n),
        abort: Rate::new(n - valid - invalid, n),
    }
}

/// Min, mean and max of a per-trial quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut n = 0usize;
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        if n == 0 {
            return Self {
                min: 0.0,
                mean: 0.0,
                max: 0.0,
            };
        }
        Self {
            min,
            mean: sum / n as f64,
            max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wilson_single_trial_is_wide_and_finite() {
        let (lo, hi) = wilson_interval(1, 1);
        assert!(lo > 0.0 && lo < 0.5 && hi == 1.0);
        let (lo, hi) = wilson_interval(0, 1);
        assert!(lo == 0.0 && hi > 0.5 && hi < 1.0);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn wilson_reference_value() {
        // 8 of 10 at 95%: [0.4902, 0.9433].
        let (lo, hi) = wilson_interval(8, 10);
        assert!((lo - 0.4902).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn wilson_contains_estimate(n in 1usize..2000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as usize;
            let (lo, hi) = wilson_interval(k, n);
            let p = k as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
        }
    }
}
