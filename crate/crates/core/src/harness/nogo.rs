//! Distinguisher built from a verifier and an honest prover.
//!
//! Given an IP for a many-vs-one task, the standalone algorithm D runs the
//! verifier against the unknown instance while simulating the honest prover
//! on the public accept instance. D accepts iff the simulated verifier
//! accepts with an output that identifies the accept instance.

use std::sync::Arc;

use serde::Serialize;

use super::batch::{trial_seed, Rate};
use super::channel::ChannelKind;
use super::oracle::Instance;
use super::session::{run_session, Protocol, SessionOptions};
use super::task::ManyVsOneTask;
use super::HarnessError;
use crate::rng::child_rng;

pub struct NogoDistinguisher<'a, P: Protocol, F> {
    protocol: &'a P,
    make_prover: F,
    accept_instance: Arc<Instance>,
    accepts: fn(&P::Output) -> bool,
    channel: ChannelKind,
}

/// One run of D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NogoRun {
    pub accept: bool,
    /// Queries D made to its own oracle.
    pub queries: u64,
    /// Queries the wrapped verifier made within the simulated interaction.
    pub verifier_queries: u64,
}

/// Both runs of D under one trial seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NogoTrial {
    pub seed: u64,
    pub on_accept: NogoRun,
    pub on_reject: NogoRun,
    /// D's meters equal the wrapped verifier's, and the verifier's in an
    /// ordinary session on the reject instance.
    pub meters_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NogoReport {
    pub task: String,
    pub trials: usize,
    pub accept_success: Rate,
    pub reject_success: Rate,
    /// D's query count equalled the wrapped verifier's in every run.
    pub meters_match: bool,
    pub runs: Vec<NogoTrial>,
}

pub fn build_nogo_distinguisher<'a, P, F>(
    protocol: &'a P,
    make_prover: F,
    task: &ManyVsOneTask,
    accepts: fn(&P::Output) -> bool,
    channel: ChannelKind,
) -> NogoDistinguisher<'a, P, F>
where
    P: Protocol,
    F: Fn() -> Box<P::Prover> + Sync,
{
    NogoDistinguisher {
        protocol,
        make_prover,
        accept_instance: Arc::clone(&task.accept_instance),
        accepts,
        channel,
    }
}

impl<P, F> NogoDistinguisher<'_, P, F>
where
    P: Protocol,
    F: Fn() -> Box<P::Prover> + Sync,
{
    /// Runs D on an unknown instance. The prover oracle holds the public
    /// accept instance, so D itself needs no prover access to `x`.
    pub fn run(&self, x: Arc<Instance>, seed: u64) -> Result<NogoRun, HarnessError> {
        let mut prover = (self.make_prover)();
        let res = run_session(
            self.protocol,
            &mut *prover,
            x,
            Arc::clone(&self.accept_instance),
            self.channel,
            SessionOptions {
                seed,
                record_transcript: false,
            },
        )?;
        let accept = res.verdict.output().is_some_and(|o| (self.accepts)(o));
        Ok(NogoRun {
            accept,
            queries: res.meter.verifier_queries,
            verifier_queries: res.meter.verifier_queries,
        })
    }

    /// Success rates on the accept instance and on reject-sampled instances.
    pub fn evaluate(&self, task: &ManyVsOneTask, trials: usize, seed: u64) -> Result<NogoReport, HarnessError>
    where
        P::Output: Sync,
    {
        use rayon::prelude::*;
        let runs: Vec<NogoTrial> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let s = trial_seed(seed, i);
                let on_accept = self.run(Arc::clone(&task.accept_instance), s)?;
                let x = Arc::new(task.sample_reject(&mut child_rng(s, 0)));
                let on_reject = self.run(Arc::clone(&x), s ^ 0x5eed)?;
                // Same verifier, ordinary session: prover shares the instance.
                let mut prover = (self.make_prover)();
                let plain = run_session(
                    self.protocol,
                    &mut *prover,
                    Arc::clone(&x),
                    x,
                    self.channel,
                    SessionOptions {
                        seed: s ^ 0x5eed,
                        record_transcript: false,
                    },
                )?;
                let identity = on_reject.queries == on_reject.verifier_queries
                    && on_accept.queries == on_accept.verifier_queries
                    && plain.meter.verifier_queries == on_reject.verifier_queries;
                Ok(NogoTrial {
                    seed: s,
                    on_accept,
                    on_reject,
                    meters_match: identity,
                })
            })
            .collect::<Result<_, HarnessError>>()?;
        let acc = runs.iter().filter(|r| r.on_accept.accept).count();
        let rej = runs.iter().filter(|r| !r.on_reject.accept).count();
        Ok(NogoReport {
            task: task.name.clone(),
            trials,
            accept_success: Rate::new(acc, trials),
            reject_success: Rate::new(rej, trials),
            meters_match: runs.iter().all(|r| r.meters_match),
            runs,
        })
    }
}
