//! Session execution.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::rng::{child_rng, derive_seed, SimRng};

use super::channel::{Channel, ChannelCounters, ChannelKind, TranscriptRecord};
use super::oracle::{CopyOracle, Instance, Ledger, Party, QueryMeter};
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "description")]
pub enum Honesty {
    Honest,
    Adversarial(String),
}

/// Common identity of every prover strategy. Strategies see the hidden
/// instance only through their own oracle and received messages.
pub trait ProverStrategy {
    fn name(&self) -> String;
    fn honesty(&self) -> Honesty;
}

/// A protocol output that can be summarized on one line.
pub trait Summary {
    fn summary(&self) -> String;
}

impl Summary for String {
    fn summary(&self) -> String {
        self.clone()
    }
}

impl Summary for bool {
    fn summary(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<O> {
    Accepted(O),
    Aborted(String),
}

impl<O> Verdict<O> {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }

    pub fn output(&self) -> Option<&O> {
        match self {
            Verdict::Accepted(o) => Some(o),
            Verdict::Aborted(_) => None,
        }
    }
}

impl<O: Summary> Verdict<O> {
    pub fn label(&self) -> String {
        match self {
            Verdict::Accepted(o) => format!("accepted({})", o.summary()),
            Verdict::Aborted(reason) => format!("aborted({reason})"),
        }
    }
}

/// A verifier role together with the shape of its interaction.
pub trait Protocol: Sync {
    type Prover: ProverStrategy + ?Sized;
    type Output: Clone + Send + Summary;

    fn name(&self) -> &'static str;

    fn channel_kind(&self) -> ChannelKind;

    /// Maximum number of unknown-state copies the verifier may hold at once;
    /// `None` for an unconstrained verifier.
    fn memory_limit(&self) -> Option<usize> {
        Some(1)
    }

    /// Runs every round in order. Harness errors are hard failures, not
    /// verdicts.
    fn execute(&self, session: &mut Session, prover: &mut Self::Prover) -> Result<Verdict<Self::Output>, HarnessError>;
}

/// Everything a running session owns.
pub struct Session {
    pub verifier: CopyOracle,
    pub prover: CopyOracle,
    pub channel: Channel,
    /// Verifier coins.
    pub v_rng: SimRng,
    /// Prover coins, independent of the verifier's.
    pub p_rng: SimRng,
    seed: u64,
    stats: BTreeMap<String, f64>,
    attachments: BTreeMap<String, Vec<u64>>,
    ledger: std::rc::Rc<Ledger>,
}

impl Session {
    /// An extra verifier-side stream, independent of `v_rng`.
    pub fn stream(&self, tag: u64) -> SimRng {
        child_rng(self.seed, 16 + tag)
    }

    /// Records a protocol-specific number for the report.
    pub fn stat(&mut self, key: &str, value: f64) {
        self.stats.insert(key.to_string(), value);
    }

    /// Records protocol-specific raw values for the report, replacing any
    /// earlier values under `key`.
    pub fn attach(&mut self, key: &str, values: Vec<u64>) {
        self.attachments.insert(key.to_string(), values);
    }

    pub fn meter(&self) -> QueryMeter {
        self.ledger.meter()
    }

    pub fn live_copies(&self) -> usize {
        self.ledger.live()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SessionOptions {
    pub seed: u64,
    pub record_transcript: bool,
}

#[derive(Debug, Clone)]
pub struct SessionResult<O> {
    pub verdict: Verdict<O>,
    pub meter: QueryMeter,
    pub channel: ChannelCounters,
    pub peak_live_copies: usize,
    pub stats: BTreeMap<String, f64>,
    pub attachments: BTreeMap<String, Vec<u64>>,
    pub transcript: Option<Vec<TranscriptRecord>>,
    pub seed: u64,
    pub prover: String,
    pub wall_time: Duration,
}

/// Serializable view of a session, excluding wall time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionRecord {
    pub seed: u64,
    pub prover: String,
    pub verdict: String,
    pub meter: QueryMeter,
    pub channel: ChannelCounters,
    pub peak_live_copies: usize,
    pub stats: BTreeMap<String, f64>,
    pub attachments: BTreeMap<String, Vec<u64>>,
}

impl<O: Summary> SessionResult<O> {
    pub fn record(&self) -> SessionRecord {
        SessionRecord {
            seed: self.seed,
            prover: self.prover.clone(),
            verdict: self.verdict.label(),
            meter: self.meter.clone(),
            channel: self.channel.clone(),
            peak_live_copies: self.peak_live_copies,
            stats: self.stats.clone(),
            attachments: self.attachments.clone(),
        }
    }
}

/// Runs one interaction. The verifier queries `verifier_instance` and the
/// prover queries `prover_instance` (normally the same instance).
pub fn run_session<P: Protocol>(
    protocol: &P,
    prover: &mut P::Prover,
    verifier_instance: Arc<Instance>,
    prover_instance: Arc<Instance>,
    channel_kind: ChannelKind,
    options: SessionOptions,
) -> Result<SessionResult<P::Output>, HarnessError> {
    if protocol.channel_kind() == ChannelKind::Quantum && channel_kind == ChannelKind::Classical {
        return Err(HarnessError::ChannelViolation(format!(
            "protocol '{}' needs a quantum channel",
            protocol.name()
        )));
    }
    let start = Instant::now();
    let ledger = Ledger::new(protocol.memory_limit());
    let mut session = Session {
        verifier: CopyOracle::new(Party::Verifier, verifier_instance, ledger.clone()),
        prover: CopyOracle::new(Party::Prover, prover_instance, ledger.clone()),
        channel: Channel::new(channel_kind, options.record_transcript),
        v_rng: child_rng(options.seed, 1),
        p_rng: child_rng(options.seed, 2),
        seed: derive_seed(options.seed, 3),
        stats: BTreeMap::new(),
        attachments: BTreeMap::new(),
        ledger: ledger.clone(),
    };
    let verdict = protocol.execute(&mut session, prover)?;
    if let Some(limit) = protocol.memory_limit() {
        if ledger.peak() > limit {
            return Err(HarnessError::MemoryPolicy { live: ledger.peak(), limit });
        }
    }
    let transcript = session.channel.take_transcript();
    Ok(SessionResult {
        verdict,
        meter: ledger.meter(),
        channel: session.channel.counters().clone(),
        peak_live_copies: ledger.peak(),
        stats: std::mem::take(&mut session.stats),
        attachments: std::mem::take(&mut session.attachments),
        transcript,
        seed: options.seed,
        prover: prover.name(),
        wall_time: start.elapsed(),
    })
}
