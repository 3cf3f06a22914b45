//! Protocol infrastructure: oracles and meters, channels, sessions, batch
//! statistics, delegation, the distinguisher transformation and the trivial
//! validation IP.

mod batch;
mod channel;
mod delegation;
mod nogo;
mod oracle;
mod session;
mod task;
mod trivial;

pub use batch::{rates, run_batch, trial_seed, wilson_interval, Aggregate, BatchOptions, InstanceSource, Rate, RateRecord, Trial};
pub use channel::{wire, Channel, ChannelCounters, ChannelKind, Direction, Register, TranscriptRecord};
pub use delegation::{delegated_measure, Delegation};
pub use nogo::{build_nogo_distinguisher, NogoDistinguisher, NogoReport, NogoRun, NogoTrial};
pub use oracle::{Copy, CopyBatch, CopyOracle, Instance, Party, QueryMeter};
pub use session::{run_session, Honesty, Protocol, ProverStrategy, Session, SessionOptions, SessionRecord, SessionResult, Summary, Verdict};
pub use task::{distance, mixedness_task, purity_task, random_support, uniformity_task, InstanceKind, ManyVsOneTask};
pub use trivial::{trivial_validation_ip, DecideValid, Solver, TrivialIp};

/// How a protocol's estimation subroutines are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact values perturbed within the advertised accuracy; copies charged
    /// by the accounting formulas.
    #[default]
    Ideal,
    /// Genuine finite-shot estimators; copies charged as consumed.
    Sampled,
}

/// Failures of the harness itself, as opposed to protocol verdicts.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] crate::error::Error),

    #[error("channel violation: {0}")]
    ChannelViolation(String),

    #[error("memory policy violated: {live} live copies, limit {limit}")]
    MemoryPolicy { live: usize, limit: usize },

    #[error("malformed interaction: {0}")]
    Malformed(String),
}

impl HarnessError {
    /// Invariant violations (as opposed to malformed inputs).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, HarnessError::ChannelViolation(_) | HarnessError::MemoryPolicy { .. })
    }
}
