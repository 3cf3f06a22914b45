//! The trivial IP for a learning task whose solutions can be checked: the
//! prover solves the task and the verifier runs the checker on its own
//! copies.

use crate::rng::SimRng;

use super::channel::{ChannelKind, Direction};
use super::oracle::CopyOracle;
use super::session::{Protocol, ProverStrategy, Session, Summary, Verdict};
use super::HarnessError;

/// A sampled decide-valid subroutine.
pub trait DecideValid: Sync {
    type Hypothesis: Clone + Send + Summary + 'static;

    fn name(&self) -> &'static str;

    /// Verifier copies consumed per decision.
    fn cost(&self) -> u64;

    /// Probability of a wrong decision on either side of the promise gap.
    fn failure_probability(&self) -> f64;

    fn encode(&self, h: &Self::Hypothesis) -> Vec<u8>;

    fn decide(&self, h: &Self::Hypothesis, oracle: &CopyOracle, rng: &mut SimRng) -> Result<bool, HarnessError>;
}

/// Prover side: produce a hypothesis from prover copies.
pub trait Solver<H>: ProverStrategy {
    fn solve(&mut self, oracle: &CopyOracle, rng: &mut SimRng) -> H;
}

pub struct TrivialIp<D> {
    pub decider: D,
}

pub fn trivial_validation_ip<D: DecideValid>(decider: D) -> TrivialIp<D> {
    TrivialIp { decider }
}

impl<D: DecideValid> Protocol for TrivialIp<D> {
    type Prover = dyn Solver<D::Hypothesis>;
    type Output = D::Hypothesis;

    fn name(&self) -> &'static str {
        "trivial"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Classical
    }

    fn execute(&self, s: &mut Session, prover: &mut Self::Prover) -> Result<Verdict<D::Hypothesis>, HarnessError> {
        let h = prover.solve(&s.prover, &mut s.p_rng);
        let bytes = self.decider.encode(&h);
        s.channel.send_structured(Direction::ProverToVerifier, "hypothesis", &bytes);
        s.channel.next_round();
        if self.decider.decide(&h, &s.verifier, &mut s.v_rng)? {
            Ok(Verdict::Accepted(h))
        } else {
            Ok(Verdict::Aborted("hypothesis failed validation".into()))
        }
    }
}
