//! Typed message channel with per-direction counters and a transcript.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::linalg::{CMatrix, DensityMatrix};

use super::oracle::Copy;
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "v->p")]
    VerifierToProver,
    #[serde(rename = "p->v")]
    ProverToVerifier,
}

/// Counters of everything sent in each direction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ChannelCounters {
    pub bits_v_to_p: u64,
    pub bits_p_to_v: u64,
    pub qudits_v_to_p: u64,
    pub qudits_p_to_v: u64,
    pub messages: u64,
}

impl ChannelCounters {
    pub fn classical_bits(&self) -> u64 {
        self.bits_v_to_p + self.bits_p_to_v
    }

    pub fn qudits(&self) -> u64 {
        self.qudits_v_to_p + self.qudits_p_to_v
    }
}

/// One transcript line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptRecord {
    pub round: u32,
    pub direction: Direction,
    pub payload_kind: String,
    /// Bits for classical payloads, qudits for quantum payloads.
    pub size: u64,
    pub digest: String,
}

/// A quantum register in flight. Holding a verifier copy keeps it live; the
/// channel releases it on send.
#[derive(Debug)]
pub enum Register {
    Copy(Copy),
    Prepared(DensityMatrix),
}

impl Register {
    fn into_state(self) -> DensityMatrix {
        match self {
            Register::Copy(c) => c.into_state(),
            Register::Prepared(rho) => rho,
        }
    }
}

#[derive(Debug)]
pub struct Channel {
    kind: ChannelKind,
    counters: ChannelCounters,
    transcript: Option<Vec<TranscriptRecord>>,
    round: u32,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Channel {
    pub fn new(kind: ChannelKind, record: bool) -> Self {
        Self {
            kind,
            counters: ChannelCounters::default(),
            transcript: record.then(Vec::new),
            round: 0,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn next_round(&mut self) {
        self.round += 1;
    }

    pub fn counters(&self) -> &ChannelCounters {
        &self.counters
    }

    pub(crate) fn take_transcript(&mut self) -> Option<Vec<TranscriptRecord>> {
        self.transcript.take()
    }

    fn record(&mut self, direction: Direction, payload_kind: &str, size: u64, dig: impl FnOnce() -> String) {
        self.counters.messages += 1;
        if let Some(t) = self.transcript.as_mut() {
            t.push(TranscriptRecord {
                round: self.round,
                direction,
                payload_kind: payload_kind.to_string(),
                size,
                digest: dig(),
            });
        }
    }

    /// Sends a structured classical payload serialized as `bytes`.
    pub fn send_structured(&mut self, direction: Direction, kind: &str, bytes: &[u8]) {
        let bits = 8 * bytes.len() as u64;
        match direction {
            Direction::VerifierToProver => self.counters.bits_v_to_p += bits,
            Direction::ProverToVerifier => self.counters.bits_p_to_v += bits,
        }
        self.record(direction, kind, bits, || digest(bytes));
    }

    /// Sends raw bits.
    pub fn send_bits(&mut self, direction: Direction, kind: &str, bits: &[bool]) {
        let n = bits.len() as u64;
        match direction {
            Direction::VerifierToProver => self.counters.bits_v_to_p += n,
            Direction::ProverToVerifier => self.counters.bits_p_to_v += n,
        }
        self.record(direction, kind, n, || digest(&bits.iter().map(|&b| b as u8).collect::<Vec<u8>>()));
    }

    /// Sends quantum registers and hands their states to the receiver.
    /// Fails on a classical channel.
    pub fn send_qudits(&mut self, direction: Direction, kind: &str, registers: Vec<Register>) -> Result<Vec<DensityMatrix>, HarnessError> {
        if self.kind == ChannelKind::Classical {
            return Err(HarnessError::ChannelViolation(format!("qudit message '{kind}' on a classical channel")));
        }
        let n = registers.len() as u64;
        let states: Vec<DensityMatrix> = registers.into_iter().map(Register::into_state).collect();
        let dim = states.first().map(|s| s.dim()).unwrap_or(0);
        match direction {
            Direction::VerifierToProver => self.counters.qudits_v_to_p += n,
            Direction::ProverToVerifier => self.counters.qudits_p_to_v += n,
        }
        let round = self.round;
        self.record(direction, kind, n, || digest(format!("{kind}:{dim}:{n}:{round}").as_bytes()));
        Ok(states)
    }
}

/// Canonical little-endian encodings for structured payloads.
pub mod wire {
    use super::CMatrix;

    pub fn f64s(values: &[f64]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn u64s(values: &[u64]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    /// Column-major real and imaginary parts.
    pub fn matrix(m: &CMatrix) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * m.len() + 16);
        out.extend((m.nrows() as u64).to_le_bytes());
        out.extend((m.ncols() as u64).to_le_bytes());
        for z in m.iter() {
            out.extend(z.re.to_le_bytes());
            out.extend(z.im.to_le_bytes());
        }
        out
    }
}
