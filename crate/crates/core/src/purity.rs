//! Black-box interactive proof for purity testing over a quantum channel.
//!
//! Each round the verifier sends `m` registers drawn from one of three
//! indistinguishable sources: maximally mixed copies (mixed test), copies of
//! a private random pure state (pure test), or masked copies of the unknown
//! state (compute). The prover answers "pure" or "maximally mixed". Any
//! failed test or inconsistent compute answers abort.

use rand::Rng;

use crate::error::{check_param, Error, Result};
use crate::harness::{ChannelKind, CopyOracle, Direction, HarnessError, Honesty, Protocol, ProverStrategy, Register, Session, Summary, Verdict};
use crate::linalg::{sample_haar_unitary, DensityMatrix, PureState, UnitaryOp};
use crate::measure::{qubits_of, sample_uniform_clifford, swap_accept_probability, swap_test, PauliLabel};
use crate::rng::SimRng;

/// How the per-round copy budget `m` depends on the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyRule {
    /// Smallest `m` valid for the given `d`.
    DimensionAware,
    /// The `d = 2` budget, valid for every `d ≥ 2`.
    DimensionFree,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PurityParams {
    pub delta: f64,
    pub d: usize,
    /// Round count `N`.
    pub rounds: usize,
    pub delta_tilde: f64,
    /// Copies per round `m`.
    pub copies: usize,
    pub rule: CopyRule,
}

impl PurityParams {
    pub fn swap_tests(&self) -> usize {
        self.copies / 2
    }
}

/// `N = ⌈max{72 ln(6/δ), 4 log₂(2/δ)}⌉`.
pub fn purity_rounds(delta: f64) -> usize {
    let a = 72.0 * (6.0 / delta).ln();
    let b = 4.0 * (2.0 / delta).log2();
    a.max(b).ceil() as usize
}

/// SWAP tests needed so that `t` passes on `𝟙/d` have probability `≤ eta`.
pub fn swap_tests_for(eta: f64, d: usize) -> usize {
    ((1.0 / eta).ln() / (2.0 / (1.0 + 1.0 / d as f64)).ln()).ceil() as usize
}

pub fn purity_params(delta: f64, d: usize) -> Result<PurityParams> {
    purity_params_with(delta, d, CopyRule::DimensionAware)
}

pub fn purity_params_with(delta: f64, d: usize, rule: CopyRule) -> Result<PurityParams> {
    check_param("delta", delta, delta > 0.0 && delta < 1.0, "0 < delta < 1")?;
    if d < 2 {
        return Err(Error::Parameter {
            name: "d",
            value: d as f64,
            expected: "d >= 2",
        });
    }
    let rounds = purity_rounds(delta);
    let delta_tilde = delta / (2.0 * rounds as f64);
    let budget_d = match rule {
        CopyRule::DimensionAware => d,
        CopyRule::DimensionFree => 2,
    };
    let copies = 2 * swap_tests_for(delta_tilde, budget_d);
    Ok(PurityParams {
        delta,
        d,
        rounds,
        delta_tilde,
        copies,
        rule,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum RoundKind {
    MixedTest,
    PureTest,
    Compute,
}

impl RoundKind {
    fn from_index(i: u32) -> Self {
        match i {
            0 => RoundKind::MixedTest,
            1 => RoundKind::PureTest,
            _ => RoundKind::Compute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskEnsemble {
    Haar,
    Clifford,
    /// Fresh uniform Pauli per SWAP pair; the honest prover needs only two
    /// registers.
    Pauli,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mask {
    Unitary(UnitaryOp),
    PerPair(Vec<PauliLabel>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub kind: RoundKind,
    pub mask: Option<Mask>,
    /// `true` for "pure".
    pub answer: bool,
    /// Set for test rounds.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum PurityAnswer {
    Pure,
    MaximallyMixed,
}

impl PurityAnswer {
    pub fn from_bit(pure: bool) -> Self {
        if pure {
            PurityAnswer::Pure
        } else {
            PurityAnswer::MaximallyMixed
        }
    }
}

impl Summary for PurityAnswer {
    fn summary(&self) -> String {
        match self {
            PurityAnswer::Pure => "pure".into(),
            PurityAnswer::MaximallyMixed => "maximally mixed".into(),
        }
    }
}

fn random_pauli(n: usize, rng: &mut SimRng) -> PauliLabel {
    PauliLabel::from_index(n, rng.random_range(0..1usize << (2 * n)))
}

fn draw_unitary(ensemble: MaskEnsemble, d: usize, rng: &mut SimRng) -> Result<UnitaryOp> {
    match ensemble {
        MaskEnsemble::Clifford => sample_uniform_clifford(qubits_of(d)?, rng),
        _ => Ok(sample_haar_unitary(d, rng)),
    }
}

fn conjugate_by_pauli(rho: &DensityMatrix, p: PauliLabel) -> DensityMatrix {
    let w = p.matrix();
    DensityMatrix::from_trusted(&w * rho.matrix() * &w)
}

/// Produces the `m` registers of one round, handing each to `emit` before
/// the next is prepared so that at most one unknown copy is live.
pub fn prepare_round_state(
    kind: RoundKind,
    oracle: &CopyOracle,
    params: &PurityParams,
    ensemble: MaskEnsemble,
    rng: &mut SimRng,
    emit: &mut dyn FnMut(Register) -> std::result::Result<(), HarnessError>,
) -> std::result::Result<Option<Mask>, HarnessError> {
    let d = params.d;
    let m = params.copies;
    if kind == RoundKind::MixedTest {
        let mixed = DensityMatrix::maximally_mixed(d);
        for _ in 0..m {
            emit(Register::Prepared(mixed.clone()))?;
        }
        return Ok(None);
    }
    let (mask, per_copy): (Mask, Vec<CopyMask>) = match ensemble {
        MaskEnsemble::Pauli => {
            let n = qubits_of(d)?;
            let paulis: Vec<PauliLabel> = (0..m / 2).map(|_| random_pauli(n, rng)).collect();
            let per = (0..m).map(|j| CopyMask::Pauli(paulis[j / 2])).collect();
            (Mask::PerPair(paulis), per)
        }
        _ => {
            let u = draw_unitary(ensemble, d, rng)?;
            (Mask::Unitary(u.clone()), vec![CopyMask::Unitary(u); m])
        }
    };
    match kind {
        RoundKind::PureTest => {
            // Unitary masks act on |0⟩; per-pair Pauli masks act on a private
            // Haar-random pure state.
            let base = match &mask {
                Mask::Unitary(_) => PureState::basis(d, 0).to_density(),
                Mask::PerPair(_) => crate::linalg::sample_haar_state(d, rng).to_density(),
            };
            for t in &per_copy {
                emit(Register::Prepared(t.apply(&base)))?;
            }
        }
        RoundKind::Compute => {
            for t in &per_copy {
                let copy = oracle.query("compute")?;
                emit(Register::Copy(copy.transform(|rho| t.apply(rho))))?;
            }
        }
        RoundKind::MixedTest => unreachable!(),
    }
    Ok(Some(mask))
}

#[derive(Debug, Clone)]
enum CopyMask {
    Unitary(UnitaryOp),
    Pauli(PauliLabel),
}

impl CopyMask {
    fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        match self {
            CopyMask::Unitary(u) => rho.conjugate(u),
            CopyMask::Pauli(p) => conjugate_by_pauli(rho, *p),
        }
    }
}

/// Honest answer from `m` received registers: pairwise SWAP tests, "pure"
/// iff every test accepts.
pub fn honest_purity_answer(copies: &[DensityMatrix], rng: &mut SimRng) -> Result<bool> {
    if copies.len() % 2 == 1 {
        return Err(Error::Parameter {
            name: "m",
            value: copies.len() as f64,
            expected: "an even number of copies",
        });
    }
    for pair in copies.chunks_exact(2) {
        if !swap_test(&pair[0], &pair[1], rng)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Final decision from the round records.
pub fn purity_verdict(records: &[RoundRecord]) -> Verdict<PurityAnswer> {
    if records.iter().any(|r| r.passed == Some(false)) {
        return Verdict::Aborted("failed test round".into());
    }
    let mut compute = records.iter().filter(|r| r.kind == RoundKind::Compute).map(|r| r.answer);
    let first = match compute.next() {
        Some(b) => b,
        None => return Verdict::Aborted("no compute round".into()),
    };
    if compute.any(|b| b != first) {
        return Verdict::Aborted("inconsistent compute answers".into());
    }
    Verdict::Accepted(PurityAnswer::from_bit(first))
}

/// Prover side of the purity IP.
pub trait PurityProver: ProverStrategy + Send {
    /// Called once before the first round.
    fn prepare(&mut self, _oracle: &CopyOracle, _rng: &mut SimRng) {}

    /// Answers one round; `true` means "pure".
    fn answer(&mut self, states: &[DensityMatrix], rng: &mut SimRng) -> bool;
}

pub struct PurityIp {
    pub params: PurityParams,
    pub ensemble: MaskEnsemble,
}

impl PurityIp {
    pub fn new(params: PurityParams, ensemble: MaskEnsemble) -> Result<Self> {
        if ensemble != MaskEnsemble::Haar {
            qubits_of(params.d)?;
        }
        Ok(Self { params, ensemble })
    }
}

/// Stream used for round kinds; distinct from the mask stream so the kind
/// sequence is the same for every dimension.
const KIND_STREAM: u64 = 0;

impl Protocol for PurityIp {
    type Prover = dyn PurityProver;
    type Output = PurityAnswer;

    fn name(&self) -> &'static str {
        "purity"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Quantum
    }

    fn execute(&self, s: &mut Session, prover: &mut Self::Prover) -> std::result::Result<Verdict<PurityAnswer>, HarnessError> {
        let mut kinds = s.stream(KIND_STREAM);
        prover.prepare(&s.prover, &mut s.p_rng);
        let mut records = Vec::with_capacity(self.params.rounds);
        for _ in 0..self.params.rounds {
            s.channel.next_round();
            let kind = RoundKind::from_index(kinds.random_range(0..3));
            let mut received = Vec::with_capacity(self.params.copies);
            let channel = &mut s.channel;
            let mask = prepare_round_state(kind, &s.verifier, &self.params, self.ensemble, &mut s.v_rng, &mut |reg| {
                received.extend(channel.send_qudits(Direction::VerifierToProver, "register", vec![reg])?);
                Ok(())
            })?;
            let answer = prover.answer(&received, &mut s.p_rng);
            s.channel.send_bits(Direction::ProverToVerifier, "answer", &[answer]);
            let passed = match kind {
                RoundKind::MixedTest => Some(!answer),
                RoundKind::PureTest => Some(answer),
                RoundKind::Compute => None,
            };
            records.push(RoundRecord { kind, mask, answer, passed });
        }
        let count = |k: RoundKind| records.iter().filter(|r| r.kind == k).count() as f64;
        s.stat("rounds_mixed_test", count(RoundKind::MixedTest));
        s.stat("rounds_pure_test", count(RoundKind::PureTest));
        s.stat("rounds_compute", count(RoundKind::Compute));
        Ok(purity_verdict(&records))
    }
}

/// Ground truth for the judge.
pub fn is_pure(rho: &DensityMatrix) -> bool {
    crate::linalg::purity(rho) > 1.0 - 1e-9
}

// ---------------------------------------------------------------------------
// Provers
// ---------------------------------------------------------------------------

pub struct HonestPurityProver;

impl ProverStrategy for HonestPurityProver {
    fn name(&self) -> String {
        "honest".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Honest
    }
}

impl PurityProver for HonestPurityProver {
    fn answer(&mut self, states: &[DensityMatrix], rng: &mut SimRng) -> bool {
        honest_purity_answer(states, rng).unwrap_or(false)
    }
}

pub struct AlwaysPure;

impl ProverStrategy for AlwaysPure {
    fn name(&self) -> String {
        "always_pure".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("answers pure every round".into())
    }
}

impl PurityProver for AlwaysPure {
    fn answer(&mut self, _: &[DensityMatrix], _: &mut SimRng) -> bool {
        true
    }
}

pub struct AlwaysMixed;

impl ProverStrategy for AlwaysMixed {
    fn name(&self) -> String {
        "always_mixed".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("answers maximally mixed every round".into())
    }
}

impl PurityProver for AlwaysMixed {
    fn answer(&mut self, _: &[DensityMatrix], _: &mut SimRng) -> bool {
        false
    }
}

pub struct UniformRandomAnswer;

impl ProverStrategy for UniformRandomAnswer {
    fn name(&self) -> String {
        "uniform_random".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("answers with a fair coin".into())
    }
}

impl PurityProver for UniformRandomAnswer {
    fn answer(&mut self, _: &[DensityMatrix], rng: &mut SimRng) -> bool {
        rng.random()
    }
}

/// Learns the SWAP acceptance rate of the hidden state from its own oracle,
/// then inverts the honest answer on every round whose SWAP statistics are
/// at least as likely under the compute-round model as under the nearest
/// test-round model.
pub struct BestEffortLiar {
    /// SWAP pairs spent on the prover's own copies.
    pub calibration_pairs: u64,
    compute_accept: f64,
}

impl BestEffortLiar {
    pub fn new(calibration_pairs: u64) -> Self {
        Self {
            calibration_pairs,
            compute_accept: 1.0,
        }
    }
}

impl Default for BestEffortLiar {
    fn default() -> Self {
        Self::new(64)
    }
}

impl ProverStrategy for BestEffortLiar {
    fn name(&self) -> String {
        "best_effort_liar".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("inverts answers on rounds that look like compute rounds".into())
    }
}

fn log_likelihood(accepts: usize, tests: usize, p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    accepts as f64 * p.ln() + (tests - accepts) as f64 * (1.0 - p).ln()
}

impl PurityProver for BestEffortLiar {
    fn prepare(&mut self, oracle: &CopyOracle, rng: &mut SimRng) {
        let batch = match oracle.query_batch("calibration", 2 * self.calibration_pairs) {
            Ok(b) => b,
            Err(_) => return,
        };
        let p = swap_accept_probability(batch.state(), batch.state()).unwrap_or(1.0);
        let accepts = (0..self.calibration_pairs).filter(|_| crate::measure::bernoulli(p, rng)).count();
        self.compute_accept = accepts as f64 / self.calibration_pairs.max(1) as f64;
    }

    fn answer(&mut self, states: &[DensityMatrix], rng: &mut SimRng) -> bool {
        let d = states.first().map(|s| s.dim()).unwrap_or(2);
        let mut accepts = 0;
        let tests = states.len() / 2;
        for pair in states.chunks_exact(2) {
            if swap_test(&pair[0], &pair[1], rng).unwrap_or(false) {
                accepts += 1;
            }
        }
        let honest = accepts == tests;
        let mixed_p = (1.0 + 1.0 / d as f64) / 2.0;
        let ll_compute = log_likelihood(accepts, tests, self.compute_accept);
        let ll_test = log_likelihood(accepts, tests, 1.0).max(log_likelihood(accepts, tests, mixed_p));
        if ll_compute >= ll_test {
            !honest
        } else {
            honest
        }
    }
}

/// Built-in prover by name.
pub fn purity_prover(name: &str) -> Option<Box<dyn PurityProver>> {
    Some(match name {
        "honest" => Box::new(HonestPurityProver),
        "always_pure" => Box::new(AlwaysPure),
        "always_mixed" => Box::new(AlwaysMixed),
        "uniform_random" => Box::new(UniformRandomAnswer),
        "best_effort_liar" => Box::new(BestEffortLiar::default()),
        _ => return None,
    })
}

pub const PURITY_ADVERSARIES: [&str; 4] = ["always_pure", "always_mixed", "uniform_random", "best_effort_liar"];
