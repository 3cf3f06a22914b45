//! Interactive agnostic stabilizer-state learning.
//!
//! The prover sends generators of a stabilizer state `|S⟩`. The verifier
//! estimates the loss `ℓ = 1 - |⟨S|ψ⟩|²` with single-copy projective
//! measurements and the sixth Pauli moment `A₃` through delegated Bell
//! sampling. Since `A₃^{1/6} ≥ F_Stab ≥ (4/3)A₃ - 1/3`, the certificate
//! `(4/3)(1 - A₃)` upper-bounds the optimal loss within a factor of 8, so
//! accepting `ℓ̂ ≤ û + 3ε/5` yields an 8-agnostic guarantee.

mod enumerate;

pub use enumerate::{enumerate_stabilizers, stabilizer_count, MAX_ENUMERATION_QUBITS};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{check_param, Error, Result};
use crate::harness::{
    delegated_measure, wire, ChannelKind, CopyOracle, DecideValid, Delegation, Direction, HarnessError, Honesty, Mode, Protocol, ProverStrategy,
    Session, Solver, Summary, Verdict,
};
use crate::linalg::{fidelity_pure, sample_haar_state, CVector, DensityMatrix, PureState, C64};
use crate::measure::{ideal_estimate, pauli_expectations, qubits_of, BellSampler, PauliLabel, SignedPauli};
use crate::rng::SimRng;

/// Largest qubit count for the exact `A₃` sum.
pub const MAX_A3_QUBITS: usize = 6;

/// Copies consumed by one primitive `A₃` sample: four for the
/// Bell-difference label, two for the Pauli moment.
pub const COPIES_PER_PRIMITIVE: u64 = 6;

/// Generator commutation and independence are exact; the dense rendering is
/// checked to this tolerance.
const RENDER_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Stabilizer states
// ---------------------------------------------------------------------------

/// A pure stabilizer state given by `n` commuting, independent signed
/// Pauli generators, together with its dense rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerStateDesc {
    n: usize,
    generators: Vec<SignedPauli>,
    dense: PureState,
}

impl StabilizerStateDesc {
    /// Validates the generators and renders the unique common `+1`
    /// eigenstate, with phase fixed so its largest amplitude is real and
    /// positive.
    pub fn from_generators(n: usize, generators: Vec<SignedPauli>) -> Result<Self> {
        if n == 0 || n > MAX_A3_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        if generators.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: generators.len(),
            });
        }
        for g in &generators {
            if g.label.qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.label.qubits(),
                });
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if a.label.anticommutes(&b.label) {
                    return Err(Error::Parameter {
                        name: "generators",
                        value: i as f64,
                        expected: "pairwise commuting",
                    });
                }
            }
        }
        if symplectic_rank(generators.iter().map(|g| symplectic_bits(&g.label))) != n {
            return Err(Error::Parameter {
                name: "generators",
                value: n as f64,
                expected: "independent",
            });
        }
        let dense = render(n, &generators)?;
        Ok(Self { n, generators, dense })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[SignedPauli] {
        &self.generators
    }

    pub fn dense(&self) -> &PureState {
        &self.dense
    }

    /// Rows `(x₁…xₙ | z₁…zₙ | sign)`.
    pub fn tableau(&self) -> Vec<Vec<u8>> {
        self.generators
            .iter()
            .map(|g| {
                let mut row = Vec::with_capacity(2 * self.n + 1);
                row.extend((0..self.n).map(|q| ((g.label.x_bits() >> q) & 1) as u8));
                row.extend((0..self.n).map(|q| ((g.label.z_bits() >> q) & 1) as u8));
                row.push(u8::from(g.negative));
                row
            })
            .collect()
    }

    pub fn from_tableau(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut generators = Vec::with_capacity(n);
        for row in rows {
            if row.len() != 2 * n + 1 || row.iter().any(|&b| b > 1) {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n + 1,
                    got: row.len(),
                });
            }
            let bits = |range: std::ops::Range<usize>| range.enumerate().fold(0u32, |acc, (q, i)| acc | (u32::from(row[i]) << q));
            let label = PauliLabel::new(n, bits(0..n), bits(n..2 * n))?;
            generators.push(SignedPauli {
                label,
                negative: row[2 * n] == 1,
            });
        }
        Self::from_generators(n, generators)
    }

    /// `|⟨S|ψ⟩|²`.
    pub fn fidelity(&self, psi: &PureState) -> f64 {
        self.dense.inner(psi).norm_sqr()
    }

    /// `⟨S|ρ|S⟩`.
    pub fn fidelity_with(&self, rho: &DensityMatrix) -> Result<f64> {
        fidelity_pure(&self.dense, rho)
    }

    fn encode(&self) -> Vec<u8> {
        self.tableau().concat()
    }
}

impl Summary for StabilizerStateDesc {
    fn summary(&self) -> String {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}{}", if g.negative { '-' } else { '+' }, g.label))
            .collect();
        format!("stabilizer({})", gens.join(","))
    }
}

fn symplectic_bits(label: &PauliLabel) -> u64 {
    u64::from(label.x_bits()) | (u64::from(label.z_bits()) << 32)
}

fn symplectic_rank(rows: impl Iterator<Item = u64>) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in rows {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn render(n: usize, generators: &[SignedPauli]) -> Result<PureState> {
    let d = 1usize << n;
    let project = |mut v: CVector| {
        for g in generators {
            v = (&v + g.apply(&v)).scale(0.5);
        }
        v
    };
    let mut best: Option<CVector> = None;
    let mut best_norm = 0.0;
    for j in 0..d {
        let mut e = CVector::zeros(d);
        e[j] = C64::new(1.0, 0.0);
        let v = project(e);
        let norm = v.norm();
        if norm > best_norm + RENDER_TOL {
            best_norm = norm;
            best = Some(v);
        }
    }
    let psi = PureState::normalized(best.ok_or(Error::ZeroTrace(0.0))?)?;
    for g in generators {
        let r = (g.apply(psi.amplitudes()) - psi.amplitudes()).norm();
        if r > RENDER_TOL {
            return Err(Error::NotProjector(r));
        }
    }
    Ok(psi)
}

// ---------------------------------------------------------------------------
// A₃ and the fidelity sandwich
// ---------------------------------------------------------------------------

/// `A₃ = 2⁻ⁿ Σ_P ⟨ψ|P|ψ⟩⁶` over all `4ⁿ` Hermitian Paulis.
pub fn exact_a3(psi: &PureState) -> Result<f64> {
    let n = qubits_of(psi.dim())?;
    if n > MAX_A3_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let sum: f64 = pauli_expectations(psi)?.iter().map(|e| e.powi(6)).sum();
    Ok(sum / psi.dim() as f64)
}

/// `(UB, LB) = ((4/3)(1 - a), 1 - a^{1/6})`, which sandwich the optimal
/// stabilizer loss when `a = A₃`.
pub fn stab_bounds(a: f64) -> (f64, f64) {
    (4.0 / 3.0 * (1.0 - a), 1.0 - a.powf(1.0 / 6.0))
}

/// Mean of one primitive sample as a function of `A₃`. A primitive sample
/// draws a Bell-difference label `x` and reports whether two measurements
/// of `W_x` agree; its mean is `(1 + Σ_x q(x)⟨W_x⟩²)/2 = (1 + A₃)/2`.
pub fn primitive_mean(a3: f64) -> f64 {
    (1.0 + a3) / 2.0
}

/// Inverse of [`primitive_mean`] applied to an empirical mean.
pub fn a3_from_primitive_mean(mean: f64) -> f64 {
    2.0 * mean - 1.0
}

/// `S` primitive samples on `ψ`, calibrated to an `A₃` estimate.
pub fn sampled_a3<R: Rng + ?Sized>(psi: &PureState, samples: u64, rng: &mut R) -> Result<f64> {
    let sampler = BellSampler::new(psi)?;
    let agree = (0..samples)
        .filter(|_| {
            let x = sampler.bell_difference(rng);
            sampler.pauli_moment(x, rng)
        })
        .count();
    Ok(a3_from_primitive_mean(agree as f64 / samples as f64))
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StabParams {
    pub epsilon: f64,
    pub delta: f64,
    pub n: usize,
    pub mode: Mode,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl StabParams {
    pub fn new(epsilon: f64, delta: f64, n: usize, mode: Mode) -> Result<Self> {
        check_param("epsilon", epsilon, epsilon > 0.0 && epsilon < 1.0, "0 < epsilon < 1")?;
        check_param("delta", delta, delta > 0.0 && delta < 1.0, "0 < delta < 1")?;
        if n == 0 || n > MAX_ENUMERATION_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        Ok(Self {
            epsilon,
            delta,
            n,
            mode,
            eps1: epsilon / 5.0,
            eps2: epsilon / 5.0,
            eps3: 3.0 * epsilon / 20.0,
            delta1: delta / 3.0,
            delta2: delta / 3.0,
            delta3: delta / 3.0,
        })
    }

    /// Primitive samples for the `A₃` estimate, `⌈2 ln(2/δ₃)/ε₃²⌉`. The
    /// factor 2 is Hoeffding at accuracy `ε₃/2` on the primitive mean.
    pub fn a3_samples(&self) -> u64 {
        (2.0 * (2.0 / self.delta3).ln() / (self.eps3 * self.eps3)).ceil() as u64
    }

    pub fn a3_copies(&self) -> u64 {
        COPIES_PER_PRIMITIVE * self.a3_samples()
    }

    /// `⌈ln(2/δ₂)/(2ε₂²)⌉` projective measurements.
    pub fn loss_shots(&self) -> u64 {
        loss_shots(self.eps2, self.delta2)
    }

    /// Shots per candidate so that every one of `candidates` fidelity
    /// estimates is within `ε₁/2` with probability `1 - δ₁` jointly.
    pub fn candidate_shots(&self, candidates: usize) -> u64 {
        let half = self.eps1 / 2.0;
        ((2.0 * candidates as f64 / self.delta1).ln() / (2.0 * half * half)).ceil() as u64
    }

    /// Total prover copies for the brute-force learner.
    pub fn prover_queries(&self) -> u64 {
        let candidates = stabilizer_count(self.n) as usize;
        candidates as u64 * self.candidate_shots(candidates)
    }

    pub fn verifier_queries(&self) -> u64 {
        self.loss_shots() + self.a3_copies()
    }
}

/// `⌈ln(2/δ)/(2ε²)⌉`.
pub fn loss_shots(eps: f64, delta: f64) -> u64 {
    ((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as u64
}

// ---------------------------------------------------------------------------
// Prover and verifier subroutines
// ---------------------------------------------------------------------------

/// Maximizes fidelity over every stabilizer state. Ideal mode uses exact
/// fidelities; sampled mode uses per-candidate Binomial estimates at the
/// union-bounded shot count. Either way the meter is charged for the
/// sampled budget.
pub fn brute_force_best_stabilizer(
    oracle: &CopyOracle,
    params: &StabParams,
    rng: &mut SimRng,
) -> std::result::Result<StabilizerStateDesc, HarnessError> {
    let n = qubits_of(oracle.dim())?;
    if n != params.n {
        return Err(Error::DimensionMismatch { expected: params.n, got: n }.into());
    }
    let batch = oracle.query_batch("stabilizer_learning", params.prover_queries())?;
    let psi = PureState::from_density(batch.state())?;
    let all = enumerate_stabilizers(n)?;
    let fidelities: Vec<f64> = all.par_iter().map(|s| s.fidelity(&psi)).collect();
    let scores: Vec<f64> = match params.mode {
        Mode::Ideal => fidelities,
        Mode::Sampled => {
            let shots = params.candidate_shots(all.len());
            fidelities
                .iter()
                .map(|&f| {
                    let hits = Binomial::new(shots, f.clamp(0.0, 1.0)).map(|b| b.sample(rng)).unwrap_or(0);
                    hits as f64 / shots as f64
                })
                .collect()
        }
    };
    Ok(all[argmax(&scores)].clone())
}

/// Exact optimum `1 - max_S |⟨S|ψ⟩|²` and a state attaining it.
pub fn optimal_stabilizer(psi: &PureState) -> Result<(f64, StabilizerStateDesc)> {
    let n = qubits_of(psi.dim())?;
    let all = enumerate_stabilizers(n)?;
    let fidelities: Vec<f64> = all.par_iter().map(|s| s.fidelity(psi)).collect();
    let i = argmax(&fidelities);
    Ok(((1.0 - fidelities[i]).max(0.0), all[i].clone()))
}

/// Optimal stabilizer loss `ℓ*`.
pub fn optimal_stab_loss(psi: &PureState) -> Result<f64> {
    Ok(optimal_stabilizer(psi)?.0)
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `1 -` (fraction of `{|S⟩⟨S|, 𝟙 - |S⟩⟨S|}` outcomes landing on `|S⟩`),
/// one copy per shot.
pub fn estimate_stab_loss(oracle: &CopyOracle, hyp: &StabilizerStateDesc, shots: u64, rng: &mut SimRng) -> std::result::Result<f64, HarnessError> {
    let f = oracle.measure_each("stabilizer_projector", shots, |rho, m| {
        hyp.fidelity_with(rho).map(|f| Binomial::new(m, f).map(|b| b.sample(rng)).unwrap_or(m))
    })??;
    Ok(1.0 - f as f64 / shots as f64)
}

/// What a cheating prover does to the delegated `A₃` estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tamper {
    #[default]
    None,
    /// Reports `â = 0`, which makes every hypothesis acceptable.
    Zero,
}

/// `A₃` estimate to accuracy `ε₃`, delegated. `None` if the trap check
/// fires.
pub fn estimate_a3(s: &mut Session, params: &StabParams, tamper: Tamper) -> std::result::Result<Option<f64>, HarnessError> {
    let contract = Delegation::new(params.delta)?;
    let (mode, eps3, delta3, samples) = (params.mode, params.eps3, params.delta3, params.a3_samples());
    let spec = move |rho: &DensityMatrix, rng: &mut SimRng| -> Result<f64> {
        let psi = PureState::from_density(rho)?;
        Ok(match mode {
            Mode::Ideal => ideal_estimate(exact_a3(&psi)?, eps3, delta3, rng).clamp(0.0, 1.0),
            Mode::Sampled => sampled_a3(&psi, samples, rng)?,
        })
    };
    let zero = |r: Result<f64>| r.map(|_| 0.0);
    let hook: Option<&dyn Fn(Result<f64>) -> Result<f64>> = match tamper {
        Tamper::None => None,
        Tamper::Zero => Some(&zero),
    };
    match delegated_measure(s, &contract, "bell_sampling", params.a3_copies(), spec, hook)? {
        Some(r) => Ok(Some(r?)),
        None => Ok(None),
    }
}

/// `û = min(1, (4/3)(1 - â))`.
pub fn certified_bound(a_hat: f64) -> f64 {
    stab_bounds(a_hat).0.min(1.0)
}

/// Accept iff `ℓ̂ ≤ û + 3ε/5`.
pub fn stab_accepts(loss_hat: f64, a_hat: f64, epsilon: f64) -> bool {
    loss_hat <= certified_bound(a_hat) + 0.6 * epsilon
}

pub fn stab_verdict(loss_hat: f64, a_hat: f64, epsilon: f64, hyp: StabilizerStateDesc) -> Verdict<StabilizerStateDesc> {
    if stab_accepts(loss_hat, a_hat, epsilon) {
        Verdict::Accepted(hyp)
    } else {
        Verdict::Aborted(format!(
            "loss estimate {loss_hat:.4} exceeds certified bound {:.4}",
            certified_bound(a_hat) + 0.6 * epsilon
        ))
    }
}

/// `ℓ ≤ 8ℓ* + ε`, judged exactly.
pub fn stab_valid(rho: &DensityMatrix, out: &StabilizerStateDesc, epsilon: f64) -> bool {
    let Ok(psi) = PureState::from_density(rho) else {
        return false;
    };
    match optimal_stab_loss(&psi) {
        Ok(opt) => 1.0 - out.fidelity(&psi) <= 8.0 * opt + epsilon + 1e-12,
        Err(_) => false,
    }
}

/// A random stabilizer state plus a Haar perturbation of weight drawn from
/// `[0, spread]`, renormalized.
pub fn near_stabilizer_state(n: usize, spread: f64, rng: &mut SimRng) -> Result<PureState> {
    let all = enumerate_stabilizers(n)?;
    let base = all[rng.random_range(0..all.len())].dense().amplitudes().clone();
    let noise = sample_haar_state(1 << n, rng);
    let t = rng.random_range(0.0..=spread.max(0.0));
    PureState::normalized(base + noise.amplitudes().scale(t))
}

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

pub trait StabProver: ProverStrategy + Send {
    /// Generators sent to the verifier; they need not describe a state.
    fn generators(&mut self, oracle: &CopyOracle, params: &StabParams, rng: &mut SimRng) -> std::result::Result<Vec<SignedPauli>, HarnessError>;

    fn tamper(&self) -> Tamper {
        Tamper::None
    }
}

pub struct StabIp {
    pub params: StabParams,
}

impl StabIp {
    pub fn new(params: StabParams) -> Self {
        Self { params }
    }
}

impl Protocol for StabIp {
    type Prover = dyn StabProver;
    type Output = StabilizerStateDesc;

    fn name(&self) -> &'static str {
        "stab"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Quantum
    }

    fn execute(&self, s: &mut Session, prover: &mut Self::Prover) -> std::result::Result<Verdict<StabilizerStateDesc>, HarnessError> {
        s.channel.next_round();
        let gens = prover.generators(&s.prover, &self.params, &mut s.p_rng)?;
        let hyp = match StabilizerStateDesc::from_generators(self.params.n, gens) {
            Ok(h) => h,
            Err(e) => return Ok(Verdict::Aborted(format!("invalid stabilizer description: {e}"))),
        };
        s.channel.send_structured(Direction::ProverToVerifier, "stabilizer", &hyp.encode());
        s.channel.next_round();
        let loss_hat = estimate_stab_loss(&s.verifier, &hyp, self.params.loss_shots(), &mut s.v_rng)?;
        s.channel.next_round();
        let Some(a_hat) = estimate_a3(s, &self.params, prover.tamper())? else {
            return Ok(Verdict::Aborted("delegated Bell sampling failed the trap check".into()));
        };
        s.channel
            .send_structured(Direction::ProverToVerifier, "a3_estimate", &wire::f64s(&[a_hat]));
        s.stat("loss_hat", loss_hat);
        s.stat("a3_hat", a_hat);
        s.stat("u_hat", certified_bound(a_hat));
        Ok(stab_verdict(loss_hat, a_hat, self.params.epsilon, hyp))
    }
}

// ---------------------------------------------------------------------------
// Provers
// ---------------------------------------------------------------------------

pub struct HonestStabProver;

impl ProverStrategy for HonestStabProver {
    fn name(&self) -> String {
        "honest".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Honest
    }
}

impl StabProver for HonestStabProver {
    fn generators(&mut self, oracle: &CopyOracle, params: &StabParams, rng: &mut SimRng) -> std::result::Result<Vec<SignedPauli>, HarnessError> {
        Ok(brute_force_best_stabilizer(oracle, params, rng)?.generators().to_vec())
    }
}

/// Sends a uniformly random stabilizer state.
pub struct RandomStabilizer;

impl ProverStrategy for RandomStabilizer {
    fn name(&self) -> String {
        "random_stabilizer".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("sends a uniformly random stabilizer state".into())
    }
}

impl StabProver for RandomStabilizer {
    fn generators(&mut self, _: &CopyOracle, params: &StabParams, rng: &mut SimRng) -> std::result::Result<Vec<SignedPauli>, HarnessError> {
        let all = enumerate_stabilizers(params.n)?;
        Ok(all[rng.random_range(0..all.len())].generators().to_vec())
    }
}

/// Sends the stabilizer state of least fidelity, optionally zeroing the
/// delegated `A₃` estimate.
pub struct WorstStabilizer {
    pub tamper: Tamper,
}

impl ProverStrategy for WorstStabilizer {
    fn name(&self) -> String {
        match self.tamper {
            Tamper::None => "worst_stabilizer".into(),
            Tamper::Zero => "tamper".into(),
        }
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("sends the stabilizer state of least fidelity".into())
    }
}

impl StabProver for WorstStabilizer {
    fn generators(&mut self, oracle: &CopyOracle, params: &StabParams, _: &mut SimRng) -> std::result::Result<Vec<SignedPauli>, HarnessError> {
        let batch = oracle.query_batch("stabilizer_learning", params.prover_queries())?;
        let psi = PureState::from_density(batch.state())?;
        let all = enumerate_stabilizers(params.n)?;
        let neg: Vec<f64> = all.iter().map(|s| -s.fidelity(&psi)).collect();
        Ok(all[argmax(&neg)].generators().to_vec())
    }

    fn tamper(&self) -> Tamper {
        self.tamper
    }
}

/// Learns the best stabilizer state for an unrelated Haar-random state.
pub struct OtherTargetStabilizer;

impl ProverStrategy for OtherTargetStabilizer {
    fn name(&self) -> String {
        "other_target".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("sends the best stabilizer state for a different target".into())
    }
}

impl StabProver for OtherTargetStabilizer {
    fn generators(&mut self, _: &CopyOracle, params: &StabParams, rng: &mut SimRng) -> std::result::Result<Vec<SignedPauli>, HarnessError> {
        let other = near_stabilizer_state(params.n, 0.5, rng)?;
        Ok(optimal_stabilizer(&other)?.1.generators().to_vec())
    }
}

/// Built-in prover by name.
pub fn stab_prover(name: &str) -> Option<Box<dyn StabProver>> {
    Some(match name {
        "honest" => Box::new(HonestStabProver),
        "random_stabilizer" => Box::new(RandomStabilizer),
        "worst_stabilizer" => Box::new(WorstStabilizer { tamper: Tamper::None }),
        "tamper" => Box::new(WorstStabilizer { tamper: Tamper::Zero }),
        "other_target" => Box::new(OtherTargetStabilizer),
        _ => return None,
    })
}

pub const STAB_ADVERSARIES: [&str; 4] = ["random_stabilizer", "worst_stabilizer", "other_target", "tamper"];

// ---------------------------------------------------------------------------
// Trivial validation IP
// ---------------------------------------------------------------------------

/// Decide-valid subroutine for the trivial IP: reports whether
/// `ℓ ≤ 8ℓ* + ε`. The ideal checker errs with probability `δ/2` and is
/// charged the verifier cost of the interactive protocol; the exact checker
/// is free and never errs.
#[derive(Debug, Clone)]
pub struct StabilizerDecider {
    pub params: StabParams,
    pub exact: bool,
}

impl DecideValid for StabilizerDecider {
    type Hypothesis = StabilizerStateDesc;

    fn name(&self) -> &'static str {
        "stabilizer_fidelity"
    }

    fn cost(&self) -> u64 {
        if self.exact {
            0
        } else {
            self.params.verifier_queries()
        }
    }

    fn failure_probability(&self) -> f64 {
        if self.exact {
            0.0
        } else {
            self.params.delta / 2.0
        }
    }

    fn encode(&self, h: &StabilizerStateDesc) -> Vec<u8> {
        h.encode()
    }

    fn decide(&self, h: &StabilizerStateDesc, oracle: &CopyOracle, rng: &mut SimRng) -> std::result::Result<bool, HarnessError> {
        let valid = oracle.measure_each("decide_valid", self.cost(), |rho, _| stab_valid(rho, h, self.params.epsilon))?;
        let wrong = rng.random_bool(self.failure_probability());
        Ok(valid != wrong)
    }
}

/// Brute-force solver for the trivial IP.
pub struct BruteForceSolver {
    pub params: StabParams,
}

impl ProverStrategy for BruteForceSolver {
    fn name(&self) -> String {
        "brute_force".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Honest
    }
}

impl Solver<StabilizerStateDesc> for BruteForceSolver {
    fn solve(&mut self, oracle: &CopyOracle, rng: &mut SimRng) -> StabilizerStateDesc {
        match brute_force_best_stabilizer(oracle, &self.params, rng) {
            Ok(s) => s,
            Err(_) => enumerate_stabilizers(self.params.n).expect("validated qubit count")[0].clone(),
        }
    }
}

/// Solver that ignores its copies and sends the least-fidelity state.
pub struct GarbageSolver {
    pub params: StabParams,
}

impl ProverStrategy for GarbageSolver {
    fn name(&self) -> String {
        "garbage".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("sends the stabilizer state of least fidelity".into())
    }
}

impl Solver<StabilizerStateDesc> for GarbageSolver {
    fn solve(&mut self, oracle: &CopyOracle, rng: &mut SimRng) -> StabilizerStateDesc {
        let gens = WorstStabilizer { tamper: Tamper::None }
            .generators(oracle, &self.params, rng)
            .expect("quantum instance");
        StabilizerStateDesc::from_generators(self.params.n, gens).expect("enumerated state")
    }
}

#[cfg(test)]
mod tests;
