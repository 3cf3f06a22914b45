//! Interactive uniformity testing with a streaming, polylog-memory
//! verifier.
//!
//! The verifier draws `n = ⌈140√k/ε²⌉` samples and forwards each to the
//! prover, keeping only the multilinear extension `ã` of the frequency
//! vector at two secret random points. The prover then proves the number of
//! unique elements `Z = Σᵢ h(aᵢ)` by sum-check over `h̃(ã(x))`, where `h̃` is
//! the degree-`D` interpolant of the unique indicator on `0..=D`. A second
//! sum-check on `eq(x, ζ)·Π_{j≤D}(ã(x) - j)` with claimed total 0 certifies
//! that no frequency exceeds `D`. The verifier outputs "not uniform" iff
//! `Z ≤ n·τ` with `τ = (1 - 1/k)^{n-1} - nε²/(8k)`.
//!
//! When some frequency exceeds the cap the honest prover says so and names
//! a witness. The verifier counts the witness on a fresh stream: a count
//! that is implausible under the uniform law certifies non-uniformity;
//! otherwise the cap is doubled and the protocol restarts.

pub mod field;
pub mod sumcheck;

use rand::Rng;

use crate::error::{check_param, Error, Result};
use crate::harness::{ChannelKind, Direction, HarnessError, Honesty, Instance, Protocol, ProverStrategy, Session, Summary, Verdict};
use crate::rng::SimRng;

pub use field::{Fq, MODULUS};
use sumcheck::{
    eq_eval, eq_table, horner, lagrange_eval, run_sumcheck, unique_indicator_coeffs, vanishing_coeffs, CubeProver, ShiftingProver, SumcheckOutcome,
    SumcheckProver,
};

pub const DEFAULT_DEGREE_CAP: usize = 32;

/// Largest cap the verifier widens to before giving up.
pub const MAX_DEGREE_CAP: usize = 1024;

/// Uniform-law tail probability below which a witness count certifies
/// non-uniformity.
pub const HEAVY_HITTER_LEVEL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UniformityParams {
    pub k: usize,
    /// `log₂ k`.
    pub b: usize,
    pub epsilon: f64,
    pub n: u64,
    pub tau: f64,
    pub threshold_count: f64,
    pub degree_cap: usize,
    /// Set for small-`k` mechanics runs that skip `ε ≥ 12/k^{1/4}`.
    pub constraint_waived: bool,
}

impl UniformityParams {
    pub fn new(k: usize, epsilon: f64, degree_cap: usize) -> Result<Self> {
        let p = Self::mechanics(k, epsilon, degree_cap)?;
        let floor = 12.0 / (k as f64).powf(0.25);
        check_param("epsilon", epsilon, epsilon >= floor * (1.0 - 1e-12), "epsilon >= 12 / k^(1/4)")?;
        Ok(Self {
            constraint_waived: false,
            ..p
        })
    }

    /// Same formulas without the `ε ≥ 12/k^{1/4}` constraint.
    pub fn mechanics(k: usize, epsilon: f64, degree_cap: usize) -> Result<Self> {
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::NotQubitDimension(k));
        }
        check_param("epsilon", epsilon, epsilon > 0.0 && epsilon <= 1.0, "0 < epsilon <= 1")?;
        check_param(
            "degree_cap",
            degree_cap as f64,
            (1..=MAX_DEGREE_CAP).contains(&degree_cap),
            "1 <= degree_cap <= 1024",
        )?;
        let kf = k as f64;
        let n = (140.0 * kf.sqrt() / (epsilon * epsilon)).ceil() as u64;
        let tau = ((n - 1) as f64 * (-1.0 / kf).ln_1p()).exp() - n as f64 * epsilon * epsilon / (8.0 * kf);
        Ok(Self {
            k,
            b: k.trailing_zeros() as usize,
            epsilon,
            n,
            tau,
            threshold_count: n as f64 * tau,
            degree_cap,
            constraint_waived: true,
        })
    }

    /// Instrumented bound on persistent verifier state.
    pub fn max_field_elements(&self) -> usize {
        4 * self.b + 16
    }

    /// Prover-to-verifier field elements of one attempt at cap `d`: the
    /// claim and both sum-checks.
    pub fn communication(&self, d: usize) -> u64 {
        (1 + self.b * (d + 2) + self.b * (d + 3)) as u64
    }
}

// ---------------------------------------------------------------------------
// Verifier state
// ---------------------------------------------------------------------------

/// Counts field elements held by the verifier.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct MemoryMeter {
    persistent: usize,
    peak: usize,
}

impl MemoryMeter {
    pub fn hold(&mut self, count: usize) {
        self.persistent += count;
        self.peak = self.peak.max(self.persistent);
    }

    pub fn release(&mut self, count: usize) {
        self.persistent = self.persistent.saturating_sub(count);
    }

    /// Transient working space on top of the persistent state.
    pub fn scratch(&mut self, count: usize) {
        self.peak = self.peak.max(self.persistent + count);
    }

    pub fn peak(&self) -> usize {
        self.peak
    }
}

/// Everything the streaming verifier keeps between samples.
#[derive(Debug, Clone)]
pub struct StreamVerifierState {
    pub b: usize,
    /// Challenges of the unique-count sum-check.
    pub r: Vec<Fq>,
    pub a_tilde_at_r: Fq,
    /// Challenges of the range sum-check.
    pub r_range: Vec<Fq>,
    pub a_tilde_at_r_range: Fq,
    /// Point of the range certificate's `eq` factor.
    pub zeta: Vec<Fq>,
    pub sample_count: u64,
    pub memory: MemoryMeter,
}

impl StreamVerifierState {
    pub fn new(b: usize, rng: &mut SimRng) -> Self {
        let draw = |rng: &mut SimRng| (0..b).map(|_| Fq::random(rng)).collect::<Vec<_>>();
        let r = draw(rng);
        let r_range = draw(rng);
        let zeta = draw(rng);
        let mut memory = MemoryMeter::default();
        memory.hold(3 * b + 2);
        Self {
            b,
            r,
            a_tilde_at_r: Fq::ZERO,
            r_range,
            a_tilde_at_r_range: Fq::ZERO,
            zeta,
            sample_count: 0,
            memory,
        }
    }

    /// Adds `χ_i` at both points; `O(b)` multiplications.
    pub fn update(&mut self, i: usize) -> Result<()> {
        if i >> self.b != 0 {
            return Err(Error::IndexOutOfRange {
                index: i as u64,
                bound: 1 << self.b,
            });
        }
        self.memory.scratch(2);
        self.a_tilde_at_r += chi(i, &self.r);
        self.a_tilde_at_r_range += chi(i, &self.r_range);
        self.sample_count += 1;
        Ok(())
    }
}

/// `χ_i(r) = Π_j (i_j r_j + (1 - i_j)(1 - r_j))`, little-endian bits.
pub fn chi(i: usize, r: &[Fq]) -> Fq {
    r.iter()
        .enumerate()
        .fold(Fq::ONE, |acc, (j, &rj)| acc * if (i >> j) & 1 == 1 { rj } else { Fq::ONE - rj })
}

/// `ã(r)` evaluated densely from a frequency vector.
pub fn multilinear_eval(freq: &[u64], r: &[Fq]) -> Fq {
    freq.iter().enumerate().map(|(i, &a)| Fq::new(a) * chi(i, r)).sum()
}

/// `h̃(t)` for the unique indicator on nodes `0..=cap`, streamed.
pub fn unique_indicator_eval(cap: usize, t: Fq) -> Fq {
    lagrange_eval((0..cap + 1).map(|j| if j == 1 { Fq::ONE } else { Fq::ZERO }), t)
}

/// Number of values seen exactly once.
pub fn unique_count(freq: &[u64]) -> u64 {
    freq.iter().filter(|&&a| a == 1).count() as u64
}

/// Chernoff bound on `Pr[Bin(n, p) ≥ c]` for `c > np`.
pub fn binomial_upper_tail(n: u64, p: f64, c: u64) -> f64 {
    let (nf, cf) = (n as f64, c as f64);
    if cf <= nf * p {
        return 1.0;
    }
    if c >= n {
        return p.powf(nf);
    }
    let a = cf / nf;
    let kl = a * (a / p).ln() + (1.0 - a) * ((1.0 - a) / (1.0 - p)).ln();
    (-nf * kl).exp()
}

// ---------------------------------------------------------------------------
// Provers
// ---------------------------------------------------------------------------

/// What the prover says after the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamClaim {
    /// Claimed unique count.
    Unique(Fq),
    /// Some value occurs more than the cap allows; `witness` is one.
    CapExceeded { witness: usize },
}

pub trait StreamProver: ProverStrategy + Send {
    fn reset(&mut self, params: &UniformityParams);

    fn observe(&mut self, sample: usize);

    fn claim(&mut self, cap: usize) -> StreamClaim;

    fn unique_sumcheck(&mut self, cap: usize) -> Box<dyn SumcheckProver>;

    fn range_sumcheck(&mut self, cap: usize, zeta: &[Fq]) -> Box<dyn SumcheckProver>;
}

/// Honest sum-check prover for the unique count at cap `cap`.
pub fn honest_unique_prover(freq: &[u64], cap: usize) -> CubeProver {
    let table = freq.iter().map(|&a| Fq::new(a)).collect();
    let coeffs = unique_indicator_coeffs(cap);
    CubeProver::new(vec![table], cap + 1, Box::new(move |v: &[Fq]| horner(&coeffs, v[0])), true)
}

/// Honest sum-check prover for the range certificate at cap `cap`.
pub fn honest_range_prover(freq: &[u64], cap: usize, zeta: &[Fq]) -> CubeProver {
    let table = freq.iter().map(|&a| Fq::new(a)).collect();
    let coeffs = vanishing_coeffs(cap);
    CubeProver::new(
        vec![table, eq_table(zeta)],
        cap + 2,
        Box::new(move |v: &[Fq]| v[1] * horner(&coeffs, v[0])),
        false,
    )
}

pub type RangeBuilder<'a> = &'a dyn Fn(&[Fq]) -> Box<dyn SumcheckProver>;

/// Runs both sum-checks against a prover pair outside a session, replaying
/// `freq` through a fresh streaming state. The range prover is built on the
/// verifier's `ζ`; `None` skips the range check.
pub fn offline_sumchecks(
    freq: &[u64],
    cap: usize,
    claim: Fq,
    unique: &mut dyn SumcheckProver,
    range: Option<RangeBuilder<'_>>,
    rng: &mut SimRng,
) -> (SumcheckOutcome, SumcheckOutcome) {
    let b = freq.len().trailing_zeros() as usize;
    let mut state = StreamVerifierState::new(b, rng);
    for (i, &a) in freq.iter().enumerate() {
        for _ in 0..a {
            state.update(i).unwrap();
        }
    }
    let mut memory = state.memory.clone();
    let a_r = state.a_tilde_at_r;
    let u = run_sumcheck(
        claim,
        cap + 1,
        &state.r,
        |_, r| {
            if let Some(r) = r {
                unique.bind(r);
            }
            unique.round()
        },
        || unique_indicator_eval(cap, a_r),
        &mut memory,
    );
    let Some(build) = range else {
        return (u, SumcheckOutcome::Verified);
    };
    let mut range = build(&state.zeta);
    let (a_rr, rr, zeta) = (state.a_tilde_at_r_range, state.r_range.clone(), state.zeta.clone());
    let v = run_sumcheck(
        Fq::ZERO,
        cap + 2,
        &state.r_range,
        |_, r| {
            if let Some(r) = r {
                range.bind(r);
            }
            range.round()
        },
        || eq_eval(&rr, &zeta) * horner(&vanishing_coeffs(cap), a_rr),
        &mut memory,
    );
    (u, v)
}

/// Records the frequency vector and answers honestly.
#[derive(Debug, Clone, Default)]
pub struct HonestStreamProver {
    pub freq: Vec<u64>,
}

impl HonestStreamProver {
    fn heavy(&self, cap: usize) -> Option<usize> {
        self.freq.iter().position(|&a| a > cap as u64)
    }
}

impl ProverStrategy for HonestStreamProver {
    fn name(&self) -> String {
        "honest".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Honest
    }
}

impl StreamProver for HonestStreamProver {
    fn reset(&mut self, params: &UniformityParams) {
        self.freq = vec![0; params.k];
    }

    fn observe(&mut self, sample: usize) {
        self.freq[sample] += 1;
    }

    fn claim(&mut self, cap: usize) -> StreamClaim {
        match self.heavy(cap) {
            Some(witness) => StreamClaim::CapExceeded { witness },
            None => StreamClaim::Unique(Fq::new(unique_count(&self.freq))),
        }
    }

    fn unique_sumcheck(&mut self, cap: usize) -> Box<dyn SumcheckProver> {
        Box::new(honest_unique_prover(&self.freq, cap))
    }

    fn range_sumcheck(&mut self, cap: usize, zeta: &[Fq]) -> Box<dyn SumcheckProver> {
        Box::new(honest_range_prover(&self.freq, cap, zeta))
    }
}

/// How a cheating prover misreports the unique count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Misreport {
    /// Moves the count to the other side of the threshold.
    Flip,
    /// Adds one to the count.
    PlusOne,
    /// Never flags a cap violation; claims 0 on the range check regardless.
    HideCap,
}

/// Misreports, then keeps every round message consistent with the false
/// claim.
#[derive(Debug, Clone)]
pub struct LyingStreamProver {
    pub misreport: Misreport,
    honest: HonestStreamProver,
    threshold: f64,
}

impl LyingStreamProver {
    pub fn new(misreport: Misreport) -> Self {
        Self {
            misreport,
            honest: HonestStreamProver::default(),
            threshold: 0.0,
        }
    }

    fn claimed(&self) -> u64 {
        let z = unique_count(&self.honest.freq);
        let t = self.threshold.floor().max(0.0) as u64;
        match self.misreport {
            Misreport::Flip if z as f64 > self.threshold => t,
            Misreport::Flip => t + 1,
            Misreport::PlusOne => z + 1,
            Misreport::HideCap => z,
        }
    }
}

impl ProverStrategy for LyingStreamProver {
    fn name(&self) -> String {
        match self.misreport {
            Misreport::Flip => "flip".into(),
            Misreport::PlusOne => "plus_one".into(),
            Misreport::HideCap => "hide_cap".into(),
        }
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial(match self.misreport {
            Misreport::Flip => "claims a unique count on the other side of the threshold".into(),
            Misreport::PlusOne => "claims one more unique element".into(),
            Misreport::HideCap => "hides frequencies above the degree cap".into(),
        })
    }
}

impl StreamProver for LyingStreamProver {
    fn reset(&mut self, params: &UniformityParams) {
        self.honest.reset(params);
        self.threshold = params.threshold_count;
    }

    fn observe(&mut self, sample: usize) {
        self.honest.observe(sample);
    }

    fn claim(&mut self, cap: usize) -> StreamClaim {
        if self.misreport != Misreport::HideCap {
            if let StreamClaim::CapExceeded { witness } = self.honest.claim(cap) {
                return StreamClaim::CapExceeded { witness };
            }
        }
        StreamClaim::Unique(Fq::new(self.claimed()))
    }

    fn unique_sumcheck(&mut self, cap: usize) -> Box<dyn SumcheckProver> {
        Box::new(ShiftingProver::new(honest_unique_prover(&self.honest.freq, cap), Fq::new(self.claimed())))
    }

    fn range_sumcheck(&mut self, cap: usize, zeta: &[Fq]) -> Box<dyn SumcheckProver> {
        let honest = honest_range_prover(&self.honest.freq, cap, zeta);
        match self.misreport {
            Misreport::HideCap => Box::new(ShiftingProver::new(honest, Fq::ZERO)),
            _ => Box::new(honest),
        }
    }
}

/// Built-in prover by name.
pub fn stream_prover(name: &str) -> Option<Box<dyn StreamProver>> {
    Some(match name {
        "honest" => Box::new(HonestStreamProver::default()),
        "flip" => Box::new(LyingStreamProver::new(Misreport::Flip)),
        "plus_one" => Box::new(LyingStreamProver::new(Misreport::PlusOne)),
        "hide_cap" => Box::new(LyingStreamProver::new(Misreport::HideCap)),
        _ => return None,
    })
}

pub const STREAM_ADVERSARIES: [&str; 3] = ["flip", "plus_one", "hide_cap"];

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformityDecision {
    Uniform,
    NotUniform,
}

impl Summary for UniformityDecision {
    fn summary(&self) -> String {
        match self {
            UniformityDecision::Uniform => "uniform".into(),
            UniformityDecision::NotUniform => "not uniform".into(),
        }
    }
}

/// "not uniform" iff `Z ≤ n·τ`.
pub fn uniformity_decision(z: u64, threshold_count: f64) -> UniformityDecision {
    if z as f64 <= threshold_count {
        UniformityDecision::NotUniform
    } else {
        UniformityDecision::Uniform
    }
}

/// Combines both sum-check outcomes with the verified count.
pub fn uniformity_verdict(unique: &SumcheckOutcome, range: &SumcheckOutcome, z: u64, threshold_count: f64) -> Verdict<UniformityDecision> {
    match (unique, range) {
        (SumcheckOutcome::Rejected { round, reason }, _) => Verdict::Aborted(format!("unique-count sum-check rejected in round {round}: {reason}")),
        (_, SumcheckOutcome::Rejected { round, reason }) => Verdict::Aborted(format!("range certificate rejected in round {round}: {reason}")),
        _ => Verdict::Accepted(uniformity_decision(z, threshold_count)),
    }
}

/// Total variation distance from the uniform law.
pub fn distance_from_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|&x| (x - u).abs()).sum::<f64>()
}

/// "uniform" is valid only for the uniform law, "not uniform" only for laws
/// at least `ε` away; in between either answer is valid.
pub fn uniformity_valid(p: &[f64], out: UniformityDecision, epsilon: f64) -> bool {
    let tv = distance_from_uniform(p);
    match out {
        UniformityDecision::Uniform => tv < epsilon,
        UniformityDecision::NotUniform => tv > 1e-12,
    }
}

/// The support-fraction instance: uniform on the first `⌈f·k⌉` values.
pub fn support_fraction(k: usize, f: f64) -> Vec<f64> {
    let s = ((f * k as f64).ceil() as usize).clamp(1, k);
    let mut p = vec![0.0; k];
    for v in p.iter_mut().take(s) {
        *v = 1.0 / s as f64;
    }
    p
}

pub fn point_mass(k: usize) -> Vec<f64> {
    let mut p = vec![0.0; k];
    p[0] = 1.0;
    p
}

pub struct UniformityIp {
    pub params: UniformityParams,
}

impl UniformityIp {
    pub fn new(params: UniformityParams) -> Self {
        Self { params }
    }
}

enum Attempt {
    Done(Verdict<UniformityDecision>),
    Widen,
}

impl UniformityIp {
    fn attempt(&self, s: &mut Session, prover: &mut dyn StreamProver, cap: usize) -> std::result::Result<(Attempt, MemoryMeter, u64), HarnessError> {
        let p = &self.params;
        prover.reset(p);
        let mut rng = s.stream(cap as u64);
        let mut state = StreamVerifierState::new(p.b, &mut rng);
        for _ in 0..p.n {
            let x = s.verifier.sample("sample", &mut s.v_rng)?;
            state.update(x)?;
            s.channel
                .send_structured(Direction::VerifierToProver, "sample", &(x as u64).to_le_bytes());
            prover.observe(x);
        }
        s.channel.next_round();
        let mut sent = 0u64;
        let z = match prover.claim(cap) {
            StreamClaim::Unique(z) => z,
            StreamClaim::CapExceeded { witness } => {
                s.channel
                    .send_structured(Direction::ProverToVerifier, "cap_exceeded", &(witness as u64).to_le_bytes());
                sent += 1;
                return self.check_witness(s, witness, cap, state.memory, sent);
            }
        };
        s.channel.send_structured(Direction::ProverToVerifier, "unique_claim", &z.to_le_bytes());
        sent += 1;
        state.memory.hold(1);

        let mut unique_prover = prover.unique_sumcheck(cap);
        let (a_r, mut memory) = (state.a_tilde_at_r, state.memory.clone());
        // Report copies of both sum-check transcripts; not verifier memory.
        let (mut unique_log, mut range_log) = (SumcheckLog::default(), SumcheckLog::default());
        let unique = run_sumcheck(
            z,
            cap + 1,
            &state.r,
            |_, revealed| {
                if let Some(r) = revealed {
                    s.channel.send_structured(Direction::VerifierToProver, "challenge", &r.to_le_bytes());
                    unique_log.challenges.push(r.value());
                    unique_prover.bind(r);
                }
                let msg = unique_prover.round();
                unique_log.rounds.extend(msg.iter().map(|v| v.value()));
                s.channel.send_structured(Direction::ProverToVerifier, "unique_round", &field_bytes(&msg));
                sent += msg.len() as u64;
                msg
            },
            || unique_indicator_eval(cap, a_r),
            &mut memory,
        );
        s.channel.next_round();

        let range = if unique.is_verified() {
            s.channel.send_structured(Direction::VerifierToProver, "zeta", &field_bytes(&state.zeta));
            let mut range_prover = prover.range_sumcheck(cap, &state.zeta);
            let (a_rr, r_range, zeta) = (state.a_tilde_at_r_range, state.r_range.clone(), state.zeta.clone());
            let vanishing = vanishing_coeffs(cap);
            run_sumcheck(
                Fq::ZERO,
                cap + 2,
                &state.r_range,
                |_, revealed| {
                    if let Some(r) = revealed {
                        s.channel.send_structured(Direction::VerifierToProver, "challenge", &r.to_le_bytes());
                        range_log.challenges.push(r.value());
                        range_prover.bind(r);
                    }
                    let msg = range_prover.round();
                    range_log.rounds.extend(msg.iter().map(|v| v.value()));
                    s.channel.send_structured(Direction::ProverToVerifier, "range_round", &field_bytes(&msg));
                    sent += msg.len() as u64;
                    msg
                },
                || eq_eval(&r_range, &zeta) * horner(&vanishing, a_rr),
                &mut memory,
            )
        } else {
            SumcheckOutcome::Rejected {
                round: 0,
                reason: "not run".into(),
            }
        };
        s.channel.next_round();
        s.attach("unique_claim", vec![z.value()]);
        unique_log.attach(s, "unique");
        range_log.attach(s, "range");

        if unique.is_verified() && range.is_verified() && z.value() > p.n {
            return Ok((
                Attempt::Done(Verdict::Aborted("claimed unique count exceeds the stream length".into())),
                memory,
                sent,
            ));
        }
        let verdict = uniformity_verdict(&unique, &range, z.value(), p.threshold_count);
        if let Verdict::Accepted(_) = verdict {
            s.stat("unique_count", z.value() as f64);
        }
        Ok((Attempt::Done(verdict), memory, sent))
    }

    /// Counts `witness` on a fresh stream of `n` samples.
    fn check_witness(
        &self,
        s: &mut Session,
        witness: usize,
        cap: usize,
        mut memory: MemoryMeter,
        sent: u64,
    ) -> std::result::Result<(Attempt, MemoryMeter, u64), HarnessError> {
        let p = &self.params;
        if witness >= p.k {
            return Ok((Attempt::Done(Verdict::Aborted("cap witness out of range".into())), memory, sent));
        }
        memory.scratch(2);
        let mut count = 0u64;
        for _ in 0..p.n {
            if s.verifier.sample("witness_sample", &mut s.v_rng)? == witness {
                count += 1;
            }
        }
        s.channel.next_round();
        s.stat("witness_count", count as f64);
        if count > cap as u64 && binomial_upper_tail(p.n, 1.0 / p.k as f64, count) <= HEAVY_HITTER_LEVEL {
            return Ok((Attempt::Done(Verdict::Accepted(UniformityDecision::NotUniform)), memory, sent));
        }
        Ok((Attempt::Widen, memory, sent))
    }
}

/// Round messages, flattened, and the challenges revealed between them.
#[derive(Default)]
struct SumcheckLog {
    rounds: Vec<u64>,
    challenges: Vec<u64>,
}

impl SumcheckLog {
    fn attach(self, s: &mut Session, name: &str) {
        s.attach(&format!("{name}_rounds"), self.rounds);
        s.attach(&format!("{name}_challenges"), self.challenges);
    }
}

fn field_bytes(values: &[Fq]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

impl Protocol for UniformityIp {
    type Prover = dyn StreamProver;
    type Output = UniformityDecision;

    fn name(&self) -> &'static str {
        "uniformity"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Classical
    }

    fn execute(&self, s: &mut Session, prover: &mut Self::Prover) -> std::result::Result<Verdict<UniformityDecision>, HarnessError> {
        let mut cap = self.params.degree_cap;
        let mut peak = 0usize;
        let mut sent = 0u64;
        let mut restarts = 0u32;
        let verdict = loop {
            let (attempt, memory, elements) = self.attempt(s, prover, cap)?;
            peak = peak.max(memory.peak());
            sent += elements;
            match attempt {
                Attempt::Done(v) => break v,
                Attempt::Widen if 2 * cap <= MAX_DEGREE_CAP => {
                    cap *= 2;
                    restarts += 1;
                }
                Attempt::Widen => break Verdict::Aborted("degree cap cannot be widened further".into()),
            }
        };
        s.stat("peak_field_elements", peak as f64);
        s.stat("communication_field_elements", sent as f64);
        s.stat("degree_cap", cap as f64);
        s.stat("restarts", f64::from(restarts));
        Ok(verdict)
    }
}

/// The judge used in reports and tests.
pub fn uniformity_judge(epsilon: f64) -> impl Fn(&Instance, &UniformityDecision) -> bool {
    move |inst, out| inst.distribution().is_some_and(|p| uniformity_valid(p, *out, epsilon))
}

/// A random frequency vector of `samples` draws over `[0, k)`.
pub fn random_stream(k: usize, samples: usize, rng: &mut SimRng) -> Vec<usize> {
    (0..samples).map(|_| rng.random_range(0..k)).collect()
}

#[cfg(test)]
mod tests;
