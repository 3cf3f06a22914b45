//! Interactive full-state tomography.
//!
//! The prover performs tomography with its own copies and sends a classical
//! description `ρ̂`. The verifier only certifies closeness, which needs far
//! fewer copies than learning: "close" accepts and outputs `ρ̂`, "far"
//! aborts. The closeness test is multi-copy, so it is delegated to the
//! prover through the verified-delegation contract.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{check_param, Error, Result};
use crate::harness::{
    delegated_measure, wire, ChannelKind, CopyOracle, Delegation, Direction, HarnessError, Honesty, Mode, Protocol, ProverStrategy, Session, Summary,
    Verdict,
};
use crate::linalg::{
    eig_sorted, purity, random_traceless_direction, sample_haar_state, sample_haar_unitary, truncate_rank_k_normalized, CMatrix, DensityMatrix, C64,
};
use crate::measure::{basis_probabilities, multinomial_counts, sample_index, swap_accept_probability};
use crate::rng::SimRng;

/// Fraction of `ε` the prover must reach in trace norm.
pub const PROVER_FRACTION: f64 = 0.99;

/// Surrogate acceptance threshold on `D̂₂²`, in units of `ε²/d`.
pub const SURROGATE_THRESHOLD: f64 = 0.625;

/// Per-term accuracy of the surrogate estimates, in units of `ε²/d`.
pub const SURROGATE_ACCURACY: f64 = 0.125;

/// Honest trace-norm target in sampled mode, in units of `ε/√d`.
pub const SAMPLED_TARGET: f64 = 0.5;

const BOOTSTRAP_RESAMPLES: usize = 100;
const MAX_TOMOGRAPHY_SHOTS: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TomoParams {
    pub epsilon: f64,
    pub delta: f64,
    pub delta_v: f64,
    pub delta_p: f64,
    pub prover_target: f64,
    pub d: usize,
    pub mode: Mode,
    /// Rank promise on the unknown state, ideal mode only.
    pub rank: Option<usize>,
    pub c_v: f64,
    pub c_p: f64,
}

impl TomoParams {
    pub fn new(epsilon: f64, delta: f64, d: usize, mode: Mode) -> Result<Self> {
        check_param("epsilon", epsilon, epsilon > 0.0 && epsilon < 1.0, "0 < epsilon < 1")?;
        check_param("delta", delta, delta > 0.0 && delta < 1.0, "0 < delta < 1")?;
        check_param("d", d as f64, d >= 2, "d >= 2")?;
        Ok(Self {
            epsilon,
            delta,
            delta_v: delta / 2.0,
            delta_p: delta / 2.0,
            prover_target: PROVER_FRACTION * epsilon,
            d,
            mode,
            rank: None,
            c_v: 1.0,
            c_p: 1.0,
        })
    }

    pub fn with_rank(mut self, k: usize) -> Result<Self> {
        if k == 0 || k > self.d {
            return Err(Error::RankOutOfRange { k, d: self.d });
        }
        if self.mode != Mode::Ideal {
            return Err(Error::Parameter {
                name: "rank_k",
                value: k as f64,
                expected: "rank promise requires ideal mode",
            });
        }
        self.rank = Some(k);
        Ok(self)
    }

    pub fn with_constants(mut self, c_v: f64, c_p: f64) -> Result<Self> {
        check_param("c_v", c_v, c_v > 0.0, "c_v > 0")?;
        check_param("c_p", c_p, c_p > 0.0, "c_p > 0")?;
        self.c_v = c_v;
        self.c_p = c_p;
        Ok(self)
    }

    /// `⌈C_P · d² · ln(1/δ_P) / target²⌉`, with `k·d` in place of `d²` under
    /// a rank promise.
    pub fn prover_queries(&self, target: f64) -> u64 {
        let size = match self.rank {
            Some(k) => (k * self.d) as f64,
            None => (self.d * self.d) as f64,
        };
        (self.c_p * size * (1.0 / self.delta_p).ln() / (target * target)).ceil() as u64
    }

    /// `⌈C_V · d · ln(1/δ_V) / ε²⌉`, with `k` in place of `d` under a rank
    /// promise.
    pub fn verifier_queries(&self) -> u64 {
        let size = self.rank.unwrap_or(self.d) as f64;
        (self.c_v * size * (1.0 / self.delta_v).ln() / (self.epsilon * self.epsilon)).ceil() as u64
    }

    /// Trace-norm accuracy an honest prover aims for.
    pub fn honest_target(&self) -> f64 {
        match self.mode {
            Mode::Ideal => self.prover_target,
            Mode::Sampled => SAMPLED_TARGET * self.epsilon / (self.d as f64).sqrt(),
        }
    }

    pub fn surrogate_threshold(&self) -> f64 {
        SURROGATE_THRESHOLD * self.epsilon * self.epsilon / self.d as f64
    }

    fn surrogate_accuracy(&self) -> f64 {
        SURROGATE_ACCURACY * self.epsilon * self.epsilon / self.d as f64
    }

    /// SWAP tests for `Tr ρ²`; each term may fail with probability `δ_V/2`.
    pub fn swap_tests(&self) -> u64 {
        let eta = self.surrogate_accuracy();
        (2.0 * (4.0 / self.delta_v).ln() / (eta * eta)).ceil() as u64
    }

    /// Single-copy shots for `Tr ρρ̂`.
    pub fn overlap_shots(&self) -> u64 {
        let eta = self.surrogate_accuracy();
        ((4.0 / self.delta_v).ln() / (2.0 * eta * eta)).ceil() as u64
    }
}

/// A classical description received from the prover, validated on receipt.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisState {
    pub matrix: DensityMatrix,
}

impl HypothesisState {
    pub fn receive(m: CMatrix) -> Result<Self> {
        Ok(Self {
            matrix: DensityMatrix::new(m)?,
        })
    }
}

impl Summary for HypothesisState {
    fn summary(&self) -> String {
        format!("rho_hat(d={}, purity={:.6})", self.matrix.dim(), purity(&self.matrix))
    }
}

/// Tomography with the prover's copies.
///
/// Ideal mode reads the state from a batch charged by the accounting formula
/// and moves it by a random trace-zero direction of trace norm at most
/// `target`. Sampled mode measures copies in Haar-random bases, inverts the
/// measurement channel, projects, and doubles the shot count until a
/// bootstrap quantile at level `1 - δ_P` falls below `target`.
pub fn prover_tomography(
    oracle: &CopyOracle,
    target: f64,
    params: &TomoParams,
    rng: &mut SimRng,
) -> std::result::Result<HypothesisState, HarnessError> {
    check_param("target", target, target > 0.0 && target < 1.0, "0 < target < 1")?;
    let matrix = match params.mode {
        Mode::Ideal => {
            let batch = oracle.query_batch("tomography", params.prover_queries(target))?;
            perturbed_estimate(batch.state(), target, params.rank, rng)?
        }
        Mode::Sampled => sampled_tomography(oracle, target, params.delta_p, rng)?,
    };
    Ok(HypothesisState { matrix })
}

fn perturbed_estimate(rho: &DensityMatrix, target: f64, rank: Option<usize>, rng: &mut SimRng) -> Result<DensityMatrix> {
    let d = rho.dim();
    let h = random_traceless_direction(d, rng);
    let mut t = target * rng.random_range(0.5..1.0);
    while t > 1e-12 {
        let mut est = DensityMatrix::project(&(rho.matrix() + h.scale(t)))?;
        if let Some(k) = rank {
            est = truncate_rank_k_normalized(&est, k)?;
        }
        if est.trace_distance(rho) <= target {
            return Ok(est);
        }
        t /= 2.0;
    }
    match rank {
        Some(k) => truncate_rank_k_normalized(rho, k),
        None => Ok(rho.clone()),
    }
}

const BOOTSTRAP_GROUPS: usize = 64;

/// Linear-inversion estimate `(d+1)·mean(|u⟩⟨u|) - 𝟙` from the summed
/// projectors of `n` measured basis vectors, projected to the nearest
/// density matrix.
fn shadow_estimate(sum: &CMatrix, n: usize) -> Result<DensityMatrix> {
    let d = sum.nrows();
    let mut raw = sum.scale((d as f64 + 1.0) / n.max(1) as f64);
    for i in 0..d {
        raw[(i, i)] -= C64::new(1.0, 0.0);
    }
    DensityMatrix::project(&raw)
}

/// Random-basis tomography with a doubling schedule. Shots are pooled into
/// fixed groups; the bootstrap resamples whole groups.
pub(crate) fn sampled_tomography(
    oracle: &CopyOracle,
    target: f64,
    delta_p: f64,
    rng: &mut SimRng,
) -> std::result::Result<DensityMatrix, HarnessError> {
    let d = oracle.dim();
    let mut groups = vec![CMatrix::zeros(d, d); BOOTSTRAP_GROUPS];
    let mut taken = 0usize;
    let mut total = 32 * d * d;
    loop {
        let batch = oracle.query_batch("tomography", (total - taken) as u64)?;
        while taken < total {
            let u = sample_haar_unitary(d, rng);
            let probs = basis_probabilities(batch.state(), &u)?;
            let col = u.matrix().column(sample_index(&probs, rng)).into_owned();
            groups[taken % BOOTSTRAP_GROUPS] += &col * col.adjoint();
            taken += 1;
        }
        let sum = groups.iter().fold(CMatrix::zeros(d, d), |acc, g| acc + g);
        let est = shadow_estimate(&sum, total)?;
        let per_group = total / BOOTSTRAP_GROUPS;
        let mut spread: Vec<f64> = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let mut resum = CMatrix::zeros(d, d);
            for _ in 0..BOOTSTRAP_GROUPS {
                resum += &groups[rng.random_range(0..BOOTSTRAP_GROUPS)];
            }
            spread.push(shadow_estimate(&resum, per_group * BOOTSTRAP_GROUPS)?.trace_distance(&est));
        }
        spread.sort_by(f64::total_cmp);
        let level = ((1.0 - delta_p) * BOOTSTRAP_RESAMPLES as f64).ceil() as usize;
        let quantile = spread[level.clamp(1, BOOTSTRAP_RESAMPLES) - 1];
        if quantile <= target || total >= MAX_TOMOGRAPHY_SHOTS {
            return Ok(est);
        }
        total *= 2;
    }
}

/// How a prover interferes with the delegated certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tamper {
    None,
    /// Reports the opposite of the faithful outcome.
    Flip,
    /// Reports "close" whatever the outcome.
    ForceClose,
}

impl Tamper {
    fn apply(self, close: bool) -> bool {
        match self {
            Tamper::None => close,
            Tamper::Flip => !close,
            Tamper::ForceClose => true,
        }
    }
}

/// Decides `‖ρ - ρ̂‖₁ ≤ 0.99ε` versus `> ε`. Returns `None` when the
/// delegation trap check fires.
pub fn certify_closeness(
    s: &mut Session,
    hyp: &HypothesisState,
    params: &TomoParams,
    tamper: Tamper,
) -> std::result::Result<Option<bool>, HarnessError> {
    let contract = Delegation::new(params.delta)?;
    match params.mode {
        Mode::Ideal => {
            let (eps, delta_v) = (params.epsilon, params.delta_v);
            let decide = |rho: &DensityMatrix, rng: &mut SimRng| {
                let dist = rho.trace_distance(&hyp.matrix);
                if dist <= PROVER_FRACTION * eps {
                    !rng.random_bool(delta_v)
                } else if dist > eps {
                    rng.random_bool(delta_v)
                } else {
                    rng.random_bool(0.5)
                }
            };
            let flip = move |c: bool| tamper.apply(c);
            let hook: Option<&dyn Fn(bool) -> bool> = (tamper != Tamper::None).then_some(&flip);
            delegated_measure(s, &contract, "certification", params.verifier_queries(), decide, hook)
        }
        Mode::Sampled => certify_sampled(s, hyp, params, &contract, tamper),
    }
}

/// Surrogate test on `D̂₂² = T̂r ρ² + Tr ρ̂² - 2·T̂r ρρ̂`.
fn certify_sampled(
    s: &mut Session,
    hyp: &HypothesisState,
    params: &TomoParams,
    contract: &Delegation,
    tamper: Tamper,
) -> std::result::Result<Option<bool>, HarnessError> {
    let spectrum = eig_sorted(hyp.matrix.matrix())?;
    let shots = params.overlap_shots();
    let counts = s.verifier.measure_each("overlap", shots, |rho, n| {
        basis_probabilities(rho, &spectrum.basis).map(|probs| multinomial_counts(n, &probs, &mut s.v_rng))
    })??;
    let total: f64 = counts.iter().zip(&spectrum.values).map(|(&c, &v)| c as f64 * v).sum();
    let overlap = total / shots as f64;
    let hyp_purity = purity(&hyp.matrix);
    let threshold = params.surrogate_threshold();
    let statistic = |pur: f64| pur + hyp_purity - 2.0 * overlap;

    let tests = params.swap_tests();
    let estimate_purity = move |rho: &DensityMatrix, rng: &mut SimRng| {
        let p = swap_accept_probability(rho, rho).unwrap_or(1.0).clamp(0.0, 1.0);
        let accepts = Binomial::new(tests, p).map(|b| b.sample(rng)).unwrap_or(tests);
        2.0 * accepts as f64 / tests as f64 - 1.0
    };
    let reshape = move |pur: f64| {
        let close = statistic(pur) <= threshold;
        if tamper.apply(close) == close {
            pur
        } else if close {
            threshold + 2.0 * overlap - hyp_purity + 1.0
        } else {
            2.0 * overlap - hyp_purity
        }
    };
    let hook: Option<&dyn Fn(f64) -> f64> = (tamper != Tamper::None).then_some(&reshape);
    let estimate = delegated_measure(s, contract, "swap_test", 2 * tests, estimate_purity, hook)?;
    Ok(estimate.map(|pur| {
        let stat = statistic(pur);
        s.stat("surrogate_statistic", stat);
        stat <= threshold
    }))
}

/// Final decision from the certification outcome.
pub fn tomography_verdict(certification: Option<bool>, hyp: HypothesisState) -> Verdict<HypothesisState> {
    match certification {
        None => Verdict::Aborted("delegation trap check failed".into()),
        Some(false) => Verdict::Aborted("hypothesis certified far".into()),
        Some(true) => Verdict::Accepted(hyp),
    }
}

/// Ground truth for the judge.
pub fn tomography_valid(rho: &DensityMatrix, out: &HypothesisState, epsilon: f64) -> bool {
    rho.trace_distance(&out.matrix) <= epsilon
}

pub trait TomoProver: ProverStrategy + Send {
    /// The matrix sent to the verifier; it need not be a valid state.
    fn hypothesis(&mut self, oracle: &CopyOracle, params: &TomoParams, rng: &mut SimRng) -> std::result::Result<CMatrix, HarnessError>;

    fn tamper(&self) -> Tamper {
        Tamper::None
    }
}

pub struct TomoIp {
    pub params: TomoParams,
}

impl TomoIp {
    pub fn new(params: TomoParams) -> Self {
        Self { params }
    }
}

impl Protocol for TomoIp {
    type Prover = dyn TomoProver;
    type Output = HypothesisState;

    fn name(&self) -> &'static str {
        "tomo"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Quantum
    }

    fn execute(&self, s: &mut Session, prover: &mut Self::Prover) -> std::result::Result<Verdict<HypothesisState>, HarnessError> {
        s.channel.next_round();
        let m = prover.hypothesis(&s.prover, &self.params, &mut s.p_rng)?;
        if m.nrows() != self.params.d || m.ncols() != self.params.d {
            return Ok(Verdict::Aborted("hypothesis has the wrong shape".into()));
        }
        s.channel.send_structured(Direction::ProverToVerifier, "hypothesis", &wire::matrix(&m));
        let hyp = match HypothesisState::receive(m) {
            Ok(h) => h,
            Err(e) => return Ok(Verdict::Aborted(format!("invalid hypothesis: {e}"))),
        };
        s.channel.next_round();
        let outcome = certify_closeness(s, &hyp, &self.params, prover.tamper())?;
        Ok(tomography_verdict(outcome, hyp))
    }
}

// ---------------------------------------------------------------------------
// Provers
// ---------------------------------------------------------------------------

pub struct HonestTomoProver;

impl ProverStrategy for HonestTomoProver {
    fn name(&self) -> String {
        "honest".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Honest
    }
}

impl TomoProver for HonestTomoProver {
    fn hypothesis(&mut self, oracle: &CopyOracle, params: &TomoParams, rng: &mut SimRng) -> std::result::Result<CMatrix, HarnessError> {
        Ok(prover_tomography(oracle, params.honest_target(), params, rng)?.matrix.matrix().clone())
    }
}

pub struct MaximallyMixedProver;

impl ProverStrategy for MaximallyMixedProver {
    fn name(&self) -> String {
        "maximally_mixed".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("sends the maximally mixed state".into())
    }
}

impl TomoProver for MaximallyMixedProver {
    fn hypothesis(&mut self, _: &CopyOracle, params: &TomoParams, _: &mut SimRng) -> std::result::Result<CMatrix, HarnessError> {
        Ok(DensityMatrix::maximally_mixed(params.d).matrix().clone())
    }
}

/// Sends `ρ + λ(σ - ρ)` for a random pure `σ`, with `λ` set so that the
/// trace-norm distance is exactly `1.5ε`.
pub struct FarHypothesis {
    pub tamper: Tamper,
}

impl ProverStrategy for FarHypothesis {
    fn name(&self) -> String {
        match self.tamper {
            Tamper::ForceClose => "far_tamper".into(),
            _ => "far".into(),
        }
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("sends a hypothesis at distance 1.5 epsilon".into())
    }
}

impl TomoProver for FarHypothesis {
    fn hypothesis(&mut self, oracle: &CopyOracle, params: &TomoParams, rng: &mut SimRng) -> std::result::Result<CMatrix, HarnessError> {
        let batch = oracle.query_batch("tomography", params.prover_queries(params.prover_target))?;
        let rho = batch.state();
        let want = 1.5 * params.epsilon;
        loop {
            let sigma = sample_haar_state(params.d, rng).to_density();
            let gap = sigma.trace_distance(rho);
            if gap >= want {
                let lambda = want / gap;
                return Ok(rho.matrix() + (sigma.matrix() - rho.matrix()).scale(lambda));
            }
        }
    }

    fn tamper(&self) -> Tamper {
        self.tamper
    }
}

/// Honest hypothesis, but reports the opposite certification outcome.
pub struct TamperingProver;

impl ProverStrategy for TamperingProver {
    fn name(&self) -> String {
        "tamper".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Adversarial("tampers with the delegated certification".into())
    }
}

impl TomoProver for TamperingProver {
    fn hypothesis(&mut self, oracle: &CopyOracle, params: &TomoParams, rng: &mut SimRng) -> std::result::Result<CMatrix, HarnessError> {
        HonestTomoProver.hypothesis(oracle, params, rng)
    }

    fn tamper(&self) -> Tamper {
        Tamper::Flip
    }
}

/// Built-in prover by name.
pub fn tomo_prover(name: &str) -> Option<Box<dyn TomoProver>> {
    Some(match name {
        "honest" => Box::new(HonestTomoProver),
        "maximally_mixed" => Box::new(MaximallyMixedProver),
        "far" => Box::new(FarHypothesis { tamper: Tamper::None }),
        "far_tamper" => Box::new(FarHypothesis { tamper: Tamper::ForceClose }),
        "tamper" => Box::new(TamperingProver),
        _ => return None,
    })
}

pub const TOMO_ADVERSARIES: [&str; 4] = ["maximally_mixed", "far", "tamper", "far_tamper"];
