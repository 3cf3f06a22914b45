//! Sum-check over the Boolean cube `{0,1}^b`.
//!
//! In round `j` the prover sends the univariate restriction `s_j` of the
//! summand on nodes `0..=deg`; the verifier checks `s_j(0) + s_j(1)` against
//! the running claim and replaces the claim by `s_j(r_j)`. Challenges are
//! drawn by the verifier before the stream so that it can maintain the
//! final evaluation point while streaming; each is revealed only after the
//! matching round message. Variable `j` is bit `j` of the cube index.

use super::field::Fq;
use super::MemoryMeter;

/// Coefficients, lowest degree first, of `Π (y - root)`.
pub fn poly_from_roots(roots: impl IntoIterator<Item = Fq>) -> Vec<Fq> {
    let mut c = vec![Fq::ONE];
    for root in roots {
        let mut next = vec![Fq::ZERO; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * root;
        }
        c = next;
    }
    c
}

pub fn horner(coeffs: &[Fq], y: Fq) -> Fq {
    coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| acc * y + c)
}

/// Coefficients of the degree-`cap` interpolant of `h(1) = 1`, `h(j) = 0`
/// for the other nodes `0..=cap`.
pub fn unique_indicator_coeffs(cap: usize) -> Vec<Fq> {
    let roots = (0..=cap as u64).filter(|&j| j != 1).map(Fq::new);
    let scale = (0..=cap as i64).filter(|&j| j != 1).fold(Fq::ONE, |acc, j| acc * Fq::from_i64(1 - j));
    let inv = scale.inverse();
    poly_from_roots(roots).into_iter().map(|c| c * inv).collect()
}

/// Coefficients of `Π_{j=0}^{cap} (y - j)`.
pub fn vanishing_coeffs(cap: usize) -> Vec<Fq> {
    poly_from_roots((0..=cap as u64).map(Fq::new))
}

/// Value at `t` of the polynomial of degree `< m` taking `values[i]` at node
/// `i`. Barycentric form, consuming the values in order with `O(1)` extra
/// state.
pub fn lagrange_eval(values: impl ExactSizeIterator<Item = Fq>, t: Fq) -> Fq {
    let m = values.len() as u64;
    if m == 0 {
        return Fq::ZERO;
    }
    if t.value() < m {
        let target = t.value() as usize;
        return values.into_iter().nth(target).unwrap_or(Fq::ZERO);
    }
    let ell = (0..m).fold(Fq::ONE, |acc, l| acc * (t - Fq::new(l)));
    // w_0 = 1 / ((-1)^{m-1} (m-1)!)
    let fact = (1..m).fold(Fq::ONE, |acc, l| acc * Fq::new(l));
    let mut w = if (m - 1).is_multiple_of(2) { fact.inverse() } else { -fact.inverse() };
    let mut acc = Fq::ZERO;
    for (i, v) in values.enumerate() {
        let i = i as u64;
        acc += v * w * (t - Fq::new(i)).inverse();
        // w_{i+1} = -w_i (m-1-i) / (i+1)
        if i + 1 < m {
            w = -(w * Fq::new(m - 1 - i)) * Fq::new(i + 1).inverse();
        }
    }
    ell * acc
}

/// `h̃(t)` from the node values `h(0), …, h(D)`.
pub fn lagrange_h_eval(h: &[Fq], t: Fq) -> Fq {
    lagrange_eval(h.iter().copied(), t)
}

/// `eq(x, ζ) = Π_j (x_j ζ_j + (1 - x_j)(1 - ζ_j))` at a point `x`.
pub fn eq_eval(x: &[Fq], zeta: &[Fq]) -> Fq {
    x.iter()
        .zip(zeta)
        .fold(Fq::ONE, |acc, (&a, &z)| acc * (a * z + (Fq::ONE - a) * (Fq::ONE - z)))
}

/// `eq(x, ζ)` at every cube point, index bit `j` giving `x_j`.
pub fn eq_table(zeta: &[Fq]) -> Vec<Fq> {
    let mut t = vec![Fq::ONE];
    for &z in zeta {
        let mut next = Vec::with_capacity(2 * t.len());
        next.extend(t.iter().map(|&v| v * (Fq::ONE - z)));
        next.extend(t.iter().map(|&v| v * z));
        t = next;
    }
    t
}

/// Prover side of one sum-check.
pub trait SumcheckProver: Send {
    /// The restriction to the next free variable, on nodes `0..=degree`.
    fn round(&mut self) -> Vec<Fq>;

    /// Fixes that variable to the revealed challenge.
    fn bind(&mut self, r: Fq);
}

/// Combining polynomial `F` evaluated on one row of table entries.
pub type Combine = Box<dyn Fn(&[Fq]) -> Fq + Send>;

/// Honest prover for `Σ_x F(T₁(x), …, T_m(x))` with multilinear tables
/// `Tᵢ`.
pub struct CubeProver {
    tables: Vec<Vec<Fq>>,
    degree: usize,
    combine: Combine,
    /// When set, pairs whose entries are all zero contribute nothing.
    zero_is_zero: bool,
}

impl CubeProver {
    pub fn new(tables: Vec<Vec<Fq>>, degree: usize, combine: Combine, zero_is_zero: bool) -> Self {
        Self {
            tables,
            degree,
            combine,
            zero_is_zero,
        }
    }

    /// `Σ_x F(T(x))` over the current tables.
    pub fn total(&self) -> Fq {
        let len = self.tables.first().map_or(0, Vec::len);
        let mut buf = vec![Fq::ZERO; self.tables.len()];
        (0..len)
            .map(|x| {
                for (b, t) in buf.iter_mut().zip(&self.tables) {
                    *b = t[x];
                }
                (self.combine)(&buf)
            })
            .sum()
    }
}

impl SumcheckProver for CubeProver {
    fn round(&mut self) -> Vec<Fq> {
        let m = self.tables.len();
        let half = self.tables.first().map_or(0, Vec::len) / 2;
        let mut out = vec![Fq::ZERO; self.degree + 1];
        let mut point = vec![Fq::ZERO; m];
        let mut step = vec![Fq::ZERO; m];
        for pair in 0..half {
            if self.zero_is_zero && self.tables.iter().all(|t| t[2 * pair] == Fq::ZERO && t[2 * pair + 1] == Fq::ZERO) {
                continue;
            }
            for (i, t) in self.tables.iter().enumerate() {
                point[i] = t[2 * pair];
                step[i] = t[2 * pair + 1] - t[2 * pair];
            }
            for o in out.iter_mut() {
                *o += (self.combine)(&point);
                for (p, s) in point.iter_mut().zip(&step) {
                    *p += *s;
                }
            }
        }
        out
    }

    fn bind(&mut self, r: Fq) {
        for t in &mut self.tables {
            let half = t.len() / 2;
            for i in 0..half {
                let (a, b) = (t[2 * i], t[2 * i + 1]);
                t[i] = a + r * (b - a);
            }
            t.truncate(half);
        }
    }
}

/// Wraps a prover so that its messages stay consistent with a false
/// running claim: each round polynomial is shifted by the constant that
/// makes `s(0) + s(1)` equal the claim.
pub struct ShiftingProver<P> {
    inner: P,
    claim: Fq,
    last: Vec<Fq>,
}

impl<P: SumcheckProver> ShiftingProver<P> {
    pub fn new(inner: P, claim: Fq) -> Self {
        Self {
            inner,
            claim,
            last: Vec::new(),
        }
    }
}

impl<P: SumcheckProver> SumcheckProver for ShiftingProver<P> {
    fn round(&mut self) -> Vec<Fq> {
        let honest = self.inner.round();
        let sum = honest.first().copied().unwrap_or_default() + honest.get(1).copied().unwrap_or_default();
        let shift = (self.claim - sum) * Fq::new(2).inverse();
        self.last = honest.into_iter().map(|v| v + shift).collect();
        self.last.clone()
    }

    fn bind(&mut self, r: Fq) {
        self.claim = lagrange_eval(self.last.iter().copied(), r);
        self.inner.bind(r);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumcheckOutcome {
    Verified,
    Rejected { round: usize, reason: String },
}

impl SumcheckOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, SumcheckOutcome::Verified)
    }
}

/// Verifier side. `messages` delivers each round polynomial after the
/// previous challenge was revealed; `final_value` evaluates the summand at
/// the full challenge vector from the verifier's own state.
pub fn run_sumcheck(
    claim: Fq,
    degree: usize,
    challenges: &[Fq],
    mut messages: impl FnMut(usize, Option<Fq>) -> Vec<Fq>,
    final_value: impl FnOnce() -> Fq,
    memory: &mut MemoryMeter,
) -> SumcheckOutcome {
    let mut claim = claim;
    let mut revealed = None;
    for (j, &r) in challenges.iter().enumerate() {
        let msg = messages(j, revealed);
        // Running claim, streamed node value, s(0)+s(1), and the three
        // barycentric accumulators.
        memory.scratch(6);
        if msg.len() != degree + 1 {
            return SumcheckOutcome::Rejected {
                round: j,
                reason: format!("round message has {} evaluations, expected {}", msg.len(), degree + 1),
            };
        }
        if msg[0] + msg[1] != claim {
            return SumcheckOutcome::Rejected {
                round: j,
                reason: "round sum does not match the running claim".into(),
            };
        }
        claim = lagrange_eval(msg.into_iter(), r);
        revealed = Some(r);
    }
    memory.scratch(4);
    if final_value() == claim {
        SumcheckOutcome::Verified
    } else {
        SumcheckOutcome::Rejected {
            round: challenges.len(),
            reason: "final evaluation does not match".into(),
        }
    }
}
