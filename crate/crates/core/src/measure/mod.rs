//! Measurement and sampling primitives.
//!
//! All outcome laws are computed exactly from the classical description of
//! the state and then sampled; nothing is emulated at gate level.

mod clifford;
mod pauli;

pub use clifford::{sample_uniform_clifford, sample_uniform_symplectic, SignedPauli, MAX_CLIFFORD_QUBITS};
pub use pauli::{characteristic_distribution, pauli_expectations, PauliLabel, MAX_PAULI_QUBITS};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, max_abs, trace_product_re, CMatrix, DensityMatrix, PureState, UnitaryOp};

/// Which measurement produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BasisTag {
    Computational,
    Rotated,
    Projector,
    Swap,
    BellDifference,
    PauliMoment,
}

/// A classical measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct MeasurementOutcome {
    pub value: u64,
    pub basis_tag: BasisTag,
}

/// Number of qubits for a power-of-two dimension.
pub fn qubits_of(d: usize) -> Result<usize> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::NotQubitDimension(d));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Draws an index from a probability vector. Mass lost to rounding falls on
/// the last index with positive weight.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Bernoulli draw with the probability clamped into `[0, 1]`.
pub fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random_bool(p.clamp(0.0, 1.0))
}

/// Ideal-mode stand-in for an estimator with accuracy `acc` at confidence
/// `1 - delta`: the exact value plus Gaussian noise of standard deviation
/// `acc / √(2 ln(2/δ))`, clipped to `±acc`.
pub fn ideal_estimate<R: Rng + ?Sized>(exact: f64, acc: f64, delta: f64, rng: &mut R) -> f64 {
    let sigma = acc / (2.0 * (2.0 / delta).ln()).sqrt();
    let z: f64 = rng.sample(rand_distr::StandardNormal);
    exact + (sigma * z).clamp(-acc, acc)
}

/// Precomputed cumulative table for repeated categorical draws.
#[derive(Debug, Clone)]
pub struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|&p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1)
    }
}

/// Outcome counts of `n` independent draws from `probs`, by sequential
/// conditional binomials.
pub fn multinomial_counts<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = n;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 || mass <= 0.0 {
            break;
        }
        let p = p.max(0.0);
        let c = if i + 1 == probs.len() || p >= mass {
            left
        } else {
            rand_distr::Binomial::new(left, (p / mass).clamp(0.0, 1.0))
                .map(|b| rng.sample(b))
                .unwrap_or(0)
        };
        counts[i] = c;
        left -= c;
        mass -= p;
    }
    if left > 0 {
        if let Some(i) = probs.iter().rposition(|&p| p > 0.0) {
            counts[i] += left;
        }
    }
    counts
}

/// Outcome law `⟨i|U†ρU|i⟩` of measuring `ρ` in the basis given by the
/// columns of `U`.
pub fn basis_probabilities(rho: &DensityMatrix, u: &UnitaryOp) -> Result<Vec<f64>> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: u.dim(),
        });
    }
    let um = u.matrix();
    let rho_u = rho.matrix() * um;
    let d = rho.dim();
    let probs: Vec<f64> = (0..d).map(|i| um.column(i).dotc(&rho_u.column(i)).re.max(0.0)).collect();
    Ok(probs)
}

pub fn measure_in_basis<R: Rng + ?Sized>(rho: &DensityMatrix, u: &UnitaryOp, rng: &mut R) -> Result<usize> {
    Ok(sample_index(&basis_probabilities(rho, u)?, rng))
}

/// Checks `Π² = Π = Π†` within 1e-8.
pub fn check_projector(pi: &CMatrix) -> Result<()> {
    if pi.nrows() != pi.ncols() {
        return Err(Error::NotSquare {
            rows: pi.nrows(),
            cols: pi.ncols(),
        });
    }
    let herm = hermitian_deviation(pi);
    let idem = max_abs(&(pi * pi - pi));
    let r = herm.max(idem);
    if r > 1e-8 {
        return Err(Error::NotProjector(r));
    }
    Ok(())
}

/// Measures `{Π, 𝟙 - Π}`; `true` for the `Π` outcome.
pub fn two_outcome_measure<R: Rng + ?Sized>(rho: &DensityMatrix, pi: &CMatrix, rng: &mut R) -> Result<bool> {
    check_projector(pi)?;
    if pi.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: pi.nrows(),
        });
    }
    Ok(bernoulli(trace_product_re(pi, rho.matrix()), rng))
}

/// Acceptance probability `(1 + Tr[ρσ]) / 2` of the SWAP test.
pub fn swap_accept_probability(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok((1.0 + rho.overlap(sigma)) / 2.0)
}

/// SWAP test on one copy of each state; `true` means accept.
pub fn swap_test<R: Rng + ?Sized>(rho: &DensityMatrix, sigma: &DensityMatrix, rng: &mut R) -> Result<bool> {
    Ok(bernoulli(swap_accept_probability(rho, sigma)?, rng))
}

/// Exact-law sampler for Bell-difference labels and two-copy Pauli moments
/// of a fixed pure state.
#[derive(Debug, Clone)]
pub struct BellSampler {
    n: usize,
    expectations: Vec<f64>,
    characteristic: Categorical,
}

impl BellSampler {
    pub fn new(psi: &PureState) -> Result<Self> {
        let expectations = pauli_expectations(psi)?;
        let n = qubits_of(psi.dim())?;
        let scale = 1.0 / psi.dim() as f64;
        let p: Vec<f64> = expectations.iter().map(|e| e * e * scale).collect();
        Ok(Self {
            n,
            expectations,
            characteristic: Categorical::new(&p),
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// `⟨ψ|W_x|ψ⟩`.
    pub fn expectation(&self, x: PauliLabel) -> f64 {
        self.expectations[x.index()]
    }

    /// One draw from the characteristic distribution `p(a) = 2⁻ⁿ⟨W_a⟩²`.
    pub fn sample_characteristic<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliLabel {
        PauliLabel::from_index(self.n, self.characteristic.sample(rng))
    }

    /// Bell-difference label: XOR of two characteristic draws. Consumes
    /// four copies in the physical procedure.
    pub fn bell_difference<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliLabel {
        let a = self.sample_characteristic(rng);
        let b = self.sample_characteristic(rng);
        a.xor(b)
    }

    /// Measures `W_x` on two fresh copies and reports whether the ±1
    /// outcomes agree. The mean is `(⟨W_x⟩² + 1) / 2`.
    pub fn pauli_moment<R: Rng + ?Sized>(&self, x: PauliLabel, rng: &mut R) -> bool {
        let p_plus = (1.0 + self.expectation(x)) / 2.0;
        let z1 = bernoulli(p_plus, rng);
        let z2 = bernoulli(p_plus, rng);
        z1 == z2
    }
}

pub fn bell_difference_sample<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> Result<PauliLabel> {
    Ok(BellSampler::new(psi)?.bell_difference(rng))
}

pub fn pauli_moment_sample<R: Rng + ?Sized>(psi: &PureState, x: PauliLabel, rng: &mut R) -> Result<bool> {
    let n = qubits_of(psi.dim())?;
    if x.qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.qubits(),
        });
    }
    let e = x.expectation(psi)?;
    let p_plus = (1.0 + e) / 2.0;
    Ok(bernoulli(p_plus, rng) == bernoulli(p_plus, rng))
}

/// Exact Bell-difference law `q(x) = Σ_a p(a) p(a ⊕ x)`.
pub fn bell_difference_distribution(psi: &PureState) -> Result<Vec<f64>> {
    let p = characteristic_distribution(psi)?;
    let m = p.len();
    Ok((0..m).map(|x| (0..m).map(|a| p[a] * p[a ^ x]).sum()).collect())
}

#[cfg(test)]
mod tests;
