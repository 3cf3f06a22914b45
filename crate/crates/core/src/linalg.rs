//! Dense complex linear algebra over small Hilbert spaces.
//!
//! Everything here is a pure function of its inputs (plus an explicit
//! generator handle for the samplers). Matrices are `nalgebra` dense
//! matrices of `Complex64`; the protocols never exceed dimension 64, so no
//! sparse or tensor-network backend is needed.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Entry-wise tolerance for state invariants (Hermiticity, trace, normalization).
pub const STATE_TOL: f64 = 1e-10;
/// Max-entry tolerance on `U U† - I`.
pub const UNITARY_TOL: f64 = 1e-9;
/// Max-entry tolerance for eigen-reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 1 << 10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Largest entry-wise deviation of `m` from `m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Re Tr[A B] without forming the product.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let v = CVector::from_vec(amps);
        let n2 = v.norm_squared();
        if v.is_empty() || (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps: v })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let n = amps.norm();
        if amps.is_empty() || n < 1e-300 {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(Self { amps: amps.unscale(n) })
    }

    /// Computational basis state `|i⟩` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut amps = CVector::zeros(d);
        amps[i] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            m: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn apply(&self, u: &UnitaryOp) -> PureState {
        PureState { amps: &u.m * &self.amps }
    }

    /// Extracts the state vector of a rank-one density matrix.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let p = purity(rho);
        if (p - 1.0).abs() > 1e-9 {
            return Err(Error::NotPure(p));
        }
        let spec = eig_sorted(&rho.m)?;
        let col = spec.basis.m.column(0).into_owned();
        PureState::normalized(col)
    }
}

/// A valid density operator: Hermitian, PSD, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix. Tiny anti-Hermitian noise below the
    /// tolerance is symmetrized away.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let dev = hermitian_deviation(&m);
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let m = hermitian_part(&m);
        let tr = trace_re(&m);
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min_ev = min_eigenvalue(&m);
        if min_ev < -STATE_TOL {
            return Err(Error::NotPsd(min_ev));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix the caller has constructed to be a valid state.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m: hermitian_part(&m) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            m: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    /// `diag(values)`; the values must form a probability vector.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        let m = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO });
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &UnitaryOp) -> DensityMatrix {
        DensityMatrix::from_trusted(&u.m * &self.m * u.m.adjoint())
    }

    /// `Re Tr[ρ σ]`.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        trace_product_re(&self.m, &other.m)
    }

    /// `Re Tr[A ρ]`.
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        trace_product_re(a, &self.m)
    }

    /// `‖ρ - σ‖₁` (the full Schatten-1 norm, not half of it).
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        hermitian_schatten(&(&self.m - &other.m), 1.0)
    }

    /// Nearest density matrix in Frobenius norm to the Hermitian part of `h`
    /// (eigenvalues projected onto the probability simplex).
    pub fn project(h: &CMatrix) -> Result<DensityMatrix> {
        let spec = eig_sorted(&hermitian_part(h))?;
        let vals = project_simplex(&spec.values);
        Ok(DensityMatrix::from_trusted(spec.basis.reconstruct_with(&vals)))
    }
}

/// A positive semidefinite operator with trace in `[0, 1]`, e.g. a rank-k
/// truncation of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct SubnormalizedPsd {
    m: CMatrix,
}

impl SubnormalizedPsd {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let dev = hermitian_deviation(&m);
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let m = hermitian_part(&m);
        let tr = trace_re(&m);
        if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&tr) {
            return Err(Error::InvalidTrace(tr));
        }
        let min_ev = min_eigenvalue(&m);
        if min_ev < -STATE_TOL {
            return Err(Error::NotPsd(min_ev));
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.m)
    }

    /// Divides by the trace.
    pub fn normalized(&self) -> Result<DensityMatrix> {
        let tr = self.trace();
        if tr <= 1e-12 {
            return Err(Error::ZeroTrace(tr));
        }
        Ok(DensityMatrix::from_trusted(self.m.unscale(tr)))
    }
}

/// A unitary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    m: CMatrix,
}

impl UnitaryOp {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let r = unitarity_residual(&m);
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn identity(d: usize) -> Self {
        Self { m: CMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn adjoint(&self) -> UnitaryOp {
        UnitaryOp { m: self.m.adjoint() }
    }

    pub fn compose(&self, after: &UnitaryOp) -> UnitaryOp {
        UnitaryOp { m: &after.m * &self.m }
    }

    /// `U diag(values) U†`.
    pub fn reconstruct_with(&self, values: &[f64]) -> CMatrix {
        let d = self.dim();
        let mut scaled = self.m.clone();
        for j in 0..d {
            let v = values.get(j).copied().unwrap_or(0.0);
            scaled.column_mut(j).scale_mut(v);
        }
        scaled * self.m.adjoint()
    }
}

/// `max |U U† - I|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let d = m.nrows();
    max_abs(&(m * m.adjoint() - CMatrix::identity(d, d)))
}

/// Eigenvalues in non-increasing order with matching eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub basis: UnitaryOp,
}

impl Spectrum {
    /// `U diag(values) U†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.basis.reconstruct_with(&self.values)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Singular values in non-increasing order.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    check_square(a)?;
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

fn norm_of(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 1.0 {
        values.sum()
    } else if p == 2.0 {
        values.map(|s| s * s).sum::<f64>().sqrt()
    } else {
        values.map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Schatten p-norm `(Σ sᵢᵖ)^{1/p}` over singular values; `p = f64::INFINITY`
/// gives the operator norm.
pub fn schatten_norm(a: &CMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Parameter {
            name: "p",
            value: p,
            expected: "p in [1, inf]",
        });
    }
    let s = singular_values(a)?;
    Ok(norm_of(s.into_iter(), p))
}

/// Schatten norm of a Hermitian matrix from its eigenvalues (faster than SVD).
pub(crate) fn hermitian_schatten(h: &CMatrix, p: f64) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(h));
    norm_of(eig.eigenvalues.iter().map(|v| v.abs()), p)
}

/// Norm of a real vector viewed as a diagonal matrix.
pub fn diag_schatten(values: &[f64], p: f64) -> f64 {
    norm_of(values.iter().map(|v| v.abs()), p)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), psi.dim())?;
    let v = &rho.m * &psi.amps;
    Ok(psi.amps.dotc(&v).re.clamp(0.0, 1.0))
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.m.iter().map(|z| z.norm_sqr()).sum()
}

fn min_eigenvalue(h: &CMatrix) -> f64 {
    SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues non-increasing.
pub fn eig_sorted(h: &CMatrix) -> Result<Spectrum> {
    let d = check_square(h)?;
    let dev = hermitian_deviation(h);
    if dev > RECONSTRUCTION_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let basis = CMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum {
        values,
        basis: UnitaryOp::from_trusted(basis),
    })
}

/// Keeps the `k` largest eigenvalues of `ρ` and zeroes the rest.
pub fn truncate_rank_k(rho: &DensityMatrix, k: usize) -> Result<SubnormalizedPsd> {
    let d = rho.dim();
    if k == 0 || k > d {
        return Err(Error::RankOutOfRange { k, d });
    }
    let spec = eig_sorted(&rho.m)?;
    let vals: Vec<f64> = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < k { v.max(0.0) } else { 0.0 })
        .collect();
    Ok(SubnormalizedPsd {
        m: hermitian_part(&spec.basis.reconstruct_with(&vals)),
    })
}

/// Rank-k truncation divided by its trace.
pub fn truncate_rank_k_normalized(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    truncate_rank_k(rho, k)?.normalized()
}

/// Euclidean projection onto the probability simplex, preserving order.
pub fn project_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (j as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    values.iter().map(|&v| (v - theta).max(0.0)).collect()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // Column-major fill order keeps the draw sequence stable across versions.
    let mut m = CMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            m[(r, c)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOp {
    let g = ginibre(d, d, rng);
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryOp::from_trusted(q)
}

/// Haar-random pure state.
pub fn sample_haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let v = ginibre(d, 1, rng).column(0).into_owned();
    PureState::normalized(v).expect("Gaussian vector is non-zero almost surely")
}

/// Random state of the given rank: Haar pure for rank 1, otherwise a
/// normalized complex Wishart matrix `G G†` with `G` of shape `d x rank`.
pub fn sample_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::RankOutOfRange { k: rank, d });
    }
    if rank == 1 {
        return Ok(sample_haar_state(d, rng).to_density());
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr = trace_re(&w);
    Ok(DensityMatrix::from_trusted(w.unscale(tr)))
}

/// Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    hermitian_part(&ginibre(d, d, rng))
}

/// Trace-zero Hermitian direction with unit trace norm.
pub fn random_traceless_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut h = random_hermitian(d, rng);
    let shift = trace_re(&h) / d as f64;
    for i in 0..d {
        h[(i, i)] -= C64::new(shift, 0.0);
    }
    let n = hermitian_schatten(&h, 1.0);
    h.unscale(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn schatten_of_diagonal_example() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3.0), c(4.0)]));
        assert!((schatten_norm(&a, 1.0).unwrap() - 7.0).abs() < 1e-12);
        assert!((schatten_norm(&a, 2.0).unwrap() - 5.0).abs() < 1e-12);
        assert!((schatten_norm(&a, f64::INFINITY).unwrap() - 4.0).abs() < 1e-12);
        assert!(schatten_norm(&a, 0.5).is_err());
    }

    #[test]
    fn fidelity_and_purity_examples() {
        let plus = PureState::new(vec![c(0.5f64.sqrt()), c(0.5f64.sqrt())]).unwrap();
        let zero = PureState::basis(2, 0).to_density();
        assert!((fidelity_pure(&plus, &zero).unwrap() - 0.5).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((purity(&mixed) - 0.25).abs() < 1e-12);
        assert!(fidelity_pure(&plus, &mixed).is_err());
    }

    #[test]
    fn truncation_example() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let t = truncate_rank_k(&rho, 2).unwrap();
        assert!((t.trace() - 0.8).abs() < 1e-12);
        let n = truncate_rank_k_normalized(&rho, 2).unwrap();
        let want = DensityMatrix::diagonal(&[0.625, 0.375, 0.0]).unwrap();
        assert!(max_abs(&(n.matrix() - want.matrix())) < 1e-12);
        assert!(truncate_rank_k(&rho, 0).is_err());
        assert!(truncate_rank_k(&rho, 4).is_err());
    }

    #[test]
    fn full_rank_truncation_is_identity() {
        let mut rng = rng_from_seed(21);
        let rho = sample_state(6, 6, &mut rng).unwrap();
        let t = truncate_rank_k(&rho, 6).unwrap();
        assert!(max_abs(&(t.matrix() - rho.matrix())) < 1e-10);
    }

    #[test]
    fn trace_distance_extremes() {
        let a = PureState::basis(2, 0).to_density();
        let b = PureState::basis(2, 1).to_density();
        assert!((a.trace_distance(&b) - 2.0).abs() < 1e-12);
        assert!(schatten_norm(&CMatrix::zeros(3, 3), 1.0).unwrap() == 0.0);
        let mut rng = rng_from_seed(2);
        let h = random_hermitian(4, &mut rng);
        let direct = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((schatten_norm(&h, 2.0).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn haar_is_deterministic_per_seed() {
        let a = sample_haar_unitary(2, &mut rng_from_seed(9));
        let b = sample_haar_unitary(2, &mut rng_from_seed(9));
        assert_eq!(a, b);
        let mut rng = rng_from_seed(10);
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_haar_unitary(2, &mut rng).matrix()[(0, 0)].norm_sqr()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 0.5).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn rejects_invalid_states() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace(_))));
        let non_psd = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(matches!(DensityMatrix::new(non_psd), Err(Error::NotPsd(_))));
        let mut non_herm = CMatrix::identity(2, 2).unscale(2.0);
        non_herm[(0, 1)] = c(0.1);
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::NotHermitian(_))));
        assert!(PureState::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(UnitaryOp::new(CMatrix::identity(2, 2).scale(2.0)).is_err());
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let mut rng = rng_from_seed(5);
        for d in [2, 3, 8] {
            let h = random_hermitian(d, &mut rng);
            let s = eig_sorted(&h).unwrap();
            assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
            assert!(max_abs(&(s.reconstruct() - &h)) < RECONSTRUCTION_TOL);
            assert!(unitarity_residual(s.basis.matrix()) < UNITARY_TOL);
        }
    }

    #[test]
    fn haar_unitary_and_states_are_valid() {
        let mut rng = rng_from_seed(11);
        for d in [2, 4, 16] {
            let u = sample_haar_unitary(d, &mut rng);
            assert!(unitarity_residual(u.matrix()) < UNITARY_TOL);
            for r in 1..=d.min(4) {
                let rho = sample_state(d, r, &mut rng).unwrap();
                DensityMatrix::new(rho.matrix().clone()).unwrap();
                let rank = eig_sorted(rho.matrix()).unwrap().values.iter().filter(|&&v| v > 1e-9).count();
                assert_eq!(rank, r);
            }
        }
    }

    #[test]
    fn haar_first_moment_is_flat() {
        // E|⟨0|ψ⟩|² = 1/d for Haar states.
        let mut rng = rng_from_seed(3);
        let d = 4;
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| sample_haar_state(d, &mut rng).amplitudes()[0].norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() < 0.01, "{mean}");
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.6, 0.6, -0.2]);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12 && p[2] == 0.0);
        let q = project_simplex(&[0.2, 0.3, 0.5]);
        assert!((q[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projection_yields_density() {
        let mut rng = rng_from_seed(8);
        let h = random_hermitian(5, &mut rng);
        let rho = DensityMatrix::project(&h).unwrap();
        DensityMatrix::new(rho.matrix().clone()).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn schatten_norms_are_ordered(seed in any::<u64>(), d in 2usize..7) {
            let mut rng = rng_from_seed(seed);
            let a = ginibre(d, d, &mut rng);
            let n1 = schatten_norm(&a, 1.0).unwrap();
            let n2 = schatten_norm(&a, 2.0).unwrap();
            let ninf = schatten_norm(&a, f64::INFINITY).unwrap();
            prop_assert!(n1 + 1e-10 >= n2 && n2 + 1e-10 >= ninf);
            prop_assert!(n1 <= (d as f64).sqrt() * n2 + 1e-9);
        }

        #[test]
        fn truncation_error_matches_tail(seed in any::<u64>(), d in 2usize..7, kf in 0.0f64..1.0) {
            let mut rng = rng_from_seed(seed);
            let rank = 1 + (seed as usize % d);
            let rho = sample_state(d, rank, &mut rng).unwrap();
            let k = 1 + ((kf * d as f64) as usize).min(d - 1);
            let t = truncate_rank_k(&rho, k).unwrap();
            let vals = eig_sorted(rho.matrix()).unwrap().values;
            let tail: f64 = vals[k..].iter().map(|v| v.max(0.0)).sum();
            let err = schatten_norm(&(rho.matrix() - t.matrix()), 1.0).unwrap();
            prop_assert!((err - tail).abs() < 1e-8);
            prop_assert!((t.trace() - (1.0 - tail)).abs() < 1e-8);
        }

        #[test]
        fn mirsky_eigenvalue_perturbation(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = rng_from_seed(seed);
            let a = sample_state(d, d, &mut rng).unwrap();
            let b = sample_state(d, 1 + seed as usize % d, &mut rng).unwrap();
            let la = singular_values(a.matrix()).unwrap();
            let lb = singular_values(b.matrix()).unwrap();
            let diff: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x - y).collect();
            for p in [1.0, 2.0, f64::INFINITY] {
                let lhs = diag_schatten(&diff, p);
                let rhs = schatten_norm(&(a.matrix() - b.matrix()), p).unwrap();
                prop_assert!(lhs <= rhs + 1e-9);
            }
        }

        #[test]
        fn conjugation_preserves_spectrum(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = rng_from_seed(seed);
            let rho = sample_state(d, 2.min(d), &mut rng).unwrap();
            let u = sample_haar_unitary(d, &mut rng);
            let out = rho.conjugate(&u);
            prop_assert!((purity(&out) - purity(&rho)).abs() < 1e-10);
            prop_assert!(out.trace_distance(&rho) <= 2.0 + 1e-10);
        }
    }
}
