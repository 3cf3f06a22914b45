//! Uniform sampling from the n-qubit Clifford group modulo phase.
//!
//! A Clifford is fixed, up to global phase, by the signed Paulis it maps each
//! `X_j` and `Z_j` to. The images form a symplectic basis; sampling that
//! basis uniformly and the `2n` signs uniformly gives the uniform law.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, trace_product_re, CMatrix, CVector, UnitaryOp, C64};

use super::PauliLabel;

pub const MAX_CLIFFORD_QUBITS: usize = 6;

/// `±W_label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPauli {
    pub label: PauliLabel,
    pub negative: bool,
}

impl SignedPauli {
    pub fn apply(&self, v: &CVector) -> CVector {
        let out = self.label.apply(v);
        if self.negative {
            -out
        } else {
            out
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let m = self.label.matrix();
        if self.negative {
            -m
        } else {
            m
        }
    }

    /// Identifies `m` as `±W` for some label, if it is one.
    pub fn identify(m: &CMatrix, n: usize) -> Option<SignedPauli> {
        let d = 1usize << n;
        for idx in 0..d * d {
            let label = PauliLabel::from_index(n, idx);
            let w = label.matrix();
            let c = trace_product_re(&w, m) / d as f64;
            if (c.abs() - 1.0).abs() < 1e-9 {
                let negative = c < 0.0;
                let cand = SignedPauli { label, negative };
                if max_abs(&(cand.matrix() - m)) < 1e-9 {
                    return Some(cand);
                }
            }
        }
        None
    }
}

fn random_label<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliLabel {
    let idx = rng.random_range(0..1usize << (2 * n));
    PauliLabel::from_index(n, idx)
}

/// Images `(X_j ↦ a_j, Z_j ↦ b_j)` of a uniformly random symplectic map.
pub fn sample_uniform_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(PauliLabel, PauliLabel)> {
    let mut pairs: Vec<(PauliLabel, PauliLabel)> = Vec::with_capacity(n);
    let in_complement = |v: &PauliLabel, pairs: &[(PauliLabel, PauliLabel)]| pairs.iter().all(|(a, b)| !v.anticommutes(a) && !v.anticommutes(b));
    for _ in 0..n {
        let a = loop {
            let v = random_label(n, rng);
            if !v.is_identity() && in_complement(&v, &pairs) {
                break v;
            }
        };
        let b = loop {
            let v = random_label(n, rng);
            if v.anticommutes(&a) && in_complement(&v, &pairs) {
                break v;
            }
        };
        pairs.push((a, b));
    }
    pairs
}

/// Dense unitary (up to global phase) of the Clifford mapping `X_j ↦ xs[j]`
/// and `Z_j ↦ zs[j]`. The images must form a signed symplectic basis.
pub fn clifford_from_images(xs: &[SignedPauli], zs: &[SignedPauli]) -> UnitaryOp {
    let n = xs.len();
    let d = 1usize << n;
    // v0: common +1 eigenvector of the Z images.
    let project = |mut v: CVector| {
        for q in zs {
            v = (&v + q.apply(&v)).scale(0.5);
        }
        v
    };
    let mut best = CVector::zeros(d);
    let mut best_norm = -1.0;
    for k in 0..d {
        let mut e = CVector::zeros(d);
        e[k] = C64::new(1.0, 0.0);
        let v = project(e);
        let nv = v.norm_squared();
        if nv > best_norm {
            best_norm = nv;
            best = v;
        }
        if nv > 0.5 {
            break;
        }
    }
    let v0 = best.unscale(best_norm.sqrt());
    let mut u = CMatrix::zeros(d, d);
    for col in 0..d {
        let mut v = v0.clone();
        for (j, p) in xs.iter().enumerate() {
            if (col >> j) & 1 == 1 {
                v = p.apply(&v);
            }
        }
        u.set_column(col, &v);
    }
    UnitaryOp::from_trusted(u)
}

/// Uniformly random n-qubit Clifford as a dense `2ⁿ × 2ⁿ` unitary.
pub fn sample_uniform_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryOp> {
    if n == 0 || n > MAX_CLIFFORD_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let pairs = sample_uniform_symplectic(n, rng);
    let mut xs = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    for (a, b) in pairs {
        xs.push(SignedPauli {
            label: a,
            negative: rng.random(),
        });
        zs.push(SignedPauli {
            label: b,
            negative: rng.random(),
        });
    }
    Ok(clifford_from_images(&xs, &zs))
}
