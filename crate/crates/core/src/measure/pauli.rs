//! Hermitian Pauli operators `W = i^{x·z} X^x Z^z`.
//!
//! Qubit `q` is bit `q` of a computational-basis index. A label packs the X
//! part in the low `n` bits of its index and the Z part in the high `n` bits.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, PureState, C64};

use super::qubits_of;

/// Largest qubit count for which the full `4ⁿ` expectation table is built.
pub const MAX_PAULI_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliLabel {
    n: u8,
    x: u32,
    z: u32,
}

const I_POW: [C64; 4] = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];

impl PauliLabel {
    pub fn new(n: usize, x: u32, z: u32) -> Result<Self> {
        if n > 16 {
            return Err(Error::TooManyQubits(n));
        }
        let bound = 1u64 << n;
        for v in [x, z] {
            if u64::from(v) >= bound {
                return Err(Error::IndexOutOfRange { index: u64::from(v), bound });
            }
        }
        Ok(Self { n: n as u8, x, z })
    }

    pub fn identity(n: usize) -> Self {
        Self { n: n as u8, x: 0, z: 0 }
    }

    /// Parses a string over `IXYZ`, leftmost character = qubit 0.
    pub fn parse(s: &str) -> Result<Self> {
        let mut x = 0u32;
        let mut z = 0u32;
        for (q, ch) in s.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                _ => {
                    return Err(Error::Parameter {
                        name: "pauli",
                        value: q as f64,
                        expected: "characters from IXYZ",
                    })
                }
            }
        }
        Self::new(s.chars().count(), x, z)
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        let mask = (1usize << n) - 1;
        Self {
            n: n as u8,
            x: (index & mask) as u32,
            z: (index >> n) as u32,
        }
    }

    pub fn index(&self) -> usize {
        (self.x as usize) | ((self.z as usize) << self.n)
    }

    pub fn qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u32 {
        self.x
    }

    pub fn z_bits(&self) -> u32 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_z_type(&self) -> bool {
        self.x == 0
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Label of the product, ignoring phase.
    pub fn xor(self, other: Self) -> Self {
        Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Symplectic form; `true` iff the operators anticommute.
    pub fn anticommutes(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }

    fn phase(&self) -> C64 {
        I_POW[((self.x & self.z).count_ones() % 4) as usize]
    }

    /// `W v`.
    pub fn apply(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(v.len());
        let ph = self.phase();
        for j in 0..v.len() {
            let sign = if (self.z & j as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[j ^ self.x as usize] = ph * v[j] * sign;
        }
        out
    }

    pub fn matrix(&self) -> CMatrix {
        let d = 1usize << self.n;
        let ph = self.phase();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..d {
            let sign = if (self.z & j as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(j ^ self.x as usize, j)] = ph * sign;
        }
        m
    }

    /// `⟨ψ|W|ψ⟩`, real by Hermiticity.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        let n = qubits_of(psi.dim())?;
        if n != self.qubits() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.qubits(),
            });
        }
        Ok(expectation_raw(psi.amplitudes(), self.x as usize, self.z as usize, self.phase()))
    }
}

impl std::fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for q in 0..self.n {
            let c = match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn expectation_raw(v: &CVector, x: usize, z: usize, phase: C64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..v.len() {
        let t = v[j ^ x].conj() * v[j];
        if (z & j).count_ones() % 2 == 1 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    (phase * acc).re
}

/// `⟨ψ|W_a|ψ⟩` for every label, indexed by `PauliLabel::index`.
pub fn pauli_expectations(psi: &PureState) -> Result<Vec<f64>> {
    let n = qubits_of(psi.dim())?;
    if n > MAX_PAULI_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let v = psi.amplitudes();
    let m = 1usize << (2 * n);
    Ok((0..m)
        .map(|idx| {
            let l = PauliLabel::from_index(n, idx);
            expectation_raw(v, l.x as usize, l.z as usize, l.phase())
        })
        .collect())
}

/// Characteristic distribution `p(a) = 2⁻ⁿ ⟨ψ|W_a|ψ⟩²`.
pub fn characteristic_distribution(psi: &PureState) -> Result<Vec<f64>> {
    let scale = 1.0 / psi.dim() as f64;
    Ok(pauli_expectations(psi)?.into_iter().map(|e| e * e * scale).collect())
}
