//! Arithmetic modulo the Mersenne prime `q = 2⁶¹ - 1`.

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;

pub const MODULUS: u64 = (1 << 61) - 1;

/// Canonical representative in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Fq(u64);

#[inline]
fn reduce(x: u64) -> u64 {
    let r = (x & MODULUS) + (x >> 61);
    if r >= MODULUS {
        r - MODULUS
    } else {
        r
    }
}

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn new(v: u64) -> Self {
        Fq(reduce(reduce(v)))
    }

    /// `-v` for negative inputs.
    pub fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fq::new(v as u64)
        } else {
            -Fq::new(v.unsigned_abs())
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fq(rng.random_range(0..MODULUS))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fq::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; zero maps to zero.
    pub fn inverse(self) -> Self {
        self.pow(MODULUS - 2)
    }

    pub fn to_le_bytes(self) -> [u8; 8] {
        self.0.to_le_bytes()
    }
}

impl From<u64> for Fq {
    fn from(v: u64) -> Self {
        Fq::new(v)
    }
}

impl Add for Fq {
    type Output = Fq;
    #[inline]
    fn add(self, o: Fq) -> Fq {
        let s = self.0 + o.0;
        Fq(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fq {
    type Output = Fq;
    #[inline]
    fn sub(self, o: Fq) -> Fq {
        Fq(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + MODULUS - o.0 })
    }
}

impl Neg for Fq {
    type Output = Fq;
    #[inline]
    fn neg(self) -> Fq {
        Fq::ZERO - self
    }
}

impl Mul for Fq {
    type Output = Fq;
    #[inline]
    fn mul(self, o: Fq) -> Fq {
        let p = u128::from(self.0) * u128::from(o.0);
        let lo = (p as u64) & MODULUS;
        let hi = (p >> 61) as u64;
        Fq(reduce(lo + hi))
    }
}

impl AddAssign for Fq {
    fn add_assign(&mut self, o: Fq) {
        *self = *self + o;
    }
}

impl SubAssign for Fq {
    fn sub_assign(&mut self, o: Fq) {
        *self = *self - o;
    }
}

impl MulAssign for Fq {
    fn mul_assign(&mut self, o: Fq) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Fq {
    fn sum<I: Iterator<Item = Fq>>(iter: I) -> Fq {
        iter.fold(Fq::ZERO, |a, b| a + b)
    }
}

impl std::fmt::Display for Fq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> u128 {
        u128::from(v)
    }

    #[test]
    fn reduction_edges() {
        assert_eq!(Fq::new(MODULUS), Fq::ZERO);
        assert_eq!(Fq::new(u64::MAX).value(), (u64::MAX % MODULUS));
        assert_eq!(Fq::from_i64(-1) + Fq::ONE, Fq::ZERO);
        assert_eq!(Fq::new(MODULUS - 1) * Fq::new(MODULUS - 1), Fq::ONE);
        assert_eq!(Fq::ZERO.inverse(), Fq::ZERO);
    }

    proptest! {
        #[test]
        fn matches_wide_arithmetic(a in 0..MODULUS, b in 0..MODULUS) {
            let q = big(MODULUS);
            let (x, y) = (Fq::new(a), Fq::new(b));
            prop_assert_eq!(big((x * y).value()), big(a) * big(b) % q);
            prop_assert_eq!(big((x + y).value()), (big(a) + big(b)) % q);
            prop_assert_eq!(big((x - y).value()), (big(a) + q - big(b)) % q);
            if a != 0 {
                prop_assert_eq!(x * x.inverse(), Fq::ONE);
            }
        }
    }
}
