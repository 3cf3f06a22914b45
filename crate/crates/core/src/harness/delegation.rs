//! Delegated multi-copy measurement.
//!
//! A single-copy verifier streams copies to the prover, which performs a
//! coherent multi-copy measurement on its behalf. Only the externally
//! visible contract of the verification layer is modeled: an honest prover
//! always gets the faithful outcome through, and a cheating prover is caught
//! by the trap check except with probability `(5/6)^⌈2 d_sec / 5⌉`.

use rand::Rng;

use crate::error::{check_param, Result};
use crate::linalg::DensityMatrix;

use super::channel::{Direction, Register};
use super::session::Session;
use super::HarnessError;

/// Security contract for a target failure probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delegation {
    pub delta: f64,
}

impl Delegation {
    pub fn new(delta: f64) -> Result<Self> {
        check_param("delta", delta, delta > 0.0 && delta < 1.0, "0 < delta < 1")?;
        Ok(Self { delta })
    }

    /// `d_sec = ⌈(5/2)·log_{5/6}(δ/2)⌉`.
    pub fn security_parameter(&self) -> u32 {
        (2.5 * (self.delta / 2.0).ln() / (5.0f64 / 6.0).ln()).ceil() as u32
    }

    /// Probability that a cheat passes the trap check.
    pub fn escape_probability(&self) -> f64 {
        let rounds = (2.0 * self.security_parameter() as f64 / 5.0).ceil();
        (5.0f64 / 6.0).powf(rounds)
    }

    /// Resolves one delegation. `honest` is the faithful outcome; `tamper`,
    /// when present, is what a cheating prover substitutes. Returns `None`
    /// when the verifier's trap check fires.
    pub fn resolve<T, R: Rng + ?Sized>(&self, honest: T, tamper: Option<&dyn Fn(T) -> T>, rng: &mut R) -> Option<T> {
        match tamper {
            None => Some(honest),
            Some(f) => {
                if rng.random_bool(self.escape_probability()) {
                    Some(f(honest))
                } else {
                    None
                }
            }
        }
    }
}

/// Streams `copies` verifier copies one at a time to the prover, then
/// resolves the measurement `spec` on the prover side. `spec` receives the
/// classical description of the streamed state.
pub fn delegated_measure<T>(
    session: &mut Session,
    contract: &Delegation,
    kind: &str,
    copies: u64,
    spec: impl FnOnce(&DensityMatrix, &mut crate::rng::SimRng) -> T,
    tamper: Option<&dyn Fn(T) -> T>,
) -> std::result::Result<Option<T>, HarnessError> {
    let mut received: Option<DensityMatrix> = None;
    for _ in 0..copies {
        let copy = session.verifier.query(kind)?;
        let mut states = session
            .channel
            .send_qudits(Direction::VerifierToProver, kind, vec![Register::Copy(copy)])?;
        if received.is_none() {
            received = states.pop();
        }
    }
    let state = match received {
        Some(s) => s,
        None => return Err(HarnessError::Malformed("delegation with zero copies".into())),
    };
    let honest = spec(&state, &mut session.p_rng);
    Ok(contract.resolve(honest, tamper, &mut session.v_rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn security_parameter_at_one_third() {
        let c = Delegation::new(1.0 / 3.0).unwrap();
        assert_eq!(c.security_parameter(), 25);
        assert!((c.escape_probability() - (5.0f64 / 6.0).powi(10)).abs() < 1e-15);
        assert!(c.escape_probability() <= 1.0 / 6.0);
    }

    #[test]
    fn honest_never_aborts() {
        let c = Delegation::new(0.1).unwrap();
        let mut rng = rng_from_seed(1);
        for i in 0..1000 {
            assert_eq!(c.resolve(i, None, &mut rng), Some(i));
        }
    }

    #[test]
    fn cheat_escape_rate_within_bound() {
        let c = Delegation::new(1.0 / 3.0).unwrap();
        let mut rng = rng_from_seed(2);
        let n = 10_000;
        let flip = |b: bool| !b;
        let escaped = (0..n).filter(|_| c.resolve(true, Some(&flip), &mut rng).is_some()).count();
        let p = c.escape_probability();
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((escaped as f64 / n as f64) <= p + 3.0 * sd);
        assert!(Delegation::new(1.5).is_err());
    }
}
