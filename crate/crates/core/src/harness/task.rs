//! Many-vs-one distinguishing tasks.

use std::sync::Arc;

use crate::linalg::{sample_haar_state, sample_state, DensityMatrix};
use crate::rng::{rng_from_seed, SimRng};

use super::oracle::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    QuantumState,
    ClassicalDistribution,
}

/// Decide whether the hidden instance is the public `accept_instance` or was
/// drawn from the reject set.
#[derive(Clone)]
pub struct ManyVsOneTask {
    pub name: String,
    pub dim: usize,
    pub kind: InstanceKind,
    pub accept_instance: Arc<Instance>,
    pub reject_sampler: Arc<dyn Fn(&mut SimRng) -> Instance + Send + Sync>,
}

impl std::fmt::Debug for ManyVsOneTask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManyVsOneTask")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .finish()
    }
}

/// Minimum separation a reject draw must keep from the accept instance.
const SEPARATION: f64 = 1e-6;

impl ManyVsOneTask {
    fn checked(self) -> Self {
        let mut rng = rng_from_seed(0x7a5c);
        for _ in 0..16 {
            let x = (self.reject_sampler)(&mut rng);
            assert!(
                distance(&x, &self.accept_instance) > SEPARATION,
                "reject sampler of '{}' produced the accept instance",
                self.name
            );
        }
        self
    }

    pub fn sample_reject(&self, rng: &mut SimRng) -> Instance {
        (self.reject_sampler)(rng)
    }
}

/// Trace distance or total-variation distance (both as ℓ₁ norms).
pub fn distance(a: &Instance, b: &Instance) -> f64 {
    match (a, b) {
        (Instance::Quantum(x), Instance::Quantum(y)) => x.trace_distance(y),
        (Instance::Classical(p), Instance::Classical(q)) => p.iter().zip(q).map(|(u, v)| (u - v).abs()).sum(),
        _ => f64::INFINITY,
    }
}

/// Maximally mixed versus Haar-random pure.
pub fn purity_task(d: usize) -> ManyVsOneTask {
    ManyVsOneTask {
        name: format!("purity(d={d})"),
        dim: d,
        kind: InstanceKind::QuantumState,
        accept_instance: Arc::new(Instance::Quantum(DensityMatrix::maximally_mixed(d))),
        reject_sampler: Arc::new(move |rng: &mut SimRng| Instance::Quantum(sample_haar_state(d, rng).to_density())),
    }
    .checked()
}

/// Maximally mixed versus a random state of rank `d/2`, which is at trace
/// distance at least 1 from `𝟙/d`.
pub fn mixedness_task(d: usize) -> ManyVsOneTask {
    let rank = (d / 2).max(1);
    ManyVsOneTask {
        name: format!("mixedness(d={d})"),
        dim: d,
        kind: InstanceKind::QuantumState,
        accept_instance: Arc::new(Instance::Quantum(DensityMatrix::maximally_mixed(d))),
        reject_sampler: Arc::new(move |rng: &mut SimRng| Instance::Quantum(sample_state(d, rank, rng).expect("rank in range"))),
    }
    .checked()
}

/// Uniform over `[0, k)` versus uniform over a random subset of size `k/8`.
pub fn uniformity_task(k: usize) -> ManyVsOneTask {
    let uniform = vec![1.0 / k as f64; k];
    ManyVsOneTask {
        name: format!("uniformity(k={k})"),
        dim: k,
        kind: InstanceKind::ClassicalDistribution,
        accept_instance: Arc::new(Instance::Classical(uniform)),
        reject_sampler: Arc::new(move |rng: &mut SimRng| Instance::Classical(random_support(k, (k / 8).max(1), rng))),
    }
    .checked()
}

/// Uniform distribution on a uniformly random subset of `[0, k)` of size `s`.
pub fn random_support(k: usize, s: usize, rng: &mut SimRng) -> Vec<f64> {
    let chosen = rand::seq::index::sample(rng, k, s);
    let mut p = vec![0.0; k];
    for i in chosen.iter() {
        p[i] = 1.0 / s as f64;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reject_instances_are_far() {
        let mut rng = rng_from_seed(4);
        let t = mixedness_task(4);
        for _ in 0..20 {
            let x = t.sample_reject(&mut rng);
            assert!(distance(&x, &t.accept_instance) >= 1.0 - 1e-9);
        }
        let u = uniformity_task(64);
        let x = u.sample_reject(&mut rng);
        assert!((distance(&x, &u.accept_instance) - 1.75).abs() < 1e-12);
        let p = purity_task(2);
        assert_eq!(p.kind, InstanceKind::QuantumState);
    }
}
