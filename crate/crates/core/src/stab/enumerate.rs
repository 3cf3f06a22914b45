//! Exhaustive list of pure stabilizer states.
//!
//! A state is a Lagrangian subspace of `F₂²ⁿ` together with a sign for each
//! of `n` basis generators. Subspaces are grown one isotropic dimension at a
//! time and deduplicated by their sorted element list, which also fixes a
//! deterministic order.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::measure::{PauliLabel, SignedPauli};

use super::StabilizerStateDesc;

pub const MAX_ENUMERATION_QUBITS: usize = 4;

static CACHE: [OnceLock<Vec<StabilizerStateDesc>>; MAX_ENUMERATION_QUBITS] = [const { OnceLock::new() }; MAX_ENUMERATION_QUBITS];

/// `2ⁿ Πⱼ₌₁ⁿ (2ʲ + 1)`.
pub fn stabilizer_count(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << n, |acc, j| acc * ((1u64 << j) + 1))
}

/// Every `n`-qubit stabilizer state exactly once, computed on first use.
pub fn enumerate_stabilizers(n: usize) -> Result<&'static [StabilizerStateDesc]> {
    if n == 0 || n > MAX_ENUMERATION_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(CACHE[n - 1].get_or_init(|| build(n)))
}

/// `x` in the low `n` bits, `z` in the next `n`.
fn label(n: usize, v: u32) -> PauliLabel {
    let mask = (1u32 << n) - 1;
    PauliLabel::new(n, v & mask, v >> n).expect("bits within range")
}

fn commutes(n: usize, a: u32, b: u32) -> bool {
    !label(n, a).anticommutes(&label(n, b))
}

fn lagrangian_subspaces(n: usize) -> Vec<Vec<u32>> {
    let mut level: BTreeSet<Vec<u32>> = BTreeSet::from([vec![0]]);
    for _ in 0..n {
        let mut next = BTreeSet::new();
        for span in &level {
            for v in 1..(1u32 << (2 * n)) {
                if span.binary_search(&v).is_ok() || !span.iter().all(|&s| commutes(n, s, v)) {
                    continue;
                }
                let mut grown: Vec<u32> = span.iter().flat_map(|&s| [s, s ^ v]).collect();
                grown.sort_unstable();
                next.insert(grown);
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Greedy basis: ascending elements not yet in the span of those chosen.
fn basis_of(span: &[u32]) -> Vec<u32> {
    let mut basis = Vec::new();
    let mut reached = vec![0u32];
    for &v in span {
        if reached.contains(&v) {
            continue;
        }
        basis.push(v);
        let shifted: Vec<u32> = reached.iter().map(|&r| r ^ v).collect();
        reached.extend(shifted);
    }
    basis
}

fn build(n: usize) -> Vec<StabilizerStateDesc> {
    let mut out = Vec::with_capacity(stabilizer_count(n) as usize);
    for span in lagrangian_subspaces(n) {
        let basis = basis_of(&span);
        for signs in 0..(1u32 << n) {
            let gens = basis
                .iter()
                .enumerate()
                .map(|(i, &v)| SignedPauli {
                    label: label(n, v),
                    negative: (signs >> i) & 1 == 1,
                })
                .collect();
            out.push(StabilizerStateDesc::from_generators(n, gens).expect("Lagrangian basis"));
        }
    }
    out
}
