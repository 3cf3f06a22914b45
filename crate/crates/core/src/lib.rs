//! Interactive proofs between memory-constrained verifiers and untrusted
//! provers: a dense-state simulator with exact resource accounting.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod lowrank;
pub mod measure;
pub mod purity;
pub mod rng;
pub mod stab;
pub mod stream;
pub mod tomo;

pub use error::{Error, Result};
