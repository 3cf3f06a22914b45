//! Copy oracles, query meters and the verifier memory policy.

use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;
use std::rc::Rc;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::linalg::DensityMatrix;
use crate::measure::Categorical;

use super::HarnessError;

/// A hidden problem instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Quantum(DensityMatrix),
    /// Probability vector over `[0, k)`.
    Classical(Vec<f64>),
}

impl Instance {
    pub fn state(&self) -> Option<&DensityMatrix> {
        match self {
            Instance::Quantum(rho) => Some(rho),
            Instance::Classical(_) => None,
        }
    }

    pub fn distribution(&self) -> Option<&[f64]> {
        match self {
            Instance::Classical(p) => Some(p),
            Instance::Quantum(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Instance::Quantum(rho) => rho.dim(),
            Instance::Classical(p) => p.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Verifier,
    Prover,
}

impl Party {
    pub fn as_str(&self) -> &'static str {
        match self {
            Party::Verifier => "verifier",
            Party::Prover => "prover",
        }
    }
}

/// Per-party copy counts with a breakdown by round kind. Counts only grow.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryMeter {
    pub verifier_queries: u64,
    pub prover_queries: u64,
    pub verifier_kinds: BTreeMap<String, u64>,
    pub prover_kinds: BTreeMap<String, u64>,
}

impl QueryMeter {
    fn charge(&mut self, party: Party, kind: &str, count: u64) {
        let (total, kinds) = match party {
            Party::Verifier => (&mut self.verifier_queries, &mut self.verifier_kinds),
            Party::Prover => (&mut self.prover_queries, &mut self.prover_kinds),
        };
        *total += count;
        match kinds.get_mut(kind) {
            Some(v) => *v += count,
            None => {
                kinds.insert(kind.to_string(), count);
            }
        }
    }

    pub fn queries(&self, party: Party) -> u64 {
        match party {
            Party::Verifier => self.verifier_queries,
            Party::Prover => self.prover_queries,
        }
    }

    /// Count charged to `party` under `kind`.
    pub fn kind(&self, party: Party, kind: &str) -> u64 {
        let kinds = match party {
            Party::Verifier => &self.verifier_kinds,
            Party::Prover => &self.prover_kinds,
        };
        kinds.get(kind).copied().unwrap_or(0)
    }
}

/// Session-local bookkeeping shared by both oracles and all live copies.
#[derive(Debug)]
pub(crate) struct Ledger {
    meter: RefCell<QueryMeter>,
    live: Cell<usize>,
    peak: Cell<usize>,
    limit: Option<usize>,
}

impl Ledger {
    pub(crate) fn new(limit: Option<usize>) -> Rc<Self> {
        Rc::new(Self {
            meter: RefCell::new(QueryMeter::default()),
            live: Cell::new(0),
            peak: Cell::new(0),
            limit,
        })
    }

    pub(crate) fn meter(&self) -> QueryMeter {
        self.meter.borrow().clone()
    }

    pub(crate) fn peak(&self) -> usize {
        self.peak.get()
    }

    pub(crate) fn live(&self) -> usize {
        self.live.get()
    }
}

/// Marks one verifier-held unknown-state copy as live until dropped.
#[derive(Debug)]
struct LiveGuard {
    ledger: Rc<Ledger>,
}

impl Drop for LiveGuard {
    fn drop(&mut self) {
        self.ledger.live.set(self.ledger.live.get() - 1);
    }
}

#[derive(Debug, Clone)]
enum CopyState {
    Shared(Arc<Instance>),
    Owned(DensityMatrix),
}

/// One copy of an unknown quantum state. For the verifier the copy counts
/// against the memory policy from query until it is measured (consumed) or
/// sent (moved into a channel).
#[derive(Debug)]
pub struct Copy {
    state: CopyState,
    _guard: Option<LiveGuard>,
}

impl Copy {
    /// Classical description used for exact-law sampling.
    pub fn state(&self) -> &DensityMatrix {
        match &self.state {
            CopyState::Shared(inst) => inst.state().expect("quantum copy"),
            CopyState::Owned(rho) => rho,
        }
    }

    /// Applies a channel to the register in place; the copy stays live.
    pub fn transform(self, f: impl FnOnce(&DensityMatrix) -> DensityMatrix) -> Copy {
        let next = f(self.state());
        Copy {
            state: CopyState::Owned(next),
            _guard: self._guard,
        }
    }

    /// Measures and releases the copy.
    pub fn measure<T>(self, f: impl FnOnce(&DensityMatrix) -> T) -> T {
        f(self.state())
    }

    pub(crate) fn into_state(self) -> DensityMatrix {
        match self.state {
            CopyState::Shared(inst) => inst.state().expect("quantum copy").clone(),
            CopyState::Owned(rho) => rho,
        }
    }
}

/// `count` copies held jointly by an unconstrained party.
#[derive(Debug, Clone)]
pub struct CopyBatch {
    instance: Arc<Instance>,
    count: u64,
}

impl CopyBatch {
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn state(&self) -> &DensityMatrix {
        self.instance.state().expect("quantum copies")
    }
}

/// Per-party access to the hidden instance, one copy per query.
#[derive(Debug)]
pub struct CopyOracle {
    party: Party,
    instance: Arc<Instance>,
    ledger: Rc<Ledger>,
    sampler: RefCell<Option<Categorical>>,
}

impl CopyOracle {
    pub(crate) fn new(party: Party, instance: Arc<Instance>, ledger: Rc<Ledger>) -> Self {
        Self {
            party,
            instance,
            ledger,
            sampler: RefCell::new(None),
        }
    }

    /// An oracle outside any session, with its own unlimited ledger.
    pub fn standalone(party: Party, instance: Arc<Instance>) -> Self {
        Self::new(party, instance, Ledger::new(None))
    }

    /// Snapshot of the meter shared with the session.
    pub fn meter(&self) -> QueryMeter {
        self.ledger.meter()
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn dim(&self) -> usize {
        self.instance.dim()
    }

    fn charge(&self, kind: &str, count: u64) {
        self.ledger.meter.borrow_mut().charge(self.party, kind, count);
    }

    /// One quantum copy. A verifier query fails if it would exceed the
    /// memory policy.
    pub fn query(&self, kind: &str) -> Result<Copy, HarnessError> {
        if self.instance.state().is_none() {
            return Err(HarnessError::Malformed("quantum query on a classical instance".into()));
        }
        let guard = if self.party == Party::Verifier {
            let live = self.ledger.live.get() + 1;
            if let Some(limit) = self.ledger.limit {
                if live > limit {
                    return Err(HarnessError::MemoryPolicy { live, limit });
                }
            }
            self.ledger.live.set(live);
            self.ledger.peak.set(self.ledger.peak.get().max(live));
            Some(LiveGuard {
                ledger: Rc::clone(&self.ledger),
            })
        } else {
            None
        };
        self.charge(kind, 1);
        Ok(Copy {
            state: CopyState::Shared(Arc::clone(&self.instance)),
            _guard: guard,
        })
    }

    /// `count` rounds of query-then-measure with the same single-copy
    /// measurement. At most one copy is live at any time, so this is allowed
    /// under any memory limit of at least one. `f` receives the state and
    /// `count` and returns the aggregate of the independent outcomes.
    pub fn measure_each<T>(&self, kind: &str, count: u64, f: impl FnOnce(&DensityMatrix, u64) -> T) -> Result<T, HarnessError> {
        let Some(state) = self.instance.state() else {
            return Err(HarnessError::Malformed("quantum query on a classical instance".into()));
        };
        if self.party == Party::Verifier && count > 0 {
            let live = self.ledger.live.get() + 1;
            if let Some(limit) = self.ledger.limit {
                if live > limit {
                    return Err(HarnessError::MemoryPolicy { live, limit });
                }
            }
            self.ledger.peak.set(self.ledger.peak.get().max(live));
        }
        self.charge(kind, count);
        Ok(f(state, count))
    }

    /// Many copies at once. Only the prover may hold copies jointly.
    pub fn query_batch(&self, kind: &str, count: u64) -> Result<CopyBatch, HarnessError> {
        if self.party == Party::Verifier && self.ledger.limit.is_some() {
            return Err(HarnessError::MemoryPolicy {
                live: self.ledger.live.get() + count as usize,
                limit: self.ledger.limit.unwrap_or(0),
            });
        }
        if self.instance.state().is_none() {
            return Err(HarnessError::Malformed("quantum query on a classical instance".into()));
        }
        self.charge(kind, count);
        Ok(CopyBatch {
            instance: Arc::clone(&self.instance),
            count,
        })
    }

    /// Charges `count` queries under an accounting model without producing
    /// copies (used by ideal-mode subroutines whose outputs are computed
    /// from the exact instance).
    pub fn charge_accounting(&self, kind: &str, count: u64) {
        self.charge(kind, count);
    }

    /// One classical sample.
    pub fn sample<R: Rng + ?Sized>(&self, kind: &str, rng: &mut R) -> Result<usize, HarnessError> {
        let p = self
            .instance
            .distribution()
            .ok_or_else(|| HarnessError::Malformed("classical query on a quantum instance".into()))?;
        let mut cache = self.sampler.borrow_mut();
        let sampler = cache.get_or_insert_with(|| Categorical::new(p));
        self.charge(kind, 1);
        Ok(sampler.sample(rng))
    }
}
