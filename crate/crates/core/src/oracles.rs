//! Query-counted access to `f` and `𝓓`.
//!
//! The tester only ever holds a [`MembershipOracle`] and a [`SampleOracle`];
//! every evaluation or draw goes through a shared per-trial [`Ledger`].

use std::cell::Cell;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BitString, BooleanFunction};
use crate::distribution::Distribution;
use crate::{Error, Result};

/// Snapshot of the three cost counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub classical_queries: u64,
    pub classical_samples: u64,
    pub quantum_queries: u64,
}

impl QueryLedger {
    /// Sum of all three counters.
    pub fn total(&self) -> u64 {
        self.classical_queries + self.classical_samples + self.quantum_queries
    }
}

/// Mutable, increment-only counters shared by the oracles of one trial.
#[derive(Debug, Default)]
pub struct Ledger(Cell<QueryLedger>);

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> QueryLedger {
        self.0.get()
    }

    fn bump(&self, f: impl FnOnce(&mut QueryLedger)) {
        let mut l = self.0.get();
        f(&mut l);
        self.0.set(l);
    }
}

pub struct MembershipOracle<'a> {
    function: &'a BooleanFunction,
    ledger: &'a Ledger,
}

impl<'a> MembershipOracle<'a> {
    pub fn new(function: &'a BooleanFunction, ledger: &'a Ledger) -> Self {
        MembershipOracle { function, ledger }
    }

    pub fn n(&self) -> usize {
        self.function.n()
    }

    /// Classical membership query. No caching: every call is charged.
    pub fn query(&self, x: &BitString) -> Result<bool> {
        let v = self.function.eval(x)?;
        self.ledger.bump(|l| l.classical_queries += 1);
        Ok(v)
    }

    /// Records `amount` executions of the quantum phase oracle.
    pub fn charge_quantum(&self, amount: u64) -> Result<()> {
        if amount == 0 {
            return Err(Error::ZeroCharge);
        }
        self.ledger.bump(|l| l.quantum_queries += amount);
        Ok(())
    }

    pub fn ledger(&self) -> QueryLedger {
        self.ledger.snapshot()
    }

    /// White-box access for the state-vector simulator in [`crate::quantum`].
    pub(crate) fn simulator_function(&self) -> &'a BooleanFunction {
        self.function
    }
}

pub struct SampleOracle<'a> {
    distribution: &'a Distribution,
    ledger: &'a Ledger,
}

impl<'a> SampleOracle<'a> {
    pub fn new(distribution: &'a Distribution, ledger: &'a Ledger) -> Self {
        SampleOracle { distribution, ledger }
    }

    pub fn n(&self) -> usize {
        self.distribution.n()
    }

    /// One classical sample from `𝓓`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        self.ledger.bump(|l| l.classical_samples += 1);
        self.distribution.sample(rng)
    }

    pub(crate) fn simulator_distribution(&self) -> &'a Distribution {
        self.distribution
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn query_counts_every_call() {
        let f = BooleanFunction::constant(3, true).unwrap();
        let ledger = Ledger::new();
        let o = MembershipOracle::new(&f, &ledger);
        let x: BitString = "010".parse().unwrap();
        assert!(o.query(&x).unwrap());
        assert_eq!(ledger.snapshot().classical_queries, 1);
        assert!(o.query(&x).unwrap());
        assert_eq!(ledger.snapshot().classical_queries, 2);
    }

    #[test]
    fn query_dimension_mismatch_not_charged() {
        let f = BooleanFunction::constant(3, true).unwrap();
        let ledger = Ledger::new();
        let o = MembershipOracle::new(&f, &ledger);
        assert!(o.query(&"01".parse().unwrap()).is_err());
        assert_eq!(ledger.snapshot(), QueryLedger::default());
    }

    #[test]
    fn draws_are_counted() {
        let d = Distribution::point_mass("101".parse().unwrap()).unwrap();
        let ledger = Ledger::new();
        let s = SampleOracle::new(&d, &ledger);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5 {
            assert_eq!(s.draw(&mut rng).to_string(), "101");
        }
        assert_eq!(ledger.snapshot().classical_samples, 5);
    }

    #[test]
    fn quantum_charges() {
        let f = BooleanFunction::constant(2, false).unwrap();
        let ledger = Ledger::new();
        let o = MembershipOracle::new(&f, &ledger);
        o.charge_quantum(1).unwrap();
        o.charge_quantum(4).unwrap();
        assert_eq!(o.charge_quantum(0), Err(Error::ZeroCharge));
        assert_eq!(ledger.snapshot().quantum_queries, 5);
    }

    #[test]
    fn shared_ledger_and_json() {
        let f = BooleanFunction::constant(2, false).unwrap();
        let d = Distribution::uniform(2).unwrap();
        let ledger = Ledger::new();
        let o = MembershipOracle::new(&f, &ledger);
        let s = SampleOracle::new(&d, &ledger);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = s.draw(&mut rng);
        o.query(&x).unwrap();
        o.charge_quantum(2).unwrap();
        let snap = ledger.snapshot();
        assert_eq!(snap.total(), 4);
        assert_eq!(
            serde_json::to_string(&snap).unwrap(),
            r#"{"classical_queries":1,"classical_samples":1,"quantum_queries":2}"#
        );
    }
}
