//! Exact desk-scale simulation of a quantum distribution-free k-junta tester.
//!
//! The crate is organised bottom-up:
//!
//! - [`boolfn`]: bit strings, index sets, cubes, truth tables and restricted
//!   Walsh–Hadamard spectra.
//! - [`distribution`]: explicit distributions over the hypercube and the
//!   brute-force distance-to-junta certifier.
//! - [`oracles`]: query-counted membership and sample oracles.
//! - [`quantum`]: exact simulation of Fourier sampling on a subcube and the
//!   amplitude-amplified cube generator.
//! - [`tester`]: the tester state machine, its invariants and traces.
//! - [`harness`]: fixtures, seeded Monte Carlo trials and reporting.

pub mod boolfn;
pub mod distribution;
mod error;
pub mod harness;
pub mod oracles;
pub mod quantum;
pub mod tester;

pub use boolfn::{BitString, BooleanFunction, Cube, IndexSet, RestrictedSpectrum};
pub use distribution::{DistanceCertificate, Distribution};
pub use error::{Error, Result};
pub use oracles::{Ledger, MembershipOracle, QueryLedger, SampleOracle};
pub use tester::{Action, TesterState, TraceRecord, Variant, Verdict};

/// Largest ambient dimension supported by the dense truth-table representation.
pub const N_MAX: usize = 24;

/// Largest cube dimension `|I(B)|` for which spectra are enumerated.
pub const M_MAX: usize = 24;

/// Tolerance for spectral identities.
pub const TOL_NORM: f64 = 1e-9;
