//! Simulation laboratory for quantum coin and quantum bill money schemes.
//!
//! The crate is organised around a small dense statevector engine
//! ([`qstate`]) and the money schemes built on top of it:
//!
//! * [`coin`]: identical-state coins verified with a controlled reflection
//!   oracle, plus transferability, robustness and anonymity experiments.
//! * [`forgery`]: black-box adversaries and the query lower bound.
//! * [`bills`]: eigenstate bills minted and checked by phase estimation.
//! * [`blindverify`]: bank/merchant verification protocols with transcripts.
//! * [`cli`]: the seeded experiment harness behind the `qcoin` binary.

pub mod bills;
pub mod blindverify;
pub mod cli;
pub mod coin;
mod error;
pub mod forgery;
pub mod qstate;

pub use error::{Error, Result};
pub use qstate::{DensityMatrix, Pauli, QuantumState, Seed, Stream};
