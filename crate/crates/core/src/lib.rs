//! Analysis and compilation of H-queries over tuple-independent databases.
//!
//! An H-query `Q_φ` is a Boolean combination, described by a Boolean function
//! `φ` on the variables `{0,…,k}`, of the conjunctive queries `h_{k,i}`. This
//! crate decides tractability through the Euler characteristic of `φ`, builds
//! deterministic decomposable circuits (d-Ds) for the lineage of `Q_φ` when
//! the characteristic is zero, and provides brute-force oracles for every
//! step so results can be cross-checked at small scale.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front-end and parallel sweeps live in the `eulerdd` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod boolfun;
pub mod circuit;
mod error;
pub mod fragment;
pub mod lattice;
pub mod obdd;
pub mod pdb;
pub mod poly;
pub mod transform;

pub use error::{Error, Result};

/// Exact probabilities and polynomial coefficients.
pub type Rational = num_rational::BigRational;
