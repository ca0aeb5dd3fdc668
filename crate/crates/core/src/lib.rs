//! Adiabatic-algorithm Hamiltonians for maximum-weight independent set, exact
//! cover and 3SAT, and exact numerical spectroscopy of the interpolation
//! `H(s) = (1 − s)·H_init + s·H_problem`.
//!
//! The pipeline is: build a weighted graph ([`graph`]) or read a problem and
//! reduce it ([`reductions`]), turn the Ising model into a matrix-free
//! operator ([`hamiltonian`]), then sweep `s` for gaps, matrix elements and
//! running-time estimates ([`spectra`]) or for level-resolved state content
//! ([`desev`]). [`oracle`] holds the brute-force references used in tests.

pub mod desev;
pub mod error;
pub mod graph;
pub mod hamiltonian;
pub mod lanczos;
pub mod oracle;
pub mod rational;
pub mod reductions;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::{generate_ck, CkParams, WeightedGraph};
pub use hamiltonian::SystemHamiltonian;
pub use rational::Rational;
pub use reductions::{BitConvention, Couplings, IsingModel};
