//! Simulation and certification toolkit for the 2^d -> 1 quantum random
//! access code with mutually unbiased bases.
//!
//! Two classical dits are encoded in one d-dimensional quantum system; the
//! receiver recovers one of them, chosen at random, by measuring one of two
//! POVMs. The best average success probability is (1 + 1/sqrt(d))/2, and
//! reaching it forces the two measurements to be rank-1 projective and
//! mutually unbiased. This crate provides:
//!
//! - [`linalg`]: dense complex-matrix primitives (Hermitian
//!   eigendecomposition, norms, PSD square roots, numerical radius);
//! - [`measurements`]: the POVM data model, the computational/Fourier
//!   mutually unbiased pair, depolarising noise and overlap quantities;
//! - [`qrac`]: the random access code itself, optimal preparations, and a
//!   seesaw optimiser over general POVMs;
//! - [`certify`]: closed-form certification bounds (overlap entropy, norm
//!   sums, incompatibility robustness, entropic uncertainty) as pure
//!   functions of the observed success probability, plus a consolidated
//!   report;
//! - [`oracles`]: randomised and exhaustive verification suites for every
//!   operator inequality the bounds rest on;
//! - [`cli`]: the `mubcert` command-line interface.
//!
//! All entropic quantities are in bits. Every randomised routine is
//! deterministic in its explicit 64-bit seed.

#![forbid(unsafe_code)]

pub mod certify;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measurements;
pub mod oracles;
pub mod qrac;
pub mod rng;
pub mod serialize;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use measurements::{MeasurementPair, Povm};
