//! Quantum Fisher information (QFI) of entangled coherent states and NOON
//! states in a lossy Mach-Zehnder interferometer.
//!
//! The crate pairs exact closed-form QFI expressions with an independent
//! truncated-Fock-space oracle, so every analytical result can be checked
//! against a direct numerical diagonalization of the same density matrix:
//!
//! - [`specfun`] — Lambert W, log-factorials, log-binomials.
//! - [`model`] — loss channels and probe-state parameterizations, including
//!   the n̄ ↔ |α|² conversion.
//! - [`fock`] — truncated Fock-space states, photon-loss channels (Kraus
//!   form), and lossy density matrices with analytic φ-derivatives.
//! - [`qfi`] — mixed-state QFI engines: the full spectral sum, the
//!   three-term nonzero-subset decomposition, and the non-orthogonal-basis
//!   generalized eigenproblem.
//! - [`closed_forms`] — exact and asymptotic QFI expressions for the
//!   entangled coherent state (ECS) and the NOON state.
//! - [`crossover`] — solver for the ECS/NOON performance crossover region
//!   and its critical point.
//!
//! The library is `no_std` (it allocates, but performs no IO); the companion
//! CLI crate carries file formats and command-line plumbing.

#![no_std]
#![deny(unsafe_code)]
// Test builds link std, whose inherent float methods shadow the
// num_traits::Float imports the no_std build relies on.
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod closed_forms;
pub mod crossover;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod qfi;
pub mod specfun;

pub use fock::{BranchBasis, BranchKet, LabeledDensityMatrix, PureState};
pub use linalg::CMatrix;
pub use model::{EcsSpec, GeneratorKind, LossChannel, NoonSpec, NoonSuperposition};
pub use num_complex::Complex64;
pub use qfi::{EigenSystem, QfiBreakdown, QfiDecomposition};
