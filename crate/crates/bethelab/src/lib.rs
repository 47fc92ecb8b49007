//! Numerical laboratory for Bethe states of the periodic spin-1/2 XXX
//! Heisenberg chain.
//!
//! The crate solves the Bethe equations for real roots, builds the
//! corresponding on-shell eigenstates explicitly, computes the exact
//! success probability of the probabilistic state-preparation circuit
//! through the Gaudin determinant, emulates that circuit at register
//! level, and runs shot-based measurements of ground-state spin-spin
//! correlation functions with principled shot budgeting.
//!
//! Module map:
//!
//! - [`solver`] — real-root Bethe solver: counting-number Newton solves,
//!   enumeration, ground and lowest-energy state selection.
//! - [`state`] — explicit wavefunctions as amplitude maps over the
//!   M-magnon sector: Bethe states, rescaled states, Dicke states.
//! - [`gaudin`] — Gaudin matrix and determinant, success probabilities,
//!   large-L scans, amplification iteration counts, determinant-bound
//!   checks.
//! - [`emulator`] — register-level emulation of the 5-step preparation
//!   circuit and reproducible shot sampling.
//! - [`oracle`] — dense exact diagonalization of sector Hamiltonians;
//!   the independent check for everything analytic.
//! - [`correlator`] — sign schemes, shot-count estimators, shot-budget
//!   planning and multi-trial experiments.

pub mod combinatorics;
pub mod correlator;
pub mod emulator;
pub mod error;
pub mod gaudin;
pub mod linalg;
pub mod oracle;
pub mod solver;
pub mod state;

pub use error::{Error, Result};
pub use solver::{BetheRootSet, HalfInt};
