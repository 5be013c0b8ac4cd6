//! Sequential 1→M quantum cloning.
//!
//! A single ancilla of dimension `D` interacts with each output qubit in
//! turn. After the last interaction the ancilla is decoupled and the emitted
//! qubits hold the optimal cloning state. This crate builds the target
//! states, the step-by-step isometries that produce them, an independent
//! matrix-product-state route to the same isometries, and the full
//! protocol (doubled ancilla, generalized Hadamard, measurement, phase
//! correction) with numerical certification of every step.
//!
//! Conventions used throughout:
//!
//! * Qubits are indexed from 0. Qubit 0 (the first one emitted) is the most
//!   significant bit of an amplitude index, so `|i₀ i₁ … i_{n-1}⟩` reads left
//!   to right.
//! * Isometry matrices use row = outgoing ancilla index, column = incoming
//!   ancilla index, and the chain acts first-step-innermost:
//!   `V[n]^{i_n} ⋯ V[1]^{i_1} |φ_I⟩`.
//! * A joint ancilla ⊗ qubits state stores the ancilla as the most
//!   significant factor.

pub mod cli;
pub mod cloning;
pub mod error;
pub mod linalg;
pub mod mps;
pub mod protocol;
pub mod qstate;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, SvdResult, C64};

/// Default relative tolerance for rank decisions and invariant checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest clone count accepted anywhere (the universal state then has
/// 2·12 − 1 = 23 qubits).
pub const MAX_CLONES: usize = 12;
