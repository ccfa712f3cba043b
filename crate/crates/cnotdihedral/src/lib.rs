//! Exact tools for CNOT-dihedral circuits.
//!
//! Circuits over the gate set {ω, X, T, CNOT, SWAP, U, V} implement
//! monomial unitaries: every such operator acts on a computational basis
//! state by an eighth-root-of-unity phase followed by an invertible affine
//! permutation of basis states. This crate represents circuits as gate
//! lists, computes their exact semantics over ℤ₈ and ℤ₂ (no floating
//! point anywhere), canonicalizes the diagonal action to a unique
//! coefficient tuple, synthesizes unique normal forms, decides circuit
//! equivalence, runs the equational presentation as a rewrite system, and
//! counts the operator groups both by closed formula and by brute-force
//! closure.
//!
//! The crate is `no_std` (with `alloc`); text and JSON serialization of
//! circuits live in the companion `cdq` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod circuit;
pub mod enumeration;
pub mod normal_form;
pub mod phase_poly;
pub mod rewrite;
pub mod semantics;

pub use circuit::{Circuit, Gate, Mode, Violation};
pub use normal_form::{equivalent, normalize, synth_affine, synth_diagonal, NormalForm};
pub use phase_poly::{canonical_to_table, canonicalize, extract, multilinear, to_phase_table};
pub use phase_poly::{CanonicalDiagonal, MultilinearPoly, NotDihedral, XorPoly};
pub use semantics::{evaluate, gate_semantics, AffineMap, ExactOperator, PhaseTable};

/// Hard cap on wire count. Exact semantics stores a dense 2^n phase
/// table, so anything past this is not desk-scale.
pub const MAX_WIRES: usize = 24;
