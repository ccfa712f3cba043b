//! Text and JSON serialization for CNOT-dihedral circuits.
//!
//! The `.cdq` circuit format is line based: an optional comment (`#` to
//! end of line) anywhere, a `qubits <n>` header, then one gate per
//! line. The `cdq` binary in this crate fronts the `cnotdihedral`
//! library: normalization, equivalence, exact simulation, phase
//! polynomials, counting and relation verification.

pub mod format;
pub mod json;

pub use format::{parse, print, ParseError};
