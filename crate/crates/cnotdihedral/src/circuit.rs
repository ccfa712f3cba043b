//! Gate-list circuit IR and validation.
//!
//! Wire 0 is the top wire. A basis state is written x_0 x_1 … x_{n-1}
//! with x_0 most significant, so the basis index of a state is the
//! bitstring read as a binary number.

use alloc::vec::Vec;
use core::fmt;

/// A single gate. Repetition ("f-blocks") is literal gate repetition;
/// only the global scalar carries an exponent.
///
/// Invariants: qubit indices within a gate are pairwise distinct; `Swap`,
/// `U` and `V` keep their qubits sorted ascending (both gates are
/// symmetric in their wires); `Cnot` is an ordered (control, target)
/// pair; the scalar exponent stays in 0..=7.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    /// Global scalar ω^k, where ω is the primitive eighth root of unity.
    OmegaPower(u8),
    X(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
    U(usize, usize),
    V(usize, usize, usize),
}

impl Gate {
    /// ω^k with the exponent reduced mod 8.
    pub fn omega(k: u8) -> Gate {
        Gate::OmegaPower(k % 8)
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    /// SWAP with the pair sorted ascending.
    pub fn swap(a: usize, b: usize) -> Gate {
        if a <= b {
            Gate::Swap(a, b)
        } else {
            Gate::Swap(b, a)
        }
    }

    /// U with the pair sorted ascending.
    pub fn u(a: usize, b: usize) -> Gate {
        if a <= b {
            Gate::U(a, b)
        } else {
            Gate::U(b, a)
        }
    }

    /// V with the triple sorted ascending.
    pub fn v(a: usize, b: usize, c: usize) -> Gate {
        let mut q = [a, b, c];
        q.sort_unstable();
        Gate::V(q[0], q[1], q[2])
    }

    /// Qubits the gate touches, in stored order. Empty for scalars.
    pub fn support(&self) -> Vec<usize> {
        match *self {
            Gate::OmegaPower(_) => Vec::new(),
            Gate::X(q) | Gate::T(q) => [q].to_vec(),
            Gate::Cnot { control, target } => [control, target].to_vec(),
            Gate::Swap(a, b) | Gate::U(a, b) => [a, b].to_vec(),
            Gate::V(a, b, c) => [a, b, c].to_vec(),
        }
    }

    /// True for X, CNOT and SWAP: gates that act as affine maps on basis
    /// states.
    pub fn is_affine(&self) -> bool {
        matches!(self, Gate::X(_) | Gate::Cnot { .. } | Gate::Swap(..))
    }

    /// True for ω, T, U and V: gates diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            Gate::OmegaPower(_) | Gate::T(_) | Gate::U(..) | Gate::V(..)
        )
    }

    /// True when the two gates touch no common qubit.
    pub fn disjoint_from(&self, other: &Gate) -> bool {
        let a = self.support();
        let b = other.support();
        a.iter().all(|q| !b.contains(q))
    }

    /// The inverse as a gate sequence (T, U and ω are not self-inverse).
    pub fn inverse(&self) -> Vec<Gate> {
        match *self {
            Gate::OmegaPower(k) => [Gate::omega((8 - k % 8) % 8)].to_vec(),
            Gate::T(q) => [Gate::T(q); 7].to_vec(),
            Gate::U(a, b) => [Gate::U(a, b); 3].to_vec(),
            g => [g].to_vec(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::OmegaPower(k) => write!(f, "omega {}", k),
            Gate::X(q) => write!(f, "x {}", q),
            Gate::T(q) => write!(f, "t {}", q),
            Gate::Cnot { control, target } => write!(f, "cnot {} {}", control, target),
            Gate::Swap(a, b) => write!(f, "swap {} {}", a, b),
            Gate::U(a, b) => write!(f, "u {} {}", a, b),
            Gate::V(a, b, c) => write!(f, "v {} {} {}", a, b, c),
        }
    }
}

/// A circuit: a wire count and an ordered gate list. The leftmost gate
/// is applied first to states; the empty list is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Circuit {
        Circuit { n, gates }
    }

    pub fn identity(n: usize) -> Circuit {
        Circuit { n, gates: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gate-wise inverse: reverse order, invert each gate.
    pub fn inverse(&self) -> Circuit {
        let gates = self
            .gates
            .iter()
            .rev()
            .flat_map(|g| g.inverse())
            .collect();
        Circuit { n: self.n, gates }
    }
}

/// Generator sets. `CnotT` restricts to {T, CNOT, SWAP, U, V}: no X and
/// no global scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Dihedral,
    CnotT,
}

/// A broken circuit invariant, with the offending gate position where
/// one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IndexOutOfRange { position: usize, index: usize, n: usize },
    DuplicateIndex { position: usize },
    Unsorted { position: usize },
    ScalarOutOfRange { position: usize, power: u8 },
    ForbiddenInCnotT { position: usize },
    TooManyWires { n: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfRange { position, index, n } => {
                write!(f, "gate {}: qubit index {} out of range for {} wires", position, index, n)
            }
            Violation::DuplicateIndex { position } => {
                write!(f, "gate {}: repeated qubit index", position)
            }
            Violation::Unsorted { position } => {
                write!(f, "gate {}: qubit list not sorted ascending", position)
            }
            Violation::ScalarOutOfRange { position, power } => {
                write!(f, "gate {}: scalar exponent {} outside 0..=7", position, power)
            }
            Violation::ForbiddenInCnotT { position } => {
                write!(f, "gate {}: X and omega are not CNOT+T gates", position)
            }
            Violation::TooManyWires { n } => {
                write!(f, "{} wires exceeds the supported maximum of {}", n, crate::MAX_WIRES)
            }
        }
    }
}

/// Check every type invariant plus the mode restriction. Returns all
/// violations rather than the first.
pub fn validate(c: &Circuit, mode: Mode) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if c.n > crate::MAX_WIRES {
        out.push(Violation::TooManyWires { n: c.n });
    }
    for (position, g) in c.gates.iter().enumerate() {
        let support = g.support();
        for &q in &support {
            if q >= c.n {
                out.push(Violation::IndexOutOfRange { position, index: q, n: c.n });
            }
        }
        for i in 1..support.len() {
            if support[i..].contains(&support[i - 1]) {
                out.push(Violation::DuplicateIndex { position });
                break;
            }
        }
        match *g {
            Gate::Swap(a, b) | Gate::U(a, b) if a > b => {
                out.push(Violation::Unsorted { position });
            }
            Gate::V(a, b, c2) if !(a < b && b < c2) => {
                // duplicate indices are reported separately above
                if a > b || b > c2 {
                    out.push(Violation::Unsorted { position });
                }
            }
            Gate::OmegaPower(k) if k > 7 => {
                out.push(Violation::ScalarOutOfRange { position, power: k });
            }
            _ => {}
        }
        if mode == Mode::CnotT && matches!(g, Gate::X(_) | Gate::OmegaPower(_)) {
            out.push(Violation::ForbiddenInCnotT { position });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_valid_gate() {
        let c = Circuit::new(1, vec![Gate::T(0)]);
        assert!(validate(&c, Mode::Dihedral).is_ok());
    }

    #[test]
    fn out_of_range_index() {
        let c = Circuit::new(1, vec![Gate::cnot(0, 1)]);
        let errs = validate(&c, Mode::Dihedral).unwrap_err();
        assert_eq!(
            errs,
            vec![Violation::IndexOutOfRange { position: 0, index: 1, n: 1 }]
        );
    }

    #[test]
    fn x_forbidden_in_cnott() {
        let c = Circuit::new(2, vec![Gate::X(0)]);
        let errs = validate(&c, Mode::CnotT).unwrap_err();
        assert_eq!(errs, vec![Violation::ForbiddenInCnotT { position: 0 }]);
        assert!(validate(&c, Mode::Dihedral).is_ok());
    }

    #[test]
    fn constructors_sort_symmetric_gates() {
        assert_eq!(Gate::u(2, 0), Gate::U(0, 2));
        assert_eq!(Gate::swap(3, 1), Gate::Swap(1, 3));
        assert_eq!(Gate::v(2, 0, 1), Gate::V(0, 1, 2));
        assert_eq!(Gate::omega(9), Gate::OmegaPower(1));
    }

    #[test]
    fn unsorted_and_duplicate_flagged() {
        let c = Circuit::new(3, vec![Gate::U(2, 1), Gate::V(0, 0, 2), Gate::cnot(1, 1)]);
        let errs = validate(&c, Mode::Dihedral).unwrap_err();
        assert!(errs.contains(&Violation::Unsorted { position: 0 }));
        assert!(errs.contains(&Violation::DuplicateIndex { position: 1 }));
        assert!(errs.contains(&Violation::DuplicateIndex { position: 2 }));
    }

    #[test]
    fn empty_circuit_is_valid_identity() {
        assert!(validate(&Circuit::identity(0), Mode::Dihedral).is_ok());
        assert!(validate(&Circuit::identity(5), Mode::CnotT).is_ok());
    }

    #[test]
    fn wire_cap_enforced() {
        let c = Circuit::identity(crate::MAX_WIRES + 1);
        let errs = validate(&c, Mode::Dihedral).unwrap_err();
        assert_eq!(errs, vec![Violation::TooManyWires { n: 25 }]);
    }
}
