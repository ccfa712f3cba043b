//! Operator counting: closed formulas and brute-force oracles.
//!
//! The group orders follow from the bijection between operators and
//! normal forms. Each formula is paired with an independent
//! enumeration: breadth-first closure of the generators under
//! composition for the full groups, exhaustive iteration of canonical
//! tuples for the diagonal subgroup, and exhaustive iteration of
//! invertible (matrix, offset) pairs for the affine subgroup.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::circuit::{Gate, Mode};
use crate::phase_poly::{canonical_to_table, CanonicalDiagonal};
use crate::semantics::{gate_semantics, AffineMap, ExactOperator};

/// Which operator set a count refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountedSet {
    Dihedral,
    CnotT,
    DiagonalOnly,
    AffineOnly,
}

impl fmt::Display for CountedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountedSet::Dihedral => write!(f, "dihedral"),
            CountedSet::CnotT => write!(f, "cnott"),
            CountedSet::DiagonalOnly => write!(f, "diagonal"),
            CountedSet::AffineOnly => write!(f, "affine"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumerationError {
    /// The search or the coefficient space would exceed the cap.
    CapExceeded { cap: u64 },
    /// Exhaustive matrix enumeration is only feasible for small n.
    TooManyWires { n: usize, max: usize },
}

impl fmt::Display for EnumerationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerationError::CapExceeded { cap } => {
                write!(f, "enumeration exceeds the cap of {} elements", cap)
            }
            EnumerationError::TooManyWires { n, max } => {
                write!(f, "exhaustive enumeration at n = {} exceeds the limit n <= {}", n, max)
            }
        }
    }
}

/// Default element cap for the closure and tuple enumerations.
pub const DEFAULT_CAP: u64 = 100_000_000;

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn two_pow(e: u64) -> BigUint {
    BigUint::from(1u8) << e
}

/// The affine factor ∏_{i=1}^{n} (2^n − 2^{i−1}) = |GL(n, ℤ₂)|.
fn gl_order(n: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for i in 1..=n {
        acc *= two_pow(n) - two_pow(i - 1);
    }
    acc
}

/// Exact group order of the selected operator set on n wires.
pub fn order_formula(n: usize, set: CountedSet) -> BigUint {
    let n = n as u64;
    match set {
        CountedSet::Dihedral => {
            two_pow(3 + 4 * binom(n, 1) + 2 * binom(n, 2) + binom(n, 3)) * gl_order(n)
        }
        CountedSet::CnotT => {
            two_pow(3 * binom(n, 1) + 2 * binom(n, 2) + binom(n, 3)) * gl_order(n)
        }
        CountedSet::DiagonalOnly => two_pow(3 + 3 * binom(n, 1) + 2 * binom(n, 2) + binom(n, 3)),
        CountedSet::AffineOnly => two_pow(n) * gl_order(n),
    }
}

/// The mode's generator set on n wires. U and V are derived gates and
/// deliberately excluded.
fn generators(n: usize, mode: Mode) -> Vec<ExactOperator> {
    let mut gates = Vec::new();
    if mode == Mode::Dihedral {
        gates.push(Gate::OmegaPower(1));
        for q in 0..n {
            gates.push(Gate::X(q));
        }
    }
    for q in 0..n {
        gates.push(Gate::T(q));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gates.push(Gate::cnot(a, b));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            gates.push(Gate::swap(a, b));
        }
    }
    gates
        .iter()
        .map(|g| gate_semantics(g, n).expect("generators fit on n wires"))
        .collect()
}

/// Breadth-first closure of the generators under composition, counted
/// by canonical operator encoding. Independent of the formula.
pub fn enumerate_closure(n: usize, mode: Mode, cap: u64) -> Result<u64, EnumerationError> {
    if order_formula(n, match mode {
        Mode::Dihedral => CountedSet::Dihedral,
        Mode::CnotT => CountedSet::CnotT,
    }) > BigUint::from(cap)
    {
        return Err(EnumerationError::CapExceeded { cap });
    }
    let gens = generators(n, mode);
    let mut visited: BTreeSet<Vec<u8>> = BTreeSet::new();
    let identity = ExactOperator::identity(n);
    visited.insert(identity.canonical_bytes());
    let mut frontier = Vec::new();
    frontier.push(identity);
    while let Some(op) = frontier.pop() {
        for g in &gens {
            let next = ExactOperator::compose(g, &op).expect("equal dimensions");
            if visited.insert(next.canonical_bytes()) {
                if visited.len() as u64 > cap {
                    return Err(EnumerationError::CapExceeded { cap });
                }
                frontier.push(next);
            }
        }
    }
    Ok(visited.len() as u64)
}

/// Count distinct phase tables over the full canonical coefficient
/// space: a₀ and each aᵢ over ℤ₈, each pair over ℤ₄, each triple over
/// ℤ₂. Re-checks injectivity of the tuple-to-operator map.
pub fn enumerate_diagonal(n: usize, cap: u64) -> Result<u64, EnumerationError> {
    if order_formula(n, CountedSet::DiagonalOnly) > BigUint::from(cap) {
        return Err(EnumerationError::CapExceeded { cap });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| {
            (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))
        })
        .collect();
    let mut radices = Vec::new();
    radices.push(8u8);
    radices.extend(core::iter::repeat(8).take(n));
    radices.extend(core::iter::repeat(4).take(pairs.len()));
    radices.extend(core::iter::repeat(2).take(triples.len()));

    let mut digits = alloc::vec![0u8; radices.len()];
    let mut tables: BTreeSet<Vec<u8>> = BTreeSet::new();
    loop {
        let a0 = digits[0];
        let a: Vec<u8> = digits[1..1 + n].to_vec();
        let mut b = alloc::collections::BTreeMap::new();
        for (idx, &pair) in pairs.iter().enumerate() {
            let v = digits[1 + n + idx];
            if v != 0 {
                b.insert(pair, v);
            }
        }
        let mut c = alloc::collections::BTreeMap::new();
        for (idx, &triple) in triples.iter().enumerate() {
            let v = digits[1 + n + pairs.len() + idx];
            if v != 0 {
                c.insert(triple, v);
            }
        }
        let d = CanonicalDiagonal::from_parts(n, a0, a, b, c).expect("digits stay in range");
        tables.insert(canonical_to_table(&d).values().to_vec());

        // odometer step
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return Ok(tables.len() as u64);
            }
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Maximum wire count for exhaustive matrix enumeration.
pub const AFFINE_ENUM_MAX: usize = 4;

/// Count invertible (matrix, offset) pairs over ℤ₂ by direct
/// enumeration of all n×n bit matrices.
pub fn enumerate_affine(n: usize) -> Result<u64, EnumerationError> {
    if n > AFFINE_ENUM_MAX {
        return Err(EnumerationError::TooManyWires { n, max: AFFINE_ENUM_MAX });
    }
    let mut invertible = 0u64;
    for bits in 0..1u64 << (n * n) {
        let rows: Vec<u32> = (0..n)
            .map(|q| (bits >> (n * q) & ((1 << n) - 1)) as u32)
            .collect();
        if AffineMap::new(rows, 0).is_ok() {
            invertible += 1;
        }
    }
    Ok(invertible << n)
}

/// A formula value next to its optional brute-force confirmation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub n: usize,
    pub set: CountedSet,
    pub formula_value: BigUint,
    pub enumerated_value: Option<BigUint>,
    /// Present exactly when both values are.
    pub matches: Option<bool>,
}

impl CountReport {
    /// Evaluate the formula and, when asked, the matching brute-force
    /// count.
    pub fn compute(
        n: usize,
        set: CountedSet,
        enumerate: bool,
        cap: u64,
    ) -> Result<CountReport, EnumerationError> {
        let formula_value = order_formula(n, set);
        let enumerated_value = if enumerate {
            let count = match set {
                CountedSet::Dihedral => enumerate_closure(n, Mode::Dihedral, cap)?,
                CountedSet::CnotT => enumerate_closure(n, Mode::CnotT, cap)?,
                CountedSet::DiagonalOnly => enumerate_diagonal(n, cap)?,
                CountedSet::AffineOnly => enumerate_affine(n)?,
            };
            Some(BigUint::from(count))
        } else {
            None
        };
        let matches = enumerated_value.as_ref().map(|v| *v == formula_value);
        Ok(CountReport { n, set, formula_value, enumerated_value, matches })
    }
}
