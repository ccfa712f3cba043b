//! Exact operator semantics as monomial matrices.
//!
//! Every circuit over {ω, X, T, CNOT, SWAP, U, V} sends a basis state
//! |x⟩ to ω^{p(x)} |f(x)⟩ for a ℤ₈-valued phase function p and an
//! invertible affine map f over ℤ₂. The pair (p, f) is stored exactly:
//! p as a dense table over all 2^n basis states, f as a bit matrix plus
//! an offset vector.
//!
//! Basis states are passed around as `u32` words with bit q holding
//! x_q. Table positions use the big-endian index of the bitstring
//! x_0 x_1 … x_{n-1} (x_0 most significant), so the two differ by a
//! bit reversal.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{validate, Circuit, Gate, Mode, Violation};

/// Table position of a basis state (bit reversal within n bits).
#[inline]
pub fn state_to_index(x: u32, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (x.reverse_bits() >> (32 - n)) as usize
    }
}

/// Basis state stored at a table position.
#[inline]
pub fn index_to_state(i: usize, n: usize) -> u32 {
    state_to_index(i as u32, n) as u32
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemanticsError {
    DimensionMismatch,
    NotInvertible,
    IndexOutOfRange { index: usize, n: usize },
    TooManyWires { n: usize },
    InvalidCircuit(Vec<Violation>),
}

impl fmt::Display for SemanticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticsError::DimensionMismatch => write!(f, "operator dimensions differ"),
            SemanticsError::NotInvertible => write!(f, "matrix is singular over Z2"),
            SemanticsError::IndexOutOfRange { index, n } => {
                write!(f, "qubit index {} out of range for {} wires", index, n)
            }
            SemanticsError::TooManyWires { n } => {
                write!(f, "{} wires exceeds the supported maximum of {}", n, crate::MAX_WIRES)
            }
            SemanticsError::InvalidCircuit(v) => {
                write!(f, "invalid circuit ({} violations)", v.len())
            }
        }
    }
}

/// An invertible affine map x ↦ Ax ⊕ b over ℤ₂ⁿ. Row q of A is kept as
/// a bit mask over input qubits; invertibility is checked at
/// construction by Gaussian elimination.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    n: usize,
    rows: Vec<u32>,
    offset: u32,
}

impl AffineMap {
    pub fn identity(n: usize) -> AffineMap {
        AffineMap {
            n,
            rows: (0..n).map(|q| 1u32 << q).collect(),
            offset: 0,
        }
    }

    /// Build from explicit rows and offset, rejecting singular matrices.
    pub fn new(rows: Vec<u32>, offset: u32) -> Result<AffineMap, SemanticsError> {
        let n = rows.len();
        if n > crate::MAX_WIRES {
            return Err(SemanticsError::TooManyWires { n });
        }
        let m = AffineMap { n, rows, offset };
        if m.linear_inverse().is_none() {
            return Err(SemanticsError::NotInvertible);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row q of the matrix as a bit mask over input qubits.
    pub fn row(&self, q: usize) -> u32 {
        self.rows[q]
    }

    /// Matrix entry A[q][j].
    pub fn entry(&self, q: usize, j: usize) -> bool {
        self.rows[q] >> j & 1 == 1
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn offset_bit(&self, q: usize) -> bool {
        self.offset >> q & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.offset == 0 && self.rows.iter().enumerate().all(|(q, &r)| r == 1 << q)
    }

    /// Apply to a basis state (bit q of `x` holds x_q).
    pub fn apply(&self, x: u32) -> u32 {
        let mut y = self.offset;
        for q in 0..self.n {
            y ^= ((self.rows[q] & x).count_ones() as u32 & 1) << q;
        }
        y
    }

    /// Apply only the linear part.
    fn apply_linear(&self, x: u32) -> u32 {
        let mut y = 0;
        for q in 0..self.n {
            y ^= ((self.rows[q] & x).count_ones() as u32 & 1) << q;
        }
        y
    }

    /// second ∘ first as affine maps.
    pub fn compose(second: &AffineMap, first: &AffineMap) -> Result<AffineMap, SemanticsError> {
        if second.n != first.n {
            return Err(SemanticsError::DimensionMismatch);
        }
        let n = second.n;
        let mut rows = vec![0u32; n];
        for q in 0..n {
            let mut acc = 0u32;
            let mut m = second.rows[q];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                acc ^= first.rows[j];
                m &= m - 1;
            }
            rows[q] = acc;
        }
        let offset = second.apply_linear(first.offset) ^ second.offset;
        Ok(AffineMap { n, rows, offset })
    }

    /// Inverse of the linear part, or None if singular.
    fn linear_inverse(&self) -> Option<Vec<u32>> {
        let n = self.n;
        // augmented rows [A | I], eliminated in place
        let mut aug: Vec<u64> = (0..n)
            .map(|q| self.rows[q] as u64 | 1u64 << (32 + q))
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| aug[r] >> col & 1 == 1)?;
            aug.swap(col, pivot);
            for r in 0..n {
                if r != col && aug[r] >> col & 1 == 1 {
                    aug[r] ^= aug[col];
                }
            }
        }
        Some((0..n).map(|q| (aug[q] >> 32) as u32).collect())
    }

    /// The inverse map f⁻¹(y) = A⁻¹y ⊕ A⁻¹b. Total: invertibility is a
    /// construction invariant.
    pub fn inverse(&self) -> AffineMap {
        let rows = self.linear_inverse().expect("construction invariant");
        let inv = AffineMap { n: self.n, rows, offset: 0 };
        let offset = inv.apply_linear(self.offset);
        AffineMap { offset, ..inv }
    }
}

/// ℤ₈ phase exponent per basis state, indexed big-endian.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseTable {
    n: usize,
    values: Vec<u8>,
}

impl PhaseTable {
    pub fn zero(n: usize) -> PhaseTable {
        PhaseTable { n, values: vec![0; 1 << n] }
    }

    /// Build from explicit values (length 2^n, entries in 0..=7).
    pub fn from_values(n: usize, values: Vec<u8>) -> Result<PhaseTable, SemanticsError> {
        if n > crate::MAX_WIRES {
            return Err(SemanticsError::TooManyWires { n });
        }
        if values.len() != 1 << n || values.iter().any(|&v| v > 7) {
            return Err(SemanticsError::DimensionMismatch);
        }
        Ok(PhaseTable { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Entry at a table position.
    pub fn at_index(&self, i: usize) -> u8 {
        self.values[i]
    }

    /// Entry for a basis state (bit q of `x` holds x_q).
    pub fn at_state(&self, x: u32) -> u8 {
        self.values[state_to_index(x, self.n)]
    }

    fn at_state_mut(&mut self, x: u32) -> &mut u8 {
        &mut self.values[state_to_index(x, self.n)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// Exact semantics of a circuit: W|x⟩ = ω^{phase(x)} |affine(x)⟩.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactOperator {
    phase: PhaseTable,
    affine: AffineMap,
}

impl ExactOperator {
    pub fn identity(n: usize) -> ExactOperator {
        ExactOperator {
            phase: PhaseTable::zero(n),
            affine: AffineMap::identity(n),
        }
    }

    pub fn from_parts(phase: PhaseTable, affine: AffineMap) -> Result<ExactOperator, SemanticsError> {
        if phase.n != affine.n {
            return Err(SemanticsError::DimensionMismatch);
        }
        Ok(ExactOperator { phase, affine })
    }

    pub fn n(&self) -> usize {
        self.affine.n
    }

    pub fn phase(&self) -> &PhaseTable {
        &self.phase
    }

    pub fn affine(&self) -> &AffineMap {
        &self.affine
    }

    /// Apply to a basis state: the phase exponent and the image state.
    pub fn apply(&self, x: u32) -> (u8, u32) {
        (self.phase.at_state(x), self.affine.apply(x))
    }

    /// second ∘ first: run `first`, then `second`.
    pub fn compose(second: &ExactOperator, first: &ExactOperator) -> Result<ExactOperator, SemanticsError> {
        if second.n() != first.n() {
            return Err(SemanticsError::DimensionMismatch);
        }
        let n = first.n();
        let affine = AffineMap::compose(&second.affine, &first.affine)?;
        let mut phase = PhaseTable::zero(n);
        for i in 0..1usize << n {
            let x = index_to_state(i, n);
            phase.values[i] =
                (first.phase.at_state(x) + second.phase.at_state(first.affine.apply(x))) % 8;
        }
        Ok(ExactOperator { phase, affine })
    }

    /// The adjoint: inverse permutation, negated phase pulled back.
    pub fn dagger(&self) -> ExactOperator {
        let n = self.n();
        let inv = self.affine.inverse();
        let mut phase = PhaseTable::zero(n);
        for i in 0..1usize << n {
            let y = index_to_state(i, n);
            phase.values[i] = (8 - self.phase.at_state(inv.apply(y))) % 8;
        }
        ExactOperator { phase, affine: inv }
    }

    /// Diagonal: the permutation part is trivial.
    pub fn is_diagonal(&self) -> bool {
        self.affine.is_identity()
    }

    /// Affine: the phase is identically zero.
    pub fn is_affine(&self) -> bool {
        self.phase.is_zero()
    }

    /// Canonical byte encoding, used as a set key during group closure.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let n = self.n();
        let mut out = Vec::with_capacity(1 + (1 << n) + 4 * n + 4);
        out.push(n as u8);
        out.extend_from_slice(&self.phase.values);
        for q in 0..n {
            out.extend_from_slice(&self.affine.rows[q].to_le_bytes());
        }
        out.extend_from_slice(&self.affine.offset.to_le_bytes());
        out
    }
}

/// Semantics of a single gate on n wires.
pub fn gate_semantics(g: &Gate, n: usize) -> Result<ExactOperator, SemanticsError> {
    if n > crate::MAX_WIRES {
        return Err(SemanticsError::TooManyWires { n });
    }
    for q in g.support() {
        if q >= n {
            return Err(SemanticsError::IndexOutOfRange { index: q, n });
        }
    }
    let mut op = ExactOperator::identity(n);
    match *g {
        Gate::OmegaPower(k) => {
            for v in op.phase.values.iter_mut() {
                *v = k % 8;
            }
        }
        Gate::X(q) => op.affine.offset = 1 << q,
        Gate::T(q) => {
            for x in 0..1u32 << n {
                *op.phase.at_state_mut(x) = (x >> q & 1) as u8;
            }
        }
        Gate::Cnot { control, target } => op.affine.rows[target] |= 1 << control,
        Gate::Swap(a, b) => {
            op.affine.rows[a] = 1 << b;
            op.affine.rows[b] = 1 << a;
        }
        Gate::U(a, b) => {
            for x in 0..1u32 << n {
                *op.phase.at_state_mut(x) = ((x >> a ^ x >> b) & 1) as u8;
            }
        }
        Gate::V(a, b, c) => {
            for x in 0..1u32 << n {
                *op.phase.at_state_mut(x) = ((x >> a ^ x >> b ^ x >> c) & 1) as u8;
            }
        }
    }
    Ok(op)
}

/// Left fold of `compose` over the gate list; identity for the empty
/// circuit.
pub fn evaluate(c: &Circuit) -> Result<ExactOperator, SemanticsError> {
    validate(c, Mode::Dihedral).map_err(SemanticsError::InvalidCircuit)?;
    let mut op = ExactOperator::identity(c.n);
    for g in &c.gates {
        let step = gate_semantics(g, c.n)?;
        op = ExactOperator::compose(&step, &op)?;
    }
    Ok(op)
}
