//! Unique normal forms and the equivalence decision procedure.
//!
//! Every operator factors as D·A: a diagonal circuit determined by the
//! canonical coefficient tuple, followed by an affine circuit
//! determined by the invertible affine map. Both factors are
//! synthesized deterministically, so two circuits share a normal form
//! exactly when they implement the same operator.
//!
//! The affine factor is a product of ladders on the qubit sets
//! {0..k-1} for k = n down to 2, followed by a layer of X gates. The
//! ladder removed at level k is the unique one whose removal leaves the
//! residual map acting as the identity on qubit k-1; it is serialized
//! as an ascending stair (CNOTs rising from a pivot wire), an optional
//! pivot exchange with the bottom wire, and a descending stair
//! (CNOTs falling into the bottom wire).

use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{validate, Circuit, Gate, Mode, Violation};
use crate::phase_poly::{canonicalize, CanonicalDiagonal, NotDihedral};
use crate::semantics::{evaluate, AffineMap, SemanticsError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalFormError {
    Invalid(Vec<Violation>),
    DimensionMismatch,
    /// CNOT+T normal forms are scalar-free.
    ScalarInCnotT,
    /// CNOT+T normal forms are linear: no X layer.
    OffsetInCnotT,
    /// Internal: the phase table of a valid circuit failed to
    /// canonicalize. Unreachable for valid inputs.
    NotDihedral(NotDihedral),
    Semantics(SemanticsError),
}

impl fmt::Display for NormalFormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalFormError::Invalid(v) => write!(f, "invalid circuit ({} violations)", v.len()),
            NormalFormError::DimensionMismatch => write!(f, "wire counts differ"),
            NormalFormError::ScalarInCnotT => write!(f, "scalar coefficient in CNOT+T mode"),
            NormalFormError::OffsetInCnotT => write!(f, "affine offset in CNOT+T mode"),
            NormalFormError::NotDihedral(e) => write!(f, "not a dihedral phase table: {}", e),
            NormalFormError::Semantics(e) => write!(f, "{}", e),
        }
    }
}

impl From<SemanticsError> for NormalFormError {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::InvalidCircuit(v) => NormalFormError::Invalid(v),
            SemanticsError::DimensionMismatch => NormalFormError::DimensionMismatch,
            other => NormalFormError::Semantics(other),
        }
    }
}

/// The semantic normal form: the canonical diagonal tuple plus the
/// affine map. In CNOT+T mode the scalar and the offset are both zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub diagonal: CanonicalDiagonal,
    pub affine: AffineMap,
    pub mode: Mode,
}

impl NormalForm {
    pub fn new(
        diagonal: CanonicalDiagonal,
        affine: AffineMap,
        mode: Mode,
    ) -> Result<NormalForm, NormalFormError> {
        if diagonal.n() != affine.n() {
            return Err(NormalFormError::DimensionMismatch);
        }
        if mode == Mode::CnotT {
            if diagonal.a0() != 0 {
                return Err(NormalFormError::ScalarInCnotT);
            }
            if affine.offset() != 0 {
                return Err(NormalFormError::OffsetInCnotT);
            }
        }
        Ok(NormalForm { diagonal, affine, mode })
    }

    /// Normal form of a circuit.
    pub fn of(c: &Circuit, mode: Mode) -> Result<NormalForm, NormalFormError> {
        validate(c, mode).map_err(NormalFormError::Invalid)?;
        let op = evaluate(c)?;
        let diagonal = canonicalize(op.phase()).map_err(NormalFormError::NotDihedral)?;
        NormalForm::new(diagonal, op.affine().clone(), mode)
    }

    /// The distinguished circuit: diagonal factor then affine factor.
    pub fn to_circuit(&self) -> Circuit {
        let n = self.diagonal.n();
        let mut gates = synth_diagonal(&self.diagonal, self.mode)
            .expect("mode invariant holds by construction")
            .gates;
        gates.extend(
            synth_affine(&self.affine, self.mode)
                .expect("mode invariant holds by construction")
                .gates,
        );
        Circuit::new(n, gates)
    }
}

/// Serialize a canonical tuple as a diagonal normal-form circuit:
/// the scalar block, then T blocks by qubit, U blocks by pair and V
/// blocks by triple, all in lexicographic order.
pub fn synth_diagonal(d: &CanonicalDiagonal, mode: Mode) -> Result<Circuit, NormalFormError> {
    if mode == Mode::CnotT && d.a0() != 0 {
        return Err(NormalFormError::ScalarInCnotT);
    }
    let mut gates = Vec::new();
    if d.a0() != 0 {
        gates.push(Gate::OmegaPower(d.a0()));
    }
    for (q, &count) in d.a().iter().enumerate() {
        gates.extend(core::iter::repeat(Gate::T(q)).take(count as usize));
    }
    for ((i, j), count) in d.pairs() {
        gates.extend(core::iter::repeat(Gate::U(i, j)).take(count as usize));
    }
    for ((i, j, k), count) in d.triples() {
        gates.extend(core::iter::repeat(Gate::V(i, j, k)).take(count as usize));
    }
    Ok(Circuit::new(d.n(), gates))
}

/// The nonzero functional cutting out the span of `block` (a set of
/// k-1 independent masks over bits 0..k).
fn kernel_functional(block: &[u32], k: usize) -> u32 {
    let mut rows: Vec<u32> = block.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..k {
        if let Some(pr) = (next..rows.len()).find(|&i| rows[i] >> col & 1 == 1) {
            rows.swap(next, pr);
            for i in 0..rows.len() {
                if i != next && rows[i] >> col & 1 == 1 {
                    rows[i] ^= rows[next];
                }
            }
            pivots.push((next, col));
            next += 1;
        }
    }
    let pivot_cols: u32 = pivots.iter().fold(0, |acc, &(_, c)| acc | 1 << c);
    let free = (0..k)
        .find(|&c| pivot_cols >> c & 1 == 0)
        .expect("k-1 independent rows leave one free column");
    let mut psi = 1u32 << free;
    for &(row, col) in &pivots {
        if rows[row] >> free & 1 == 1 {
            psi |= 1 << col;
        }
    }
    psi
}

/// Gate list of the canonical ladder on qubits {0..k-1} with bottom row
/// `r` and top-row space ker `psi`. Requires r ≠ 0, psi ≠ 0 and
/// ⟨psi, r⟩ = 1; those hold for any invertible residual.
fn ladder_gates(r: u32, psi: u32, k: usize) -> Vec<Gate> {
    let bottom = k - 1;
    let pivot = (31 - psi.leading_zeros()) as usize;
    let mut gates = Vec::new();
    // ascending stair: rise from the pivot wire, lowest target last
    for j in (0..pivot).rev() {
        if psi >> j & 1 == 1 {
            gates.push(Gate::cnot(pivot, j));
        }
    }
    // pivot exchange with the bottom wire when the stair is anchored
    // above it
    if pivot != bottom {
        gates.push(Gate::cnot(pivot, bottom));
        gates.push(Gate::cnot(bottom, pivot));
        if r >> bottom & 1 == 0 {
            gates.push(Gate::cnot(pivot, bottom));
        }
    }
    // descending stair: fall into the bottom wire
    for j in (0..bottom).filter(|&j| j != pivot && r >> j & 1 == 1) {
        gates.push(Gate::cnot(j, bottom));
    }
    gates
}

/// Synthesize the affine normal-form circuit of an invertible affine
/// map: ladders on {0..k-1} for k = n down to 2, then the X layer (no
/// X layer in CNOT+T mode, where the offset must be zero). The output
/// evaluates back to the input map, and distinct maps give distinct
/// gate lists.
pub fn synth_affine(f: &AffineMap, mode: Mode) -> Result<Circuit, NormalFormError> {
    if mode == Mode::CnotT && f.offset() != 0 {
        return Err(NormalFormError::OffsetInCnotT);
    }
    let n = f.n();
    let mut rows: Vec<u32> = (0..n).map(|q| f.row(q)).collect();
    let mut gates = Vec::new();
    for k in (2..=n).rev() {
        let r = rows[k - 1];
        let psi = kernel_functional(&rows[..k - 1], k);
        debug_assert_eq!((psi & r).count_ones() & 1, 1);
        let ladder = ladder_gates(r, psi, k);
        // removing the ladder = column operations on the residual
        for g in &ladder {
            if let Gate::Cnot { control, target } = *g {
                for row in rows.iter_mut() {
                    *row ^= (*row >> target & 1) << control;
                }
            }
        }
        debug_assert_eq!(rows[k - 1], 1 << (k - 1));
        debug_assert!(rows[..k - 1].iter().all(|&row| row >> (k - 1) & 1 == 0));
        gates.extend(ladder);
    }
    for q in 0..n {
        if f.offset_bit(q) {
            gates.push(Gate::X(q));
        }
    }
    Ok(Circuit::new(n, gates))
}

/// Rewrite a circuit to its normal form: the diagonal factor of its
/// canonical tuple followed by the affine factor of its affine map.
/// Sound (the output evaluates to the same operator) and complete (two
/// circuits normalize to the same gate list iff they are equivalent).
pub fn normalize(c: &Circuit, mode: Mode) -> Result<Circuit, NormalFormError> {
    Ok(NormalForm::of(c, mode)?.to_circuit())
}

/// Decide whether two circuits implement the same operator.
pub fn equivalent(c1: &Circuit, c2: &Circuit, mode: Mode) -> Result<bool, NormalFormError> {
    if c1.n != c2.n {
        return Err(NormalFormError::DimensionMismatch);
    }
    validate(c1, mode).map_err(NormalFormError::Invalid)?;
    validate(c2, mode).map_err(NormalFormError::Invalid)?;
    Ok(evaluate(c1)? == evaluate(c2)?)
}

/// Structural check that a gate list is a normal form: scalar block,
/// T/U/V blocks in lexicographic order with degrees below 8/4/2, then
/// a canonical ladder product and an ascending X layer.
pub fn is_normal_form(c: &Circuit, mode: Mode) -> bool {
    if validate(c, mode).is_err() {
        return false;
    }
    let gates = &c.gates;
    let mut pos = 0;

    if let Some(&Gate::OmegaPower(k)) = gates.first() {
        if k == 0 {
            return false;
        }
        pos = 1;
    }
    let run = |gates: &[Gate], mut pos: usize, max: usize, same: &dyn Fn(&Gate, &Gate) -> bool| {
        let start = pos;
        while pos < gates.len() && same(&gates[start], &gates[pos]) {
            pos += 1;
        }
        (pos, pos - start <= max)
    };
    let mut last_t: Option<usize> = None;
    while let Some(&Gate::T(q)) = gates.get(pos) {
        if last_t.is_some_and(|p| q <= p) {
            return false;
        }
        let (next, ok) = run(gates, pos, 7, &|a, b| a == b);
        if !ok {
            return false;
        }
        last_t = Some(q);
        pos = next;
    }
    let mut last_u: Option<(usize, usize)> = None;
    while let Some(&Gate::U(i, j)) = gates.get(pos) {
        if last_u.is_some_and(|p| (i, j) <= p) {
            return false;
        }
        let (next, ok) = run(gates, pos, 3, &|a, b| a == b);
        if !ok {
            return false;
        }
        last_u = Some((i, j));
        pos = next;
    }
    let mut last_v: Option<(usize, usize, usize)> = None;
    while let Some(&Gate::V(i, j, k)) = gates.get(pos) {
        if last_v.is_some_and(|p| (i, j, k) <= p) {
            return false;
        }
        let (next, ok) = run(gates, pos, 1, &|a, b| a == b);
        if !ok {
            return false;
        }
        last_v = Some((i, j, k));
        pos = next;
    }

    // affine section: CNOTs then the X layer, and it must be the
    // canonical synthesis of its own affine action
    let affine_section = &gates[pos..];
    if !affine_section
        .iter()
        .all(|g| matches!(g, Gate::Cnot { .. } | Gate::X(_)))
    {
        return false;
    }
    let section = Circuit::new(c.n, affine_section.to_vec());
    let op = match evaluate(&section) {
        Ok(op) => op,
        Err(_) => return false,
    };
    match synth_affine(op.affine(), mode) {
        Ok(canon) => canon.gates == affine_section,
        Err(_) => false,
    }
}

/// `true` when the circuit is its own normal form under `normalize`.
pub fn is_normalized(c: &Circuit, mode: Mode) -> bool {
    normalize(c, mode).map_or(false, |nf| nf.gates == c.gates)
}
