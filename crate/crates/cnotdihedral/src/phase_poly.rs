//! Phase polynomials over ℤ₈.
//!
//! The diagonal action of a circuit is a sum of ℤ₈ coefficients over
//! XOR terms of input bits. This module extracts that sum symbolically
//! from a gate list, converts phase tables to their unique multilinear
//! interpolant over ℤ₈, and solves for the canonical coefficient tuple
//! (a₀, aᵢ ∈ ℤ₈, bᵢⱼ ∈ ℤ₄, cᵢⱼₖ ∈ ℤ₂) that classifies diagonal
//! operators.
//!
//! Variable subsets are passed as bit masks with bit q naming qubit q.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{validate, Circuit, Gate, Mode};
use crate::semantics::{index_to_state, AffineMap, PhaseTable, SemanticsError};

/// Sparse phase polynomial: a constant plus ℤ₈ coefficients on XOR
/// terms over nonempty variable subsets. Zero coefficients are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorPoly {
    n: usize,
    constant: u8,
    terms: BTreeMap<u32, u8>,
}

impl XorPoly {
    pub fn zero(n: usize) -> XorPoly {
        XorPoly { n, constant: 0, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> u8 {
        self.constant
    }

    /// Coefficient on the XOR term over `mask` (0 when absent).
    pub fn coeff(&self, mask: u32) -> u8 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u8)> + '_ {
        self.terms.iter().map(|(&m, &v)| (m, v))
    }

    /// Add a·(term over mask) to the polynomial; an empty mask folds
    /// into the constant.
    pub fn add_term(&mut self, mask: u32, a: u8) {
        if a % 8 == 0 {
            return;
        }
        if mask == 0 {
            self.constant = (self.constant + a) % 8;
            return;
        }
        let v = self.terms.entry(mask).or_insert(0);
        *v = (*v + a) % 8;
        if *v == 0 {
            self.terms.remove(&mask);
        }
    }

    /// Add a·(complemented term over mask), folding x̄ = 1 ⊕ x into the
    /// constant and the plain coefficient.
    pub fn add_complemented_term(&mut self, mask: u32, a: u8) {
        self.constant = (self.constant + a) % 8;
        self.add_term(mask, (8 - a % 8) % 8);
    }

    /// Evaluate at a basis state (bit q of `x` holds x_q).
    pub fn evaluate(&self, x: u32) -> u8 {
        let mut acc = self.constant as u32;
        for (&mask, &a) in &self.terms {
            acc += a as u32 * ((mask & x).count_ones() & 1);
        }
        (acc % 8) as u8
    }
}

/// Multilinear polynomial over ℤ₈: coefficients on plain monomials
/// x_{i₁}⋯x_{iⱼ}, keyed by variable subset (the empty subset is the
/// constant term). Zero coefficients are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    coeffs: BTreeMap<u32, u8>,
}

impl MultilinearPoly {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: u32) -> u8 {
        self.coeffs.get(&mask).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, u8)> + '_ {
        self.coeffs.iter().map(|(&m, &v)| (m, v))
    }

    /// Largest monomial size with a nonzero coefficient.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    /// Evaluate at a basis state.
    pub fn evaluate(&self, x: u32) -> u8 {
        let mut acc = 0u32;
        for (&mask, &a) in &self.coeffs {
            if mask & x == mask {
                acc += a as u32;
            }
        }
        (acc % 8) as u8
    }
}

/// The canonical coefficient tuple of a diagonal operator:
/// a₀ + Σ aᵢ·xᵢ + Σ bᵢⱼ·(xᵢ⊕xⱼ) + Σ cᵢⱼₖ·(xᵢ⊕xⱼ⊕xₖ) with aᵢ ∈ ℤ₈,
/// bᵢⱼ ∈ ℤ₄, cᵢⱼₖ ∈ ℤ₂. Pair and triple keys are sorted ascending;
/// zero entries are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDiagonal {
    n: usize,
    a0: u8,
    a: Vec<u8>,
    b: BTreeMap<(usize, usize), u8>,
    c: BTreeMap<(usize, usize, usize), u8>,
}

impl CanonicalDiagonal {
    pub fn zero(n: usize) -> CanonicalDiagonal {
        CanonicalDiagonal {
            n,
            a0: 0,
            a: vec![0; n],
            b: BTreeMap::new(),
            c: BTreeMap::new(),
        }
    }

    /// Build from explicit coefficients, checking ranges and key order.
    pub fn from_parts(
        n: usize,
        a0: u8,
        a: Vec<u8>,
        b: BTreeMap<(usize, usize), u8>,
        c: BTreeMap<(usize, usize, usize), u8>,
    ) -> Result<CanonicalDiagonal, SemanticsError> {
        let ok = a0 < 8
            && a.len() == n
            && a.iter().all(|&v| v < 8)
            && b.iter().all(|(&(i, j), &v)| i < j && j < n && v > 0 && v < 4)
            && c.iter().all(|(&(i, j, k), &v)| i < j && j < k && k < n && v == 1);
        if !ok {
            return Err(SemanticsError::DimensionMismatch);
        }
        Ok(CanonicalDiagonal { n, a0, a, b, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a0(&self) -> u8 {
        self.a0
    }

    pub fn a(&self) -> &[u8] {
        &self.a
    }

    pub fn b(&self, i: usize, j: usize) -> u8 {
        self.b.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> u8 {
        self.c.get(&(i, j, k)).copied().unwrap_or(0)
    }

    /// Nonzero pair coefficients in lexicographic key order.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), u8)> + '_ {
        self.b.iter().map(|(&k, &v)| (k, v))
    }

    /// Nonzero triple coefficients in lexicographic key order.
    pub fn triples(&self) -> impl Iterator<Item = ((usize, usize, usize), u8)> + '_ {
        self.c.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0 && self.a.iter().all(|&v| v == 0) && self.b.is_empty() && self.c.is_empty()
    }
}

/// Why a phase table is not realizable over the gate set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotDihedral {
    DegreeTooHigh { vars: Vec<usize> },
    TripleNotDivisible { vars: Vec<usize>, coeff: u8 },
    PairNotDivisible { vars: Vec<usize>, coeff: u8 },
}

impl fmt::Display for NotDihedral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotDihedral::DegreeTooHigh { vars } => {
                write!(f, "nonzero multilinear coefficient on {} variables", vars.len())
            }
            NotDihedral::TripleNotDivisible { vars, coeff } => {
                write!(f, "triple coefficient {} on {:?} not divisible by 4", coeff, vars)
            }
            NotDihedral::PairNotDivisible { vars, coeff } => {
                write!(f, "pair coefficient {} on {:?} not divisible by 2", coeff, vars)
            }
        }
    }
}

fn mask_to_vars(mask: u32) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Symbolic execution of a circuit: per-wire affine forms over the
/// inputs, with T/U/V firings accumulated into an `XorPoly`. The
/// returned pair reproduces the circuit's exact semantics: the
/// polynomial evaluates to the phase table and the map is the affine
/// part.
pub fn extract(c: &Circuit) -> Result<(XorPoly, AffineMap), SemanticsError> {
    validate(c, Mode::Dihedral).map_err(SemanticsError::InvalidCircuit)?;
    let n = c.n;
    // (input parity mask, complement bit) per wire
    let mut forms: Vec<(u32, bool)> = (0..n).map(|q| (1u32 << q, false)).collect();
    let mut poly = XorPoly::zero(n);
    let fire = |poly: &mut XorPoly, form: (u32, bool)| {
        if form.1 {
            poly.add_complemented_term(form.0, 1);
        } else {
            poly.add_term(form.0, 1);
        }
    };
    for g in &c.gates {
        match *g {
            Gate::OmegaPower(k) => poly.constant = (poly.constant + k) % 8,
            Gate::X(q) => forms[q].1 = !forms[q].1,
            Gate::Cnot { control, target } => {
                forms[target].0 ^= forms[control].0;
                forms[target].1 ^= forms[control].1;
            }
            Gate::Swap(a, b) => forms.swap(a, b),
            Gate::T(q) => fire(&mut poly, forms[q]),
            Gate::U(a, b) => {
                fire(&mut poly, (forms[a].0 ^ forms[b].0, forms[a].1 ^ forms[b].1))
            }
            Gate::V(a, b, c3) => fire(
                &mut poly,
                (
                    forms[a].0 ^ forms[b].0 ^ forms[c3].0,
                    forms[a].1 ^ forms[b].1 ^ forms[c3].1,
                ),
            ),
        }
    }
    let rows = forms.iter().map(|f| f.0).collect();
    let mut offset = 0u32;
    for (q, f) in forms.iter().enumerate() {
        offset |= (f.1 as u32) << q;
    }
    let affine = AffineMap::new(rows, offset).expect("wire forms of a gate product stay invertible");
    Ok((poly, affine))
}

/// Pointwise evaluation over all 2^n inputs.
pub fn to_phase_table(p: &XorPoly) -> PhaseTable {
    let n = p.n;
    let mut values = vec![0u8; 1 << n];
    for (i, v) in values.iter_mut().enumerate() {
        *v = p.evaluate(index_to_state(i, n));
    }
    PhaseTable::from_values(n, values).expect("evaluation stays in range")
}

/// Dense subset transform: result[S] = Σ_{T ⊆ S} (−1)^{|S|−|T|} t(1_T)
/// mod 8, indexed by table position.
fn mobius_dense(t: &PhaseTable) -> Vec<u8> {
    let n = t.n();
    let mut q: Vec<u8> = t.values().to_vec();
    for d in 0..n {
        let bit = 1usize << d;
        for i in 0..1usize << n {
            if i & bit != 0 {
                q[i] = (q[i] + 8 - q[i ^ bit]) % 8;
            }
        }
    }
    q
}

/// The unique multilinear polynomial over ℤ₈ agreeing with the table on
/// all of ℤ₂ⁿ, computed by Möbius inversion over the subset lattice.
pub fn multilinear(t: &PhaseTable) -> MultilinearPoly {
    let n = t.n();
    let q = mobius_dense(t);
    let mut coeffs = BTreeMap::new();
    for (i, &v) in q.iter().enumerate() {
        if v != 0 {
            coeffs.insert(index_to_state(i, n), v);
        }
    }
    MultilinearPoly { n, coeffs }
}

/// Triangular solve for the canonical tuple, highest degree first.
/// Fails iff the table is not the phase of any circuit over the gate
/// set: a nonzero coefficient on ≥ 4 variables, a triple coefficient
/// not divisible by 4, or a residual pair coefficient not divisible
/// by 2.
pub fn canonicalize(t: &PhaseTable) -> Result<CanonicalDiagonal, NotDihedral> {
    let n = t.n();
    let mut q = mobius_dense(t);
    let size = 1usize << n;
    for i in 0..size {
        if (i.count_ones()) >= 4 && q[i] != 0 {
            let vars = mask_to_vars(index_to_state(i, n));
            return Err(NotDihedral::DegreeTooHigh { vars });
        }
    }
    let mut out = CanonicalDiagonal::zero(n);

    // degree 3: c = q/4 in Z2, then remove the multilinear expansion of
    // c·(x_i ⊕ x_j ⊕ x_k) = c·(x_i + x_j + x_k − 2x_ix_j − 2x_ix_k − 2x_jx_k + 4x_ix_jx_k)
    for i in 0..size {
        if i.count_ones() != 3 || q[i] == 0 {
            continue;
        }
        let state = index_to_state(i, n);
        let vars = mask_to_vars(state);
        if q[i] % 4 != 0 {
            return Err(NotDihedral::TripleNotDivisible { vars, coeff: q[i] });
        }
        let cv = q[i] / 4; // 1, since q[i] ∈ {4}
        out.c.insert((vars[0], vars[1], vars[2]), cv);
        for &v in &vars {
            let si = crate::semantics::state_to_index(1 << v, n);
            q[si] = (q[si] + 8 - cv) % 8;
        }
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            let pi = crate::semantics::state_to_index((1 << vars[x]) | (1 << vars[y]), n);
            q[pi] = (q[pi] + 2 * cv) % 8;
        }
        q[i] = 0;
    }

    // degree 2: the pair coefficient of b·(x_i ⊕ x_j) is −2b, so
    // b = (−q/2) mod 4; then remove b·(x_i + x_j − 2x_ix_j)
    for i in 0..size {
        if i.count_ones() != 2 || q[i] == 0 {
            continue;
        }
        let state = index_to_state(i, n);
        let vars = mask_to_vars(state);
        if q[i] % 2 != 0 {
            return Err(NotDihedral::PairNotDivisible { vars, coeff: q[i] });
        }
        let bv = ((8 - q[i]) / 2) % 4;
        if bv != 0 {
            out.b.insert((vars[0], vars[1]), bv);
        }
        for &v in &vars {
            let si = crate::semantics::state_to_index(1 << v, n);
            q[si] = (q[si] + 8 - bv) % 8;
        }
        q[i] = 0;
    }

    for v in 0..n {
        out.a[v] = q[crate::semantics::state_to_index(1 << v, n)];
    }
    out.a0 = q[0];
    Ok(out)
}

/// Pointwise evaluation of the canonical expression; exact inverse of
/// `canonicalize` on its image.
pub fn canonical_to_table(d: &CanonicalDiagonal) -> PhaseTable {
    let n = d.n;
    let mut values = vec![0u8; 1 << n];
    for (i, out) in values.iter_mut().enumerate() {
        let x = index_to_state(i, n);
        let mut acc = d.a0 as u32;
        for (q, &av) in d.a.iter().enumerate() {
            acc += av as u32 * (x >> q & 1);
        }
        for (&(p, r), &bv) in &d.b {
            acc += bv as u32 * ((x >> p ^ x >> r) & 1);
        }
        for (&(p, r, s), &cv) in &d.c {
            acc += cv as u32 * ((x >> p ^ x >> r ^ x >> s) & 1);
        }
        *out = (acc % 8) as u8;
    }
    PhaseTable::from_values(n, values).expect("evaluation stays in range")
}
