//! The equational presentation as an executable rewrite system.
//!
//! Rules come in three layers: the thirteen relations (affine, diagonal
//! and commutation), the defining equations of the derived gates U and
//! V, and the derivable commutation rules that move a diagonal gate
//! leftward past an affine one. Structural moves (commuting gates on
//! disjoint qubits, cancelling a repeated SWAP) are ambient and carry
//! their own identifiers.
//!
//! Rule patterns are gate lists over abstract wire slots 0, 1, 2, …;
//! a match instantiates the slots injectively into concrete wires in
//! either direction. `normalize_by_rewriting` is the constructive
//! normalization route: push diagonals left, reduce block degrees,
//! replace the affine suffix by its canonical synthesis. Its output is
//! gate-for-gate the semantic `normalize`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{validate, Circuit, Gate, Mode, Violation};
use crate::normal_form::{synth_affine, NormalFormError};
use crate::semantics::{evaluate, SemanticsError};

/// Rule identifiers: the numbered relations, the two defining
/// equations, the derived commutation rules, and structural moves.
/// `DiagComm` labels trace entries for the derived fact that diagonal
/// gates commute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    R(u8),
    DefU,
    DefV,
    Fig2(u8),
    StructComm,
    StructCoherence,
    DiagComm,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::R(k) => write!(f, "R{}", k),
            RuleId::DefU => write!(f, "DefU"),
            RuleId::DefV => write!(f, "DefV"),
            RuleId::Fig2(k) => write!(f, "FIG2-{}", k),
            RuleId::StructComm => write!(f, "STRUCT-COMM"),
            RuleId::StructCoherence => write!(f, "STRUCT-COHERENCE"),
            RuleId::DiagComm => write!(f, "DIAG-COMM"),
        }
    }
}

/// How a rule matches and fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// Fixed gate patterns on both sides.
    Pattern,
    /// Swap any two adjacent gates with disjoint qubit support
    /// (subsumes moving scalars, which touch no qubit).
    DisjointComm,
}

/// An oriented pair of circuit patterns over abstract wire slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub id: RuleId,
    pub kind: RuleKind,
    /// Number of wire slots the patterns mention.
    pub slots: usize,
    pub lhs: Vec<Gate>,
    pub rhs: Vec<Gate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::LeftToRight => write!(f, "ltr"),
            Direction::RightToLeft => write!(f, "rtl"),
        }
    }
}

/// A place where a rule applies: the gate window starting at
/// `position`, with wire `assignment` for the slots, read in
/// `direction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub rule: RuleId,
    pub position: usize,
    /// Length of the matched window (the side being replaced).
    pub window: usize,
    pub assignment: Vec<usize>,
    pub direction: Direction,
}

/// One applied rewrite, for auditing normalization runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: RuleId,
    pub position: usize,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteError {
    Invalid(Vec<Violation>),
    /// The match does not describe the current circuit.
    StaleMatch,
    /// verify_rule needs at least the rule's arity in wires.
    TooFewWires { needed: usize, n: usize },
    /// reduce_degrees expects diagonal gates only.
    NonDiagonalGate { position: usize },
    /// No rule fires at an affine/diagonal adjacency. Unreachable for
    /// valid circuits; kept as an honest error.
    NoApplicableRule { position: usize },
    /// The step budget ran out; the strategy failed to terminate.
    FuelExhausted,
    Semantics(SemanticsError),
    Synthesis(NormalFormError),
}

impl fmt::Display for RewriteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteError::Invalid(v) => write!(f, "invalid circuit ({} violations)", v.len()),
            RewriteError::StaleMatch => write!(f, "match does not fit the circuit"),
            RewriteError::TooFewWires { needed, n } => {
                write!(f, "rule needs {} wires, circuit has {}", needed, n)
            }
            RewriteError::NonDiagonalGate { position } => {
                write!(f, "gate {} is not diagonal", position)
            }
            RewriteError::NoApplicableRule { position } => {
                write!(f, "no rule applies at position {}", position)
            }
            RewriteError::FuelExhausted => write!(f, "rewrite step budget exhausted"),
            RewriteError::Semantics(e) => write!(f, "{}", e),
            RewriteError::Synthesis(e) => write!(f, "{}", e),
        }
    }
}

impl From<SemanticsError> for RewriteError {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::InvalidCircuit(v) => RewriteError::Invalid(v),
            other => RewriteError::Semantics(other),
        }
    }
}

fn rep(g: Gate, count: usize) -> Vec<Gate> {
    core::iter::repeat(g).take(count).collect()
}

/// T^5 on every slot, U^3 on every pair, V on every triple of
/// {a, b, c, d}: the diagonal expansion of a four-variable parity.
fn four_parity_expansion(slots: [usize; 4]) -> Vec<Gate> {
    let [a, b, c, d] = slots;
    let mut out = Vec::new();
    for s in slots {
        out.extend(rep(Gate::T(s), 5));
    }
    for (i, j) in [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)] {
        out.extend(rep(Gate::U(i, j), 3));
    }
    for (i, j, k) in [(a, b, c), (a, b, d), (a, c, d), (b, c, d)] {
        out.push(Gate::V(i, j, k));
    }
    out
}

fn pattern(id: RuleId, slots: usize, lhs: Vec<Gate>, rhs: Vec<Gate>) -> RewriteRule {
    RewriteRule { id, kind: RuleKind::Pattern, slots, lhs, rhs }
}

/// The derivable commutation rules: each moves one affine gate past
/// one diagonal gate sharing a wire. Slot names below: a CNOT is
/// (control, target); gates are symmetric in their remaining wires.
fn fig2_rules() -> Vec<RewriteRule> {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    let omega = Gate::OmegaPower(1);
    let mut rules = Vec::new();
    let mut fig2 = |slots: usize, lhs: Vec<Gate>, rhs: Vec<Gate>| {
        let id = RuleId::Fig2(rules.len() as u8 + 1);
        rules.push(pattern(id, slots, lhs, rhs));
    };

    // an X past each diagonal gate: phase complementation costs ω
    let mut x_past = |slots: usize, x: usize, diag: Gate| {
        let mut rhs = vec![omega];
        rhs.extend(rep(diag, 7));
        rhs.push(Gate::X(x));
        fig2(slots, vec![Gate::X(x), diag], rhs);
    };
    x_past(1, A, Gate::T(A)); // 1
    x_past(2, A, Gate::U(A, B)); // 2
    x_past(2, B, Gate::U(A, B)); // 3
    x_past(3, A, Gate::V(A, B, C)); // 4
    x_past(3, B, Gate::V(A, B, C)); // 5
    x_past(3, C, Gate::V(A, B, C)); // 6

    // a CNOT past each diagonal gate
    let cx = Gate::cnot(A, B);
    fig2(2, vec![cx, Gate::T(A)], vec![Gate::T(A), cx]); // 7
    fig2(2, vec![cx, Gate::T(B)], vec![Gate::U(A, B), cx]); // 8
    fig2(2, vec![cx, Gate::U(A, B)], vec![Gate::T(B), cx]); // 9
    fig2(3, vec![cx, Gate::U(B, C)], vec![Gate::V(A, B, C), cx]); // 10
    fig2(3, vec![cx, Gate::U(A, C)], vec![Gate::U(A, C), cx]); // 11
    fig2(3, vec![cx, Gate::V(A, B, C)], vec![Gate::U(B, C), cx]); // 12
    fig2(3, vec![cx, Gate::V(A, B, C)], vec![Gate::U(B, C), cx]); // 13
    fig2(4, vec![cx, Gate::V(A, C, D)], vec![Gate::V(A, C, D), cx]); // 14
    {
        let mut rhs = four_parity_expansion([A, B, C, D]);
        rhs.push(cx);
        fig2(4, vec![cx, Gate::V(B, C, D)], rhs); // 15
    }

    // a SWAP past each diagonal gate: relabel the wires it carries
    let sw = Gate::Swap(A, B);
    fig2(2, vec![sw, Gate::T(A)], vec![Gate::T(B), sw]); // 16
    fig2(2, vec![sw, Gate::T(B)], vec![Gate::T(A), sw]); // 17
    fig2(2, vec![sw, Gate::U(A, B)], vec![Gate::U(A, B), sw]); // 18
    fig2(3, vec![sw, Gate::U(B, C)], vec![Gate::U(A, C), sw]); // 19
    fig2(3, vec![sw, Gate::U(A, C)], vec![Gate::U(B, C), sw]); // 20
    fig2(3, vec![sw, Gate::V(A, B, C)], vec![Gate::V(A, B, C), sw]); // 21
    fig2(3, vec![sw, Gate::V(A, B, C)], vec![Gate::V(A, B, C), sw]); // 22
    fig2(4, vec![sw, Gate::V(B, C, D)], vec![Gate::V(A, C, D), sw]); // 23
    fig2(4, vec![sw, Gate::V(A, C, D)], vec![Gate::V(B, C, D), sw]); // 24

    // 25: the V-past-CNOT-control commutation on relabelled slots
    fig2(4, vec![Gate::cnot(B, A), Gate::V(B, C, D)], vec![Gate::V(B, C, D), Gate::cnot(B, A)]);

    rules
}

/// The full rule table for a mode. CNOT+T drops the relations that
/// mention X or the scalar, and every derived rule that does.
pub fn rule_table(mode: Mode) -> Vec<RewriteRule> {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    let cx = Gate::cnot(A, B);
    let mut rules = Vec::new();

    rules.push(pattern(RuleId::R(1), 1, rep(Gate::X(A), 2), vec![]));
    rules.push(pattern(RuleId::R(2), 2, vec![cx, Gate::X(B), cx], vec![Gate::X(B)]));
    rules.push(pattern(RuleId::R(3), 2, vec![cx, Gate::X(A), cx], vec![Gate::X(A), Gate::X(B)]));
    rules.push(pattern(RuleId::R(4), 2, rep(cx, 2), vec![]));
    rules.push(pattern(
        RuleId::R(5),
        2,
        vec![Gate::Swap(A, B)],
        vec![cx, Gate::Swap(A, B), cx, Gate::Swap(A, B), cx],
    ));
    rules.push(pattern(
        RuleId::R(6),
        3,
        vec![Gate::cnot(A, C)],
        vec![Gate::cnot(B, C), Gate::cnot(A, B), Gate::cnot(B, C), Gate::cnot(A, B)],
    ));
    rules.push(pattern(RuleId::R(7), 1, rep(Gate::T(A), 8), vec![]));
    {
        let mut rhs = rep(Gate::T(A), 4);
        rhs.extend(rep(Gate::T(B), 4));
        rules.push(pattern(RuleId::R(8), 2, rep(Gate::U(A, B), 4), rhs));
    }
    {
        let mut rhs = Vec::new();
        for s in [A, B, C] {
            rhs.extend(rep(Gate::T(s), 6));
        }
        for (i, j) in [(A, B), (A, C), (B, C)] {
            rhs.extend(rep(Gate::U(i, j), 2));
        }
        rules.push(pattern(RuleId::R(9), 3, rep(Gate::V(A, B, C), 2), rhs));
    }
    rules.push(pattern(RuleId::R(10), 0, rep(Gate::OmegaPower(1), 8), vec![]));
    {
        let mut rhs = vec![Gate::OmegaPower(1)];
        rhs.extend(rep(Gate::T(A), 7));
        rules.push(pattern(RuleId::R(11), 1, vec![Gate::X(A), Gate::T(A), Gate::X(A)], rhs));
    }
    rules.push(pattern(RuleId::R(12), 2, vec![cx, Gate::T(A), cx], vec![Gate::T(A)]));
    rules.push(pattern(
        RuleId::R(13),
        4,
        vec![cx, Gate::V(B, C, D), cx],
        four_parity_expansion([A, B, C, D]),
    ));

    rules.push(pattern(RuleId::DefU, 2, vec![Gate::U(A, B)], vec![cx, Gate::T(B), cx]));
    rules.push(pattern(
        RuleId::DefV,
        3,
        vec![Gate::V(A, B, C)],
        vec![cx, Gate::cnot(B, C), Gate::T(C), Gate::cnot(B, C), cx],
    ));

    rules.extend(fig2_rules());

    rules.push(RewriteRule {
        id: RuleId::StructComm,
        kind: RuleKind::DisjointComm,
        slots: 0,
        lhs: vec![],
        rhs: vec![],
    });
    rules.push(pattern(
        RuleId::StructCoherence,
        2,
        rep(Gate::Swap(A, B), 2),
        vec![],
    ));

    if mode == Mode::CnotT {
        let dropped = [RuleId::R(1), RuleId::R(2), RuleId::R(3), RuleId::R(10), RuleId::R(11)];
        rules.retain(|r| {
            !dropped.contains(&r.id)
                && !r
                    .lhs
                    .iter()
                    .chain(r.rhs.iter())
                    .any(|g| matches!(g, Gate::X(_) | Gate::OmegaPower(_)))
        });
    }
    rules
}

/// Substitute wires for slots, re-sorting the symmetric gates.
pub fn instantiate(pattern: &[Gate], assignment: &[usize]) -> Vec<Gate> {
    pattern
        .iter()
        .map(|g| match *g {
            Gate::OmegaPower(k) => Gate::OmegaPower(k),
            Gate::X(s) => Gate::X(assignment[s]),
            Gate::T(s) => Gate::T(assignment[s]),
            Gate::Cnot { control, target } => Gate::cnot(assignment[control], assignment[target]),
            Gate::Swap(a, b) => Gate::swap(assignment[a], assignment[b]),
            Gate::U(a, b) => Gate::u(assignment[a], assignment[b]),
            Gate::V(a, b, c) => Gate::v(assignment[a], assignment[b], assignment[c]),
        })
        .collect()
}

/// Candidate slot→wire bindings for one pattern gate against one
/// concrete gate. Symmetric gates branch over wire orderings.
fn gate_bindings(p: &Gate, g: &Gate) -> Vec<Vec<(usize, usize)>> {
    match (*p, *g) {
        (Gate::OmegaPower(k), Gate::OmegaPower(k2)) if k == k2 => vec![vec![]],
        (Gate::X(s), Gate::X(q)) | (Gate::T(s), Gate::T(q)) => vec![vec![(s, q)]],
        (Gate::Cnot { control: sc, target: st }, Gate::Cnot { control: c, target: t }) => {
            vec![vec![(sc, c), (st, t)]]
        }
        (Gate::Swap(s1, s2), Gate::Swap(a, b)) | (Gate::U(s1, s2), Gate::U(a, b)) => {
            vec![vec![(s1, a), (s2, b)], vec![(s1, b), (s2, a)]]
        }
        (Gate::V(s1, s2, s3), Gate::V(a, b, c)) => [
            [a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a],
        ]
        .iter()
        .map(|w| vec![(s1, w[0]), (s2, w[1]), (s3, w[2])])
        .collect(),
        _ => vec![],
    }
}

/// All injective partial assignments unifying `pattern` with `window`.
fn unify_window(pattern: &[Gate], window: &[Gate], slots: usize) -> Vec<Vec<Option<usize>>> {
    fn go(
        pi: usize,
        pattern: &[Gate],
        window: &[Gate],
        asg: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if pi == pattern.len() {
            out.push(asg.clone());
            return;
        }
        for binding in gate_bindings(&pattern[pi], &window[pi]) {
            let mut touched = Vec::new();
            let mut ok = true;
            for &(s, w) in &binding {
                match asg[s] {
                    Some(prev) if prev == w => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        if asg.iter().any(|&a| a == Some(w)) {
                            ok = false;
                            break;
                        }
                        asg[s] = Some(w);
                        touched.push(s);
                    }
                }
            }
            if ok {
                go(pi + 1, pattern, window, asg, out);
            }
            for s in touched {
                asg[s] = None;
            }
        }
    }
    let mut out = Vec::new();
    let mut asg = vec![None; slots];
    go(0, pattern, window, &mut asg, &mut out);
    out
}

/// Extend a partial assignment over every injective choice of the
/// remaining slots from n wires, in lexicographic order.
fn complete_assignments(partial: &[Option<usize>], n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, asg: &mut Vec<Option<usize>>, n: usize, out: &mut Vec<Vec<usize>>) {
        if i == asg.len() {
            out.push(asg.iter().map(|s| s.unwrap()).collect());
            return;
        }
        if asg[i].is_some() {
            go(i + 1, asg, n, out);
            return;
        }
        for w in 0..n {
            if !asg.iter().any(|&a| a == Some(w)) {
                asg[i] = Some(w);
                go(i + 1, asg, n, out);
                asg[i] = None;
            }
        }
    }
    let mut out = Vec::new();
    let mut asg = partial.to_vec();
    go(0, &mut asg, n, &mut out);
    out
}

/// All places the rule applies, in (position, direction, assignment)
/// order with left-to-right first.
pub fn find_matches(c: &Circuit, rule: &RewriteRule) -> Vec<Match> {
    let mut out = Vec::new();
    if rule.kind == RuleKind::DisjointComm {
        for position in 0..c.gates.len().saturating_sub(1) {
            if c.gates[position].disjoint_from(&c.gates[position + 1]) {
                out.push(Match {
                    rule: rule.id,
                    position,
                    window: 2,
                    assignment: vec![],
                    direction: Direction::LeftToRight,
                });
            }
        }
        return out;
    }
    for position in 0..=c.gates.len() {
        for (direction, side) in [
            (Direction::LeftToRight, &rule.lhs),
            (Direction::RightToLeft, &rule.rhs),
        ] {
            let window = side.len();
            if position + window > c.gates.len() {
                continue;
            }
            let mut assignments = Vec::new();
            for partial in unify_window(side, &c.gates[position..position + window], rule.slots) {
                assignments.extend(complete_assignments(&partial, c.n));
            }
            assignments.sort();
            assignments.dedup();
            for assignment in assignments {
                out.push(Match { rule: rule.id, position, window, assignment, direction });
            }
        }
    }
    out
}

/// Replace the matched window by the instantiated other side.
pub fn apply(c: &Circuit, rule: &RewriteRule, m: &Match) -> Result<Circuit, RewriteError> {
    if m.rule != rule.id || m.position + m.window > c.gates.len() {
        return Err(RewriteError::StaleMatch);
    }
    let window = &c.gates[m.position..m.position + m.window];
    let replacement = match rule.kind {
        RuleKind::DisjointComm => {
            if m.window != 2 || !window[0].disjoint_from(&window[1]) {
                return Err(RewriteError::StaleMatch);
            }
            vec![window[1], window[0]]
        }
        RuleKind::Pattern => {
            let (matched, other) = match m.direction {
                Direction::LeftToRight => (&rule.lhs, &rule.rhs),
                Direction::RightToLeft => (&rule.rhs, &rule.lhs),
            };
            if instantiate(matched, &m.assignment) != window {
                return Err(RewriteError::StaleMatch);
            }
            instantiate(other, &m.assignment)
        }
    };
    let mut gates = c.gates[..m.position].to_vec();
    gates.extend(replacement);
    gates.extend_from_slice(&c.gates[m.position + m.window..]);
    Ok(Circuit::new(c.n, gates))
}

/// Gates of every kind on n wires, for checking the structural
/// commutation move.
fn gate_universe(n: usize) -> Vec<Gate> {
    let mut out = vec![Gate::OmegaPower(1)];
    for q in 0..n {
        out.push(Gate::X(q));
        out.push(Gate::T(q));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                out.push(Gate::cnot(a, b));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            out.push(Gate::U(a, b));
            out.push(Gate::Swap(a, b));
            for c in b + 1..n {
                out.push(Gate::V(a, b, c));
            }
        }
    }
    out
}

/// Check a rule semantically: both sides must evaluate equal under
/// every injective wire assignment into n wires. The structural
/// commutation move is checked over all disjoint gate pairs instead.
pub fn verify_rule(rule: &RewriteRule, n: usize) -> Result<bool, RewriteError> {
    if rule.slots > n {
        return Err(RewriteError::TooFewWires { needed: rule.slots, n });
    }
    if rule.kind == RuleKind::DisjointComm {
        let universe = gate_universe(n);
        for g1 in &universe {
            for g2 in &universe {
                if !g1.disjoint_from(g2) {
                    continue;
                }
                let ab = evaluate(&Circuit::new(n, vec![*g1, *g2]))?;
                let ba = evaluate(&Circuit::new(n, vec![*g2, *g1]))?;
                if ab != ba {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    for assignment in complete_assignments(&vec![None; rule.slots], n) {
        let lhs = Circuit::new(n, instantiate(&rule.lhs, &assignment));
        let rhs = Circuit::new(n, instantiate(&rule.rhs, &assignment));
        if evaluate(&lhs)? != evaluate(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reduction passes before the step budget trips. The lexicographic
/// (ΣV, ΣU, ΣT) measure shrinks every pass, so this only guards
/// against an engine bug.
const SEGMENT_FUEL: usize = 100_000;

fn segment_key(g: &Gate) -> (usize, usize, usize, usize) {
    match *g {
        Gate::OmegaPower(_) => (0, 0, 0, 0),
        Gate::T(q) => (1, q, 0, 0),
        Gate::U(a, b) => (2, a, b, 0),
        Gate::V(a, b, c) => (3, a, b, c),
        _ => (4, 0, 0, 0),
    }
}

/// Fold a scalar exponent into the accumulator, logging R10 on wraps.
fn absorb_scalar(scalar: &mut u8, k: u8, position: usize, trace: &mut Vec<TraceEvent>) {
    let total = *scalar as u32 + k as u32;
    if total >= 8 {
        trace.push(TraceEvent {
            rule: RuleId::R(10),
            position,
            direction: Direction::LeftToRight,
        });
    }
    *scalar = (total % 8) as u8;
}

/// Sort a scalar-free diagonal segment (diagonal gates commute) and
/// reduce every block below its degree bound with R9, R8 and R7.
/// Keeps intermediate circuits small: a reduced segment never exceeds
/// 7n + 3·C(n,2) + C(n,3) gates.
fn reduce_segment(
    gates: &mut Vec<Gate>,
    scalar: &mut u8,
    offset: usize,
    trace: &mut Vec<TraceEvent>,
) -> Result<(), RewriteError> {
    for _ in 0..SEGMENT_FUEL {
        // the scalar commutes with everything (spatial law)
        let mut i = 0;
        while i < gates.len() {
            if let Gate::OmegaPower(k) = gates[i] {
                if i > 0 {
                    trace.push(TraceEvent {
                        rule: RuleId::StructComm,
                        position: offset + i,
                        direction: Direction::LeftToRight,
                    });
                }
                absorb_scalar(scalar, k, offset, trace);
                gates.remove(i);
            } else {
                i += 1;
            }
        }
        // bubble into T, U, V block order by adjacent commutations
        loop {
            let mut swapped = false;
            for i in 0..gates.len().saturating_sub(1) {
                if segment_key(&gates[i]) > segment_key(&gates[i + 1]) {
                    let rule = if gates[i].disjoint_from(&gates[i + 1]) {
                        RuleId::StructComm
                    } else {
                        RuleId::DiagComm
                    };
                    gates.swap(i, i + 1);
                    trace.push(TraceEvent {
                        rule,
                        position: offset + i,
                        direction: Direction::LeftToRight,
                    });
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        // one pass of block-degree reduction; new T and U gates from
        // R9/R8 are appended and sorted on the next pass
        let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
        let mut carries: Vec<Gate> = Vec::new();
        let mut changed = false;
        let mut i = 0;
        while i < gates.len() {
            let g = gates[i];
            let mut j = i;
            while j < gates.len() && gates[j] == g {
                j += 1;
            }
            let count = j - i;
            let (keep, m) = match g {
                Gate::T(_) => (count % 8, count / 8),
                Gate::U(..) => (count % 4, count / 4),
                Gate::V(..) => (count % 2, count / 2),
                _ => (count, 0),
            };
            if m > 0 {
                changed = true;
                let (rule, expansion): (RuleId, Vec<Gate>) = match g {
                    Gate::T(_) => (RuleId::R(7), vec![]),
                    Gate::U(a, b) => {
                        let mut e = rep(Gate::T(a), 4 * m);
                        e.extend(rep(Gate::T(b), 4 * m));
                        (RuleId::R(8), e)
                    }
                    Gate::V(a, b, c) => {
                        let mut e = Vec::new();
                        for q in [a, b, c] {
                            e.extend(rep(Gate::T(q), 6 * m));
                        }
                        for (p, r) in [(a, b), (a, c), (b, c)] {
                            e.extend(rep(Gate::U(p, r), 2 * m));
                        }
                        (RuleId::R(9), e)
                    }
                    _ => unreachable!("segment is diagonal"),
                };
                for _ in 0..m {
                    trace.push(TraceEvent {
                        rule,
                        position: offset + i,
                        direction: Direction::LeftToRight,
                    });
                }
                carries.extend(expansion);
            }
            out.extend(rep(g, keep));
            i = j;
        }
        out.extend(carries);
        *gates = out;
        if !changed {
            return Ok(());
        }
    }
    Err(RewriteError::FuelExhausted)
}

/// Move every diagonal gate to the left of every affine gate. Gates
/// are swept left to right: affine gates accumulate in a suffix block,
/// and each diagonal gate is commuted leftward through that block one
/// crossing at a time (structural move on disjoint wires, derived
/// commutation rule otherwise), with block degrees reduced after every
/// crossing so intermediate circuits stay small. The result is a
/// diagonal prefix followed by the affine suffix, with the operator
/// unchanged.
pub fn push_diagonal_left(c: &Circuit) -> Result<Circuit, RewriteError> {
    push_diagonal_left_traced(c, &mut Vec::new())
}

/// As `push_diagonal_left`, appending one event per applied rule.
/// Positions are best-effort indices into the evolving circuit.
pub fn push_diagonal_left_traced(
    c: &Circuit,
    trace: &mut Vec<TraceEvent>,
) -> Result<Circuit, RewriteError> {
    validate(c, Mode::Dihedral).map_err(RewriteError::Invalid)?;
    let fig2: Vec<RewriteRule> = rule_table(Mode::Dihedral)
        .into_iter()
        .filter(|r| matches!(r.id, RuleId::Fig2(_)))
        .collect();
    let mut scalar = 0u8;
    let mut diagonal: Vec<Gate> = Vec::new();
    let mut affine: Vec<Gate> = Vec::new();
    for &g in &c.gates {
        if g.is_affine() {
            affine.push(g);
            continue;
        }
        if let Gate::OmegaPower(k) = g {
            if !affine.is_empty() {
                trace.push(TraceEvent {
                    rule: RuleId::StructComm,
                    position: diagonal.len() + affine.len(),
                    direction: Direction::LeftToRight,
                });
            }
            absorb_scalar(&mut scalar, k, diagonal.len(), trace);
            continue;
        }
        // commute the diagonal gate through the affine block, right to
        // left, carrying the growing-and-reduced bundle with it
        let mut bundle = vec![g];
        for idx in (0..affine.len()).rev() {
            let a = affine[idx];
            let mut next: Vec<Gate> = Vec::new();
            for d in bundle {
                if a.disjoint_from(&d) {
                    trace.push(TraceEvent {
                        rule: RuleId::StructComm,
                        position: diagonal.len() + idx,
                        direction: Direction::LeftToRight,
                    });
                    next.push(d);
                    continue;
                }
                let window = [a, d];
                let mut fired = false;
                'rules: for rule in &fig2 {
                    for partial in unify_window(&rule.lhs, &window, rule.slots) {
                        // fig2 left sides mention every slot
                        let assignment: Vec<usize> =
                            partial.iter().map(|s| s.unwrap()).collect();
                        let rhs = instantiate(&rule.rhs, &assignment);
                        debug_assert_eq!(*rhs.last().unwrap(), a);
                        trace.push(TraceEvent {
                            rule: rule.id,
                            position: diagonal.len() + idx,
                            direction: Direction::LeftToRight,
                        });
                        for out in &rhs[..rhs.len() - 1] {
                            match *out {
                                Gate::OmegaPower(k) => {
                                    absorb_scalar(&mut scalar, k, diagonal.len(), trace)
                                }
                                other => next.push(other),
                            }
                        }
                        fired = true;
                        break 'rules;
                    }
                }
                if !fired {
                    return Err(RewriteError::NoApplicableRule {
                        position: diagonal.len() + idx,
                    });
                }
            }
            bundle = next;
            reduce_segment(&mut bundle, &mut scalar, diagonal.len() + idx, trace)?;
        }
        diagonal.extend(bundle);
        reduce_segment(&mut diagonal, &mut scalar, 0, trace)?;
    }
    let mut gates = Vec::new();
    if scalar > 0 {
        gates.push(Gate::OmegaPower(scalar));
    }
    gates.extend(diagonal);
    gates.extend(affine);
    Ok(Circuit::new(c.n, gates))
}

/// Reorder a diagonal circuit and reduce its block degrees: V blocks
/// mod 2 (R9), then U blocks mod 4 (R8), then T blocks mod 8 (R7) and
/// the scalar mod 8 (R10), emitting the blocks in lexicographic order.
/// SWAP pairs left over from non-adjacent notation are commuted out
/// first; any genuinely non-diagonal remainder is an error.
pub fn reduce_degrees(d: &Circuit) -> Result<Circuit, RewriteError> {
    reduce_degrees_traced(d, &mut Vec::new())
}

/// As `reduce_degrees`, appending one event per applied rule.
pub fn reduce_degrees_traced(
    d: &Circuit,
    trace: &mut Vec<TraceEvent>,
) -> Result<Circuit, RewriteError> {
    if let Some(position) = d.gates.iter().position(|g| matches!(g, Gate::X(_) | Gate::Cnot { .. }))
    {
        return Err(RewriteError::NonDiagonalGate { position });
    }
    // the push sweep sorts and reduces the diagonal part; the affine
    // suffix it leaves is all SWAPs and must cancel to the identity
    let pushed = push_diagonal_left_traced(d, trace)?;
    let split = pushed
        .gates
        .iter()
        .position(|g| g.is_affine())
        .unwrap_or(pushed.gates.len());
    let suffix = Circuit::new(pushed.n, pushed.gates[split..].to_vec());
    if !evaluate(&suffix)?.affine().is_identity() {
        let position = d.gates.iter().position(|g| g.is_affine()).unwrap_or(0);
        return Err(RewriteError::NonDiagonalGate { position });
    }
    for _ in 0..suffix.gates.len() / 2 {
        trace.push(TraceEvent {
            rule: RuleId::StructCoherence,
            position: split,
            direction: Direction::LeftToRight,
        });
    }
    Ok(Circuit::new(d.n, pushed.gates[..split].to_vec()))
}

/// The constructive normalization route: push diagonals left, reduce
/// the diagonal prefix, replace the affine suffix by its canonical
/// synthesis. Gate-for-gate identical to `normal_form::normalize`.
pub fn normalize_by_rewriting(c: &Circuit, mode: Mode) -> Result<Circuit, RewriteError> {
    normalize_by_rewriting_traced(c, mode, &mut Vec::new())
}

/// As `normalize_by_rewriting`, appending one event per applied rule.
pub fn normalize_by_rewriting_traced(
    c: &Circuit,
    mode: Mode,
    trace: &mut Vec<TraceEvent>,
) -> Result<Circuit, RewriteError> {
    validate(c, mode).map_err(RewriteError::Invalid)?;
    let pushed = push_diagonal_left_traced(c, trace)?;
    let split = pushed
        .gates
        .iter()
        .position(|g| g.is_affine())
        .unwrap_or(pushed.gates.len());
    let diagonal = Circuit::new(pushed.n, pushed.gates[..split].to_vec());
    let suffix = Circuit::new(pushed.n, pushed.gates[split..].to_vec());

    let mut gates = reduce_degrees_traced(&diagonal, trace)?.gates;
    let affine = evaluate(&suffix)?;
    gates.extend(
        synth_affine(affine.affine(), mode)
            .map_err(RewriteError::Synthesis)?
            .gates,
    );
    Ok(Circuit::new(c.n, gates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::normalize;

    fn rule(mode: Mode, id: RuleId) -> RewriteRule {
        rule_table(mode).into_iter().find(|r| r.id == id).unwrap()
    }

    #[test]
    fn table_sizes() {
        let dihedral = rule_table(Mode::Dihedral);
        assert_eq!(dihedral.len(), 13 + 2 + 25 + 2);
        let cnott = rule_table(Mode::CnotT);
        assert_eq!(cnott.len(), dihedral.len() - 5 - 6);
        assert!(cnott.iter().all(|r| {
            !r.lhs
                .iter()
                .chain(r.rhs.iter())
                .any(|g| matches!(g, Gate::X(_) | Gate::OmegaPower(_)))
        }));
    }

    #[test]
    fn r13_has_fourteen_block_rhs() {
        let r13 = rule(Mode::Dihedral, RuleId::R(13));
        assert_eq!(r13.lhs.len(), 3);
        assert_eq!(r13.rhs.len(), 4 * 5 + 6 * 3 + 4);
        assert!(verify_rule(&r13, 4).unwrap());
        assert!(verify_rule(&r13, 5).unwrap());
    }

    #[test]
    fn mutated_rule_fails_verification() {
        let mut r7 = rule(Mode::Dihedral, RuleId::R(7));
        r7.lhs.pop();
        assert!(!verify_rule(&r7, 1).unwrap());
    }

    #[test]
    fn verify_needs_enough_wires() {
        let r13 = rule(Mode::Dihedral, RuleId::R(13));
        assert_eq!(
            verify_rule(&r13, 3).unwrap_err(),
            RewriteError::TooFewWires { needed: 4, n: 3 }
        );
    }

    #[test]
    fn t_block_match_is_unique() {
        let c = Circuit::new(1, rep(Gate::T(0), 8));
        let matches = find_matches(&c, &rule(Mode::Dihedral, RuleId::R(7)));
        let ltr: Vec<&Match> = matches
            .iter()
            .filter(|m| m.direction == Direction::LeftToRight)
            .collect();
        assert_eq!(ltr.len(), 1);
        assert_eq!(ltr[0].position, 0);
        assert_eq!(ltr[0].assignment, vec![0]);
    }

    #[test]
    fn empty_circuit_matches_identity_producers_backwards() {
        let c = Circuit::identity(1);
        for id in [RuleId::R(7), RuleId::R(10)] {
            let matches = find_matches(&c, &rule(Mode::Dihedral, id));
            assert!(!matches.is_empty());
            assert!(matches
                .iter()
                .all(|m| m.direction == Direction::RightToLeft && m.position == 0));
        }
        assert!(find_matches(&c, &rule(Mode::Dihedral, RuleId::R(12))).is_empty());
    }

    #[test]
    fn x_t_commutation_matches_once() {
        let c = Circuit::new(1, vec![Gate::X(0), Gate::T(0)]);
        let matches = find_matches(&c, &rule(Mode::Dihedral, RuleId::Fig2(1)));
        assert_eq!(
            matches
                .iter()
                .filter(|m| m.direction == Direction::LeftToRight)
                .count(),
            1
        );
    }

    #[test]
    fn apply_r7_cancels_t_block() {
        let c = Circuit::new(1, rep(Gate::T(0), 8));
        let r7 = rule(Mode::Dihedral, RuleId::R(7));
        let m = find_matches(&c, &r7)
            .into_iter()
            .find(|m| m.direction == Direction::LeftToRight)
            .unwrap();
        assert!(apply(&c, &r7, &m).unwrap().is_empty());
    }

    #[test]
    fn apply_r8_turns_u_block_into_t_blocks() {
        let c = Circuit::new(2, rep(Gate::U(0, 1), 4));
        let r8 = rule(Mode::Dihedral, RuleId::R(8));
        let m = find_matches(&c, &r8)
            .into_iter()
            .find(|m| m.direction == Direction::LeftToRight)
            .unwrap();
        let mut want = rep(Gate::T(0), 4);
        want.extend(rep(Gate::T(1), 4));
        assert_eq!(apply(&c, &r8, &m).unwrap().gates, want);
    }

    #[test]
    fn apply_rejects_stale_match() {
        let c = Circuit::new(1, rep(Gate::T(0), 8));
        let r7 = rule(Mode::Dihedral, RuleId::R(7));
        let m = find_matches(&c, &r7)
            .into_iter()
            .find(|m| m.direction == Direction::LeftToRight)
            .unwrap();
        let other = Circuit::new(1, vec![Gate::X(0)]);
        assert_eq!(apply(&other, &r7, &m).unwrap_err(), RewriteError::StaleMatch);
    }

    #[test]
    fn struct_comm_swaps_disjoint_gates() {
        let table = rule_table(Mode::Dihedral);
        let comm = table.iter().find(|r| r.id == RuleId::StructComm).unwrap();
        let c = Circuit::new(3, vec![Gate::X(0), Gate::T(1), Gate::T(1)]);
        let matches = find_matches(&c, comm);
        assert_eq!(matches.len(), 1);
        assert_eq!(
            apply(&c, comm, &matches[0]).unwrap().gates,
            vec![Gate::T(1), Gate::X(0), Gate::T(1)]
        );
        assert!(verify_rule(comm, 4).unwrap());
    }

    #[test]
    fn push_x_past_t() {
        let c = Circuit::new(1, vec![Gate::X(0), Gate::T(0)]);
        let pushed = push_diagonal_left(&c).unwrap();
        let mut want = vec![Gate::OmegaPower(1)];
        want.extend(rep(Gate::T(0), 7));
        want.push(Gate::X(0));
        assert_eq!(pushed.gates, want);
    }

    #[test]
    fn push_leaves_affine_circuits_alone() {
        let c = Circuit::new(2, vec![Gate::cnot(0, 1), Gate::X(1), Gate::swap(0, 1)]);
        assert_eq!(push_diagonal_left(&c).unwrap(), c);
    }

    #[test]
    fn push_t_on_target_becomes_u() {
        let c = Circuit::new(2, vec![Gate::cnot(0, 1), Gate::T(1)]);
        let pushed = push_diagonal_left(&c).unwrap();
        assert_eq!(pushed.gates, vec![Gate::U(0, 1), Gate::cnot(0, 1)]);
        assert_eq!(evaluate(&pushed).unwrap(), evaluate(&c).unwrap());
    }

    #[test]
    fn push_preserves_semantics_and_splits() {
        let c = Circuit::new(3, vec![
            Gate::cnot(0, 1),
            Gate::v(0, 1, 2),
            Gate::X(2),
            Gate::T(0),
            Gate::swap(1, 2),
            Gate::u(0, 2),
        ]);
        let mut trace = Vec::new();
        let pushed = push_diagonal_left_traced(&c, &mut trace).unwrap();
        assert_eq!(evaluate(&pushed).unwrap(), evaluate(&c).unwrap());
        let split = pushed.gates.iter().position(|g| g.is_affine()).unwrap();
        assert!(pushed.gates[..split].iter().all(|g| g.is_diagonal()));
        assert!(pushed.gates[split..].iter().all(|g| g.is_affine()));
        assert!(!trace.is_empty());
    }

    #[test]
    fn reduce_scalar_blocks() {
        let d = Circuit::new(1, vec![Gate::OmegaPower(5), Gate::OmegaPower(5)]);
        assert_eq!(reduce_degrees(&d).unwrap().gates, vec![Gate::OmegaPower(2)]);
    }

    #[test]
    fn reduce_u_fourth_power() {
        let d = Circuit::new(2, rep(Gate::U(0, 1), 4));
        let mut want = rep(Gate::T(0), 4);
        want.extend(rep(Gate::T(1), 4));
        assert_eq!(reduce_degrees(&d).unwrap().gates, want);
    }

    #[test]
    fn reduce_v_square() {
        let d = Circuit::new(3, rep(Gate::V(0, 1, 2), 2));
        let out = reduce_degrees(&d).unwrap();
        let mut want = Vec::new();
        for q in 0..3 {
            want.extend(rep(Gate::T(q), 6));
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            want.extend(rep(Gate::U(i, j), 2));
        }
        assert_eq!(out.gates, want);
        assert_eq!(evaluate(&out).unwrap(), evaluate(&d).unwrap());
    }

    #[test]
    fn reduce_handles_swap_conjugation() {
        let d = Circuit::new(3, vec![Gate::swap(1, 2), Gate::v(0, 1, 2), Gate::T(2), Gate::swap(1, 2)]);
        let out = reduce_degrees(&d).unwrap();
        assert_eq!(evaluate(&out).unwrap(), evaluate(&d).unwrap());
        assert!(out.gates.iter().all(|g| g.is_diagonal()));
    }

    #[test]
    fn reduce_rejects_cnot() {
        let d = Circuit::new(2, vec![Gate::T(0), Gate::cnot(0, 1)]);
        assert_eq!(
            reduce_degrees(&d).unwrap_err(),
            RewriteError::NonDiagonalGate { position: 1 }
        );
    }

    #[test]
    fn both_sides_of_r13_normalize_identically() {
        let r13 = rule(Mode::Dihedral, RuleId::R(13));
        let asg = [0, 1, 2, 3];
        let lhs = Circuit::new(4, instantiate(&r13.lhs, &asg));
        let rhs = Circuit::new(4, instantiate(&r13.rhs, &asg));
        let a = normalize_by_rewriting(&lhs, Mode::Dihedral).unwrap();
        let b = normalize_by_rewriting(&rhs, Mode::Dihedral).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, normalize(&lhs, Mode::Dihedral).unwrap());
    }

    #[test]
    fn rewriting_route_matches_semantic_route() {
        let cases = [
            Circuit::identity(2),
            Circuit::new(1, vec![Gate::X(0), Gate::T(0), Gate::X(0)]),
            Circuit::new(3, vec![
                Gate::v(0, 1, 2),
                Gate::cnot(2, 0),
                Gate::X(1),
                Gate::omega(3),
                Gate::T(0),
                Gate::swap(0, 2),
                Gate::u(1, 2),
            ]),
        ];
        for c in &cases {
            assert_eq!(
                normalize_by_rewriting(c, Mode::Dihedral).unwrap(),
                normalize(c, Mode::Dihedral).unwrap()
            );
        }
    }

    #[test]
    fn cnott_route_agreement() {
        let c = Circuit::new(3, vec![
            Gate::T(1),
            Gate::cnot(0, 1),
            Gate::v(0, 1, 2),
            Gate::cnot(1, 2),
            Gate::u(0, 1),
        ]);
        assert_eq!(
            normalize_by_rewriting(&c, Mode::CnotT).unwrap(),
            normalize(&c, Mode::CnotT).unwrap()
        );
    }
}
