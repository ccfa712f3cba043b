//! Acceptance suite: one test per criterion, each printing a pass line
//! with its runtime (visible under `cargo test -- --nocapture`).

mod common;

use std::time::{Duration, Instant};

use cnotdihedral::enumeration::{
    enumerate_affine, enumerate_closure, enumerate_diagonal, order_formula, CountedSet,
    DEFAULT_CAP,
};
use cnotdihedral::phase_poly::canonicalize;
use cnotdihedral::rewrite::{
    instantiate, normalize_by_rewriting, rule_table, verify_rule, RewriteRule, RuleId, RuleKind,
};
use cnotdihedral::semantics::{index_to_state, state_to_index, PhaseTable};
use cnotdihedral::{evaluate, multilinear, normalize, Circuit, Gate, Mode};

use common::{random_circuit, rng};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

fn report(criterion: u32, name: &str, detail: String, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!(
        "criterion {} ({}): pass ({}, {:.2}s)",
        criterion,
        name,
        detail,
        elapsed.as_secs_f64()
    );
    assert!(
        elapsed < budget,
        "criterion {} exceeded its {:?} budget: {:?}",
        criterion,
        budget,
        elapsed
    );
}

/// Criterion 1: every relation, defining equation and derived rule is
/// sound at minimal arity and embedded in one extra wire, under all
/// injective assignments.
#[test]
fn criterion_1_relation_soundness() {
    let start = Instant::now();
    let table = rule_table(Mode::Dihedral);
    let mut relations = 0;
    let mut defs = 0;
    let mut fig2 = 0;
    for rule in &table {
        let minimal = match rule.kind {
            RuleKind::Pattern => rule.slots,
            RuleKind::DisjointComm => 3,
        };
        for n in [minimal, minimal + 1] {
            assert_eq!(
                verify_rule(rule, n),
                Ok(true),
                "rule {} fails at {} wires",
                rule.id,
                n
            );
        }
        match rule.id {
            RuleId::R(_) => relations += 1,
            RuleId::DefU | RuleId::DefV => defs += 1,
            RuleId::Fig2(_) => fig2 += 1,
            _ => {}
        }
    }
    assert_eq!((relations, defs, fig2), (13, 2, 25));
    for rule in rule_table(Mode::CnotT) {
        assert_eq!(verify_rule(&rule, rule.slots.max(3)), Ok(true));
    }
    report(
        1,
        "relation soundness",
        format!("{} rules verified", table.len()),
        start,
        Duration::from_secs(5),
    );
}

/// Criterion 2: 1000 pseudo-random circuits canonicalize without error
/// and normalize soundly.
#[test]
fn criterion_2_normal_form_existence() {
    let start = Instant::now();
    let mut rng = rng(2);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=40);
        let c = random_circuit(&mut rng, n, len, Mode::Dihedral);
        let op = evaluate(&c).unwrap();
        canonicalize(op.phase()).expect("every circuit phase is canonicalizable");
        let nf = normalize(&c, Mode::Dihedral).unwrap();
        assert_eq!(evaluate(&nf).unwrap(), op);
    }
    report(
        2,
        "normal form existence",
        "1000 circuits, n <= 4, length <= 40".into(),
        start,
        Duration::from_secs(10),
    );
}

fn pattern_rules(mode: Mode, n: usize) -> Vec<RewriteRule> {
    rule_table(mode)
        .into_iter()
        .filter(|r| r.kind == RuleKind::Pattern && r.slots <= n && r.slots > 0)
        .collect()
}

/// Insert an instance of L·R⁻¹ for a random relation at a random
/// position: an equivalence-preserving edit that embeds the relation.
fn splice_relation<R: Rng>(rng: &mut R, c: &mut Circuit, rules: &[RewriteRule]) {
    let rule = rules.choose(rng).unwrap();
    let mut wires: Vec<usize> = (0..c.n).collect();
    wires.shuffle(rng);
    wires.truncate(rule.slots);
    let mut insert = instantiate(&rule.lhs, &wires);
    insert.extend(Circuit::new(c.n, instantiate(&rule.rhs, &wires)).inverse().gates);
    let pos = rng.gen_range(0..=c.gates.len());
    c.gates.splice(pos..pos, insert);
}

/// Swap a few adjacent gate pairs with disjoint support.
fn random_commutations<R: Rng>(rng: &mut R, c: &mut Circuit, count: usize) {
    for _ in 0..count {
        let candidates: Vec<usize> = (0..c.gates.len().saturating_sub(1))
            .filter(|&i| c.gates[i].disjoint_from(&c.gates[i + 1]))
            .collect();
        let Some(&i) = candidates.choose(rng) else { return };
        c.gates.swap(i, i + 1);
    }
}

fn uniqueness_run(mode: Mode, seed: u64) {
    let mut rng = rng(seed);
    for _ in 0..500 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=15);
        let c = random_circuit(&mut rng, n, len, mode);
        let mut edited = c.clone();
        let rules = pattern_rules(mode, n);
        for _ in 0..rng.gen_range(1..=5) {
            splice_relation(&mut rng, &mut edited, &rules);
        }
        let shuffles = rng.gen_range(0..=4);
        random_commutations(&mut rng, &mut edited, shuffles);
        assert_eq!(evaluate(&edited).unwrap(), evaluate(&c).unwrap());
        assert_eq!(normalize(&edited, mode).unwrap(), normalize(&c, mode).unwrap());
    }
    for _ in 0..500 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=20);
        let c1 = random_circuit(&mut rng, n, len, mode);
        let len = rng.gen_range(0..=20);
        let c2 = random_circuit(&mut rng, n, len, mode);
        if evaluate(&c1).unwrap() == evaluate(&c2).unwrap() {
            continue;
        }
        assert_ne!(normalize(&c1, mode).unwrap(), normalize(&c2, mode).unwrap());
    }
}

/// Criterion 3: equivalent edits share a normal form gate-for-gate;
/// inequivalent circuits never do.
#[test]
fn criterion_3_normal_form_uniqueness() {
    let start = Instant::now();
    uniqueness_run(Mode::Dihedral, 3);
    report(
        3,
        "normal form uniqueness",
        "500 spliced pairs + 500 distinct pairs".into(),
        start,
        Duration::from_secs(20),
    );
}

/// Criterion 4: formulas against brute force for the group orders, the
/// diagonal subgroup and the affine subgroup.
#[test]
fn criterion_4_counting() {
    let start = Instant::now();
    let group_cases = [
        (1, Mode::Dihedral, CountedSet::Dihedral, 128u64),
        (2, Mode::Dihedral, CountedSet::Dihedral, 49152),
        (1, Mode::CnotT, CountedSet::CnotT, 8),
        (2, Mode::CnotT, CountedSet::CnotT, 1536),
    ];
    for (n, mode, set, want) in group_cases {
        assert_eq!(order_formula(n, set), BigUint::from(want));
        assert_eq!(enumerate_closure(n, mode, DEFAULT_CAP), Ok(want));
    }
    for (n, want) in [(1, 64u64), (2, 2048), (3, 524288)] {
        assert_eq!(order_formula(n, CountedSet::DiagonalOnly), BigUint::from(want));
        assert_eq!(enumerate_diagonal(n, DEFAULT_CAP), Ok(want));
    }
    for (n, want) in [(1, 2u64), (2, 24), (3, 1344)] {
        assert_eq!(order_formula(n, CountedSet::AffineOnly), BigUint::from(want));
        assert_eq!(enumerate_affine(n), Ok(want));
    }
    report(
        4,
        "counting",
        "closure n<=2, diagonal n<=3, affine n<=3".into(),
        start,
        Duration::from_secs(60),
    );
}

/// Criterion 5: the canonical tuple of the four-variable parity phase.
#[test]
fn criterion_5_four_parity_tuple() {
    let start = Instant::now();
    let values: Vec<u8> = (0..16).map(|i: usize| (i.count_ones() % 2) as u8).collect();
    let t = PhaseTable::from_values(4, values).unwrap();
    let d = canonicalize(&t).unwrap();
    assert_eq!(d.a0(), 0);
    assert_eq!(d.a(), &[5, 5, 5, 5]);
    for i in 0..4 {
        for j in i + 1..4 {
            assert_eq!(d.b(i, j), 3);
            for k in j + 1..4 {
                assert_eq!(d.c(i, j, k), 1);
            }
        }
    }
    report(
        5,
        "four-variable parity tuple",
        "a=5, b=3, c=1, a0=0".into(),
        start,
        Duration::from_secs(5),
    );
}

/// Criterion 6: multilinear structure of circuit phases: degree <= 3,
/// triples divisible by 4, residual pairs divisible by 2.
#[test]
fn criterion_6_multilinear_structure() {
    let start = Instant::now();
    let mut rng = rng(6);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=5);
        let len = rng.gen_range(0..=30);
        let c = random_circuit(&mut rng, n, len, Mode::Dihedral);
        let op = evaluate(&c).unwrap();
        let q = multilinear(op.phase());
        let mut triple_of = Vec::new();
        for (mask, coeff) in q.coeffs() {
            match mask.count_ones() {
                0..=2 => {}
                3 => {
                    assert_eq!(coeff % 4, 0, "triple coefficient {} not divisible by 4", coeff);
                    triple_of.push(mask);
                }
                _ => panic!("coefficient of degree {} present", mask.count_ones()),
            }
        }
        // triangular subtraction by hand: each containing triple adds
        // 2·(coeff/4) to a pair
        for i in 0..n {
            for j in i + 1..n {
                let pair = 1u32 << i | 1 << j;
                let carried: u32 = triple_of
                    .iter()
                    .filter(|&&t| t & pair == pair)
                    .map(|&t| 2 * (q.coeff(t) as u32 / 4))
                    .sum();
                let residual = (q.coeff(pair) as u32 + carried) % 8;
                assert_eq!(residual % 2, 0, "residual pair coefficient {} is odd", residual);
            }
        }
        canonicalize(op.phase()).unwrap();
    }
    report(
        6,
        "multilinear structure",
        "1000 circuits, n <= 5".into(),
        start,
        Duration::from_secs(10),
    );
}

/// Criterion 7: the rewriting route and the semantic route emit the
/// same gate list on every input.
#[test]
fn criterion_7_route_agreement() {
    let start = Instant::now();
    let mut rng = rng(7);
    for _ in 0..500 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=25);
        let c = random_circuit(&mut rng, n, len, Mode::Dihedral);
        assert_eq!(
            normalize_by_rewriting(&c, Mode::Dihedral).unwrap(),
            normalize(&c, Mode::Dihedral).unwrap()
        );
    }
    report(
        7,
        "route agreement",
        "500 circuits, n <= 4".into(),
        start,
        Duration::from_secs(30),
    );
}

/// Criterion 8: CNOT+T normal forms carry no X and no scalar, and the
/// existence and uniqueness runs hold in that mode.
#[test]
fn criterion_8_cnott_mode() {
    let start = Instant::now();
    let mut rng = rng(8);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=40);
        let c = random_circuit(&mut rng, n, len, Mode::CnotT);
        let op = evaluate(&c).unwrap();
        canonicalize(op.phase()).expect("every circuit phase is canonicalizable");
        let nf = normalize(&c, Mode::CnotT).unwrap();
        assert!(nf
            .gates
            .iter()
            .all(|g| !matches!(g, Gate::X(_) | Gate::OmegaPower(_))));
        assert_eq!(evaluate(&nf).unwrap(), op);
    }
    uniqueness_run(Mode::CnotT, 88);
    report(
        8,
        "CNOT+T mode",
        "existence + uniqueness re-run, scalar- and X-free".into(),
        start,
        Duration::from_secs(40),
    );
}

/// The state/index conversion the criteria rely on, pinned once.
#[test]
fn index_convention_is_big_endian() {
    assert_eq!(state_to_index(0b001, 3), 4); // x0 = 1 -> index 100₂
    assert_eq!(index_to_state(4, 3), 0b001);
}
