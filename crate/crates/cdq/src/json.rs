//! JSON views of operators, canonical tuples and count reports.
//!
//! Matrix rows and offsets are bit strings with the character at
//! position j holding the coefficient of input qubit j; phase tables
//! are arrays indexed by basis state, big-endian in qubit 0. Counts
//! are decimal strings so arbitrary-precision values survive JSON.

use cnotdihedral::enumeration::CountReport;
use cnotdihedral::semantics::AffineMap;
use cnotdihedral::{CanonicalDiagonal, ExactOperator};
use serde_json::{json, Map, Value};

fn bitstring(bits: impl Iterator<Item = bool>) -> String {
    bits.map(|b| if b { '1' } else { '0' }).collect()
}

fn affine_json(f: &AffineMap) -> (Value, Value) {
    let n = f.n();
    let matrix: Vec<String> = (0..n)
        .map(|q| bitstring((0..n).map(|j| f.entry(q, j))))
        .collect();
    let offset = bitstring((0..n).map(|q| f.offset_bit(q)));
    (json!(matrix), json!(offset))
}

/// `{"n":…, "phase":[…], "matrix":[…], "offset":"…"}`
pub fn operator_json(op: &ExactOperator) -> Value {
    let (matrix, offset) = affine_json(op.affine());
    json!({
        "n": op.n(),
        "phase": op.phase().values(),
        "matrix": matrix,
        "offset": offset,
    })
}

/// `{"a0":…, "a":[…], "b":{"i,j":…}, "c":{"i,j,k":…}}`
pub fn canonical_json(d: &CanonicalDiagonal) -> Value {
    let mut b = Map::new();
    for ((i, j), v) in d.pairs() {
        b.insert(format!("{},{}", i, j), json!(v));
    }
    let mut c = Map::new();
    for ((i, j, k), v) in d.triples() {
        c.insert(format!("{},{},{}", i, j, k), json!(v));
    }
    json!({
        "a0": d.a0(),
        "a": d.a(),
        "b": b,
        "c": c,
    })
}

/// The canonical tuple of a circuit next to its affine map.
pub fn phase_poly_json(d: &CanonicalDiagonal, f: &AffineMap) -> Value {
    let (matrix, offset) = affine_json(f);
    json!({
        "n": d.n(),
        "diagonal": canonical_json(d),
        "affine": { "matrix": matrix, "offset": offset },
    })
}

/// A count report with decimal-string values.
pub fn count_report_json(r: &CountReport) -> Value {
    json!({
        "n": r.n,
        "mode": r.set.to_string(),
        "formula_value": r.formula_value.to_string(),
        "enumerated_value": r.enumerated_value.as_ref().map(|v| v.to_string()),
        "match": r.matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cnotdihedral::enumeration::{CountedSet, DEFAULT_CAP};
    use cnotdihedral::{evaluate, Circuit, Gate};

    #[test]
    fn operator_json_shape() {
        let c = Circuit::new(2, vec![Gate::cnot(0, 1), Gate::T(0)]);
        let v = operator_json(&evaluate(&c).unwrap());
        assert_eq!(v["n"], 2);
        assert_eq!(v["phase"], json!([0, 0, 1, 1]));
        assert_eq!(v["matrix"], json!(["10", "11"]));
        assert_eq!(v["offset"], "00");
    }

    #[test]
    fn canonical_json_shape() {
        let ccz = cnotdihedral::semantics::PhaseTable::from_values(
            3,
            vec![0, 0, 0, 0, 0, 0, 0, 4],
        )
        .unwrap();
        let d = cnotdihedral::canonicalize(&ccz).unwrap();
        let v = canonical_json(&d);
        assert_eq!(v["a0"], 0);
        assert_eq!(v["a"], json!([1, 1, 1]));
        assert_eq!(v["b"]["0,1"], 3);
        assert_eq!(v["c"]["0,1,2"], 1);
    }

    #[test]
    fn count_report_json_shape() {
        let r = CountReport::compute(1, CountedSet::Dihedral, true, DEFAULT_CAP).unwrap();
        let v = count_report_json(&r);
        assert_eq!(v["formula_value"], "128");
        assert_eq!(v["enumerated_value"], "128");
        assert_eq!(v["match"], true);
        assert_eq!(v["mode"], "dihedral");
    }
}
