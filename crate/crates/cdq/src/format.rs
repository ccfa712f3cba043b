//! The `.cdq` circuit file format.
//!
//! ```text
//! # optional comments
//! qubits 3
//! cnot 0 1
//! v 2 0 1      # qubit lists of swap/u/v are sorted on construction
//! omega 5
//! ```
//!
//! Mnemonics are case-insensitive on input and lowercase on output.
//! Gate order in the file is application order.

use std::fmt;
use std::fmt::Write as _;

use cnotdihedral::{Circuit, Gate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax { line: usize, message: String },
    DuplicateHeader { line: usize },
    MissingHeader,
    IndexOverflow { line: usize, index: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, message } => write!(f, "line {}: {}", line, message),
            ParseError::DuplicateHeader { line } => {
                write!(f, "line {}: duplicate qubits header", line)
            }
            ParseError::MissingHeader => write!(f, "missing qubits header"),
            ParseError::IndexOverflow { line, index } => {
                write!(f, "line {}: qubit index {} out of range", line, index)
            }
        }
    }
}

impl std::error::Error for ParseError {}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn parse_index(token: &str, line: usize, n: usize) -> Result<usize, ParseError> {
    let index: usize = token.parse().map_err(|_| {
        if token.chars().all(|c| c.is_ascii_digit()) && !token.is_empty() {
            ParseError::IndexOverflow { line, index: token.into() }
        } else {
            syntax(line, format!("expected a qubit index, found {:?}", token))
        }
    })?;
    if index >= n {
        return Err(ParseError::IndexOverflow { line, index: token.into() });
    }
    Ok(index)
}

fn distinct(indices: &[usize], line: usize) -> Result<(), ParseError> {
    for (i, a) in indices.iter().enumerate() {
        if indices[i + 1..].contains(a) {
            return Err(syntax(line, format!("repeated qubit index {}", a)));
        }
    }
    Ok(())
}

/// Parse `.cdq` text into a circuit.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut n: Option<usize> = None;
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let mnemonic = tokens.next().expect("nonempty line").to_ascii_lowercase();
        let args: Vec<&str> = tokens.collect();
        if mnemonic == "qubits" {
            if n.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            if args.len() != 1 {
                return Err(syntax(line, "qubits takes exactly one argument"));
            }
            let count: usize = args[0]
                .parse()
                .map_err(|_| syntax(line, format!("bad wire count {:?}", args[0])))?;
            n = Some(count);
            continue;
        }
        let Some(n) = n else {
            return Err(ParseError::MissingHeader);
        };
        let arity = match mnemonic.as_str() {
            "omega" | "x" | "t" => 1,
            "cnot" | "swap" | "u" => 2,
            "v" => 3,
            other => return Err(syntax(line, format!("unknown gate {:?}", other))),
        };
        if args.len() != arity {
            return Err(syntax(
                line,
                format!("{} takes {} argument(s), found {}", mnemonic, arity, args.len()),
            ));
        }
        let gate = if mnemonic == "omega" {
            let power: u8 = args[0]
                .parse()
                .map_err(|_| syntax(line, format!("bad scalar exponent {:?}", args[0])))?;
            if power > 7 {
                return Err(syntax(line, format!("scalar exponent {} outside 0..=7", power)));
            }
            Gate::OmegaPower(power)
        } else {
            let q: Vec<usize> = args
                .iter()
                .map(|a| parse_index(a, line, n))
                .collect::<Result<_, _>>()?;
            distinct(&q, line)?;
            match mnemonic.as_str() {
                "x" => Gate::X(q[0]),
                "t" => Gate::T(q[0]),
                "cnot" => Gate::cnot(q[0], q[1]),
                "swap" => Gate::swap(q[0], q[1]),
                "u" => Gate::u(q[0], q[1]),
                _ => Gate::v(q[0], q[1], q[2]),
            }
        };
        gates.push(gate);
    }
    match n {
        Some(n) => Ok(Circuit::new(n, gates)),
        None => Err(ParseError::MissingHeader),
    }
}

/// Canonical `.cdq` text: one gate per line, lowercase mnemonics,
/// sorted qubit lists for the symmetric gates. `parse(print(c)) == c`
/// for every valid circuit.
pub fn print(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", c.n);
    for g in &c.gates {
        let _ = writeln!(out, "{}", g);
    }
    out
}
