//! Command-line front end: normalization, equivalence, exact
//! simulation, phase polynomials, counting and relation verification
//! over `.cdq` circuit files.
//!
//! Exit codes: 0 success (and "equivalent"), 1 inequivalent or failed
//! verification, 2 parse/validation errors, 3 enumeration cap
//! exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cdq::{parse, print};
use cnotdihedral::circuit::validate;
use cnotdihedral::enumeration::{CountReport, CountedSet, EnumerationError, DEFAULT_CAP};
use cnotdihedral::normal_form::normalize;
use cnotdihedral::phase_poly::canonicalize;
use cnotdihedral::rewrite::{normalize_by_rewriting_traced, rule_table, verify_rule, RuleKind};
use cnotdihedral::semantics::evaluate;
use cnotdihedral::{Circuit, Mode};

#[derive(Parser)]
#[command(name = "cdq", version, about = "Exact tools for CNOT-dihedral circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Dihedral,
    Cnott,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Dihedral => Mode::Dihedral,
            ModeArg::Cnott => Mode::CnotT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Semantic,
    Rewriting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum What {
    Group,
    Diagonal,
    Affine,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a circuit to its unique normal form.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dihedral")]
        mode: ModeArg,
        /// Normalization route; both emit identical circuits.
        #[arg(long, value_enum, default_value = "semantic")]
        via: Route,
        /// Log each applied rule to standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Decide whether two circuits implement the same operator.
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, value_enum, default_value = "dihedral")]
        mode: ModeArg,
    },
    /// Print the exact operator of a circuit, or its action on one
    /// basis state.
    Simulate {
        file: PathBuf,
        /// Emit JSON even for single-state queries.
        #[arg(long)]
        json: bool,
        /// Basis state as a bit string (qubit 0 first).
        #[arg(long)]
        input: Option<String>,
    },
    /// Print the canonical phase coefficients and affine map.
    Phasepoly { file: PathBuf },
    /// Evaluate the group-order formulas, optionally confirming by
    /// brute force.
    Count {
        #[arg(long)]
        qubits: usize,
        #[arg(long, value_enum, default_value = "dihedral")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "group")]
        what: What,
        /// Also enumerate the set by brute force and compare.
        #[arg(long)]
        enumerate: bool,
        /// Element cap for the brute-force enumerations.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Check every relation and derived rule semantically.
    VerifyRelations {
        #[arg(long, value_enum, default_value = "dihedral")]
        mode: ModeArg,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn load(path: &PathBuf, mode: Mode) -> Result<Circuit, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))?;
    let circuit = parse(&text).map_err(|e| fail(2, format!("{}: {}", path.display(), e)))?;
    if let Err(violations) = validate(&circuit, mode) {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(fail(2, format!("{}: {}", path.display(), list.join("; "))));
    }
    Ok(circuit)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Normalize { file, mode, via, trace } => {
            let mode = Mode::from(mode);
            let c = load(&file, mode)?;
            let nf = match via {
                Route::Semantic => {
                    if trace {
                        eprintln!("# trace: semantic route applies no rewrite rules");
                    }
                    normalize(&c, mode).map_err(|e| fail(2, e.to_string()))?
                }
                Route::Rewriting => {
                    let mut events = Vec::new();
                    let nf = normalize_by_rewriting_traced(&c, mode, &mut events)
                        .map_err(|e| fail(2, e.to_string()))?;
                    if trace {
                        for e in &events {
                            eprintln!("({}, {}, {})", e.rule, e.position, e.direction);
                        }
                    }
                    nf
                }
            };
            print!("{}", print(&nf));
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { file1, file2, mode } => {
            let mode = Mode::from(mode);
            let c1 = load(&file1, mode)?;
            let c2 = load(&file2, mode)?;
            let same = cnotdihedral::equivalent(&c1, &c2, mode)
                .map_err(|e| fail(2, e.to_string()))?;
            if same {
                println!("equivalent");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("inequivalent");
                Ok(ExitCode::from(1))
            }
        }
        Command::Simulate { file, json, input } => {
            let c = load(&file, Mode::Dihedral)?;
            let op = evaluate(&c).map_err(|e| fail(2, e.to_string()))?;
            match input {
                Some(bits) => {
                    if bits.len() != c.n || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                        return Err(fail(2, format!(
                            "input must be {} bits of 0/1, found {:?}",
                            c.n, bits
                        )));
                    }
                    let mut x = 0u32;
                    for (q, byte) in bits.bytes().enumerate() {
                        x |= u32::from(byte == b'1') << q;
                    }
                    let (phase, y) = op.apply(x);
                    let out: String = (0..c.n)
                        .map(|q| if y >> q & 1 == 1 { '1' } else { '0' })
                        .collect();
                    if json {
                        println!(
                            "{}",
                            serde_json::json!({ "phase": phase, "output": out })
                        );
                    } else {
                        println!("({}, {})", phase, out);
                    }
                }
                None => println!("{}", cdq::json::operator_json(&op)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Phasepoly { file } => {
            let c = load(&file, Mode::Dihedral)?;
            let op = evaluate(&c).map_err(|e| fail(2, e.to_string()))?;
            let d = canonicalize(op.phase()).map_err(|e| fail(2, e.to_string()))?;
            println!("{}", cdq::json::phase_poly_json(&d, op.affine()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Count { qubits, mode, what, enumerate, cap } => {
            if qubits == 0 {
                return Err(fail(2, "count needs --qubits >= 1"));
            }
            let set = match what {
                What::Group => match Mode::from(mode) {
                    Mode::Dihedral => CountedSet::Dihedral,
                    Mode::CnotT => CountedSet::CnotT,
                },
                What::Diagonal => CountedSet::DiagonalOnly,
                What::Affine => CountedSet::AffineOnly,
            };
            let report = CountReport::compute(qubits, set, enumerate, cap).map_err(|e| {
                let code = match e {
                    EnumerationError::CapExceeded { .. } => 3,
                    EnumerationError::TooManyWires { .. } => 3,
                };
                fail(code, e.to_string())
            })?;
            println!("{}", cdq::json::count_report_json(&report));
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyRelations { mode } => {
            let mode = Mode::from(mode);
            let mut all_pass = true;
            for rule in rule_table(mode) {
                let minimal = match rule.kind {
                    RuleKind::Pattern => rule.slots,
                    RuleKind::DisjointComm => 3,
                };
                let ok = verify_rule(&rule, minimal)
                    .and_then(|a| verify_rule(&rule, minimal + 1).map(|b| a && b))
                    .map_err(|e| fail(2, e.to_string()))?;
                println!("{:<18} {}", rule.id.to_string(), if ok { "pass" } else { "FAIL" });
                all_pass &= ok;
            }
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
