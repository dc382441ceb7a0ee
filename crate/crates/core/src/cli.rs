//! The `clasper` command line.
//!
//! Exit codes: 0 success or equivalent, 1 not equivalent or invalid,
//! 2 unknown, 3 usage or parse error.

use crate::decide::{decide_y2, Decision, Mode};
use crate::error::Error;
use crate::fgab::FgAbelianGroup;
use crate::invariants::{validate_record, InvariantRecord};
use crate::io::{certificate_to_json, graphs_from_json, homomorphism_from_json, record_from_str, record_to_string};
use crate::surgery::surgery_s;
use crate::verify::{verify_cubic, verify_square, verify_tri, verify_trivectors};
use crate::ygraph::{y_group, SpecialPair};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "clasper",
    version,
    about = "Invariants, formal surgery and Y-equivalence deciders for 3-manifold records"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report the constraint violations of a record.
    Validate { record: PathBuf },
    /// Decide Y1- or Y2-equivalence of two records.
    Decide {
        #[arg(long, value_enum)]
        mode: ModeArg,
        a: PathBuf,
        b: PathBuf,
        /// Spin structure of the first record (bitstring); spin modes only.
        #[arg(long)]
        spin_a: Option<String>,
        /// Spin structure of the second record (bitstring); spin modes only.
        #[arg(long)]
        spin_b: Option<String>,
        /// JSON list of isomorphisms, each a list of generator images.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
    /// Apply formal surgery along a list of graphs and print the result.
    Surger {
        record: PathBuf,
        #[arg(long)]
        graphs: PathBuf,
    },
    /// Run a lemma oracle up to a size bound.
    Verify {
        #[arg(long, value_enum)]
        lemma: LemmaArg,
        /// Group order bound (trivectors), generator count (cubic, tri) or
        /// cases per shape (square).
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the invariant factors of the graph group of (A, s).
    Ygroup {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        orders: Vec<u64>,
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        special: Vec<i64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Y1Spin,
    Y2Spin,
    Y2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LemmaArg {
    Trivectors,
    Cubic,
    Tri,
    Square,
}

/// Caps the worker pool at `CLASPER_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("CLASPER_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the command line, writing reports to `out` and errors to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Invalid(report)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"));
            EXIT_NO
        }
    }
}

enum Failure {
    Usage(String),
    Invalid(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_record(path: &Path) -> Result<InvariantRecord, Failure> {
    let r = record_from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let violations = validate_record(&r);
    if !violations.is_empty() {
        return Err(Failure::Invalid(violations_json(path, &violations)));
    }
    Ok(r)
}

fn violations_json(path: &Path, v: &[crate::invariants::Violation]) -> Value {
    json!({
        "file": path.display().to_string(),
        "valid": false,
        "violations": v.iter().map(|x| json!({"constraint": x.constraint, "witness": x.witness})).collect::<Vec<_>>(),
    })
}

fn parse_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print(out: &mut dyn Write, v: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Validate { record } => {
            let r =
                record_from_str(&read(&record)?).map_err(|e| Failure::Usage(format!("{}: {e}", record.display())))?;
            let violations = validate_record(&r);
            if violations.is_empty() {
                print(out, &json!({"file": record.display().to_string(), "valid": true, "violations": []}));
                Ok(EXIT_OK)
            } else {
                print(out, &violations_json(&record, &violations));
                Ok(EXIT_NO)
            }
        }
        Command::Decide { mode, a, b, spin_a, spin_b, candidates } => {
            let (ra, rb) = (load_record(&a)?, load_record(&b)?);
            let sigma = |r: &InvariantRecord, s: &Option<String>| -> Result<u64, Failure> {
                Ok(match s {
                    Some(bits) => r.spin.parse_bitstring(bits)?,
                    None => 0,
                })
            };
            let mode = match mode {
                ModeArg::Y1Spin => Mode::Y1Spin { sigma: sigma(&ra, &spin_a)?, sigma_prime: sigma(&rb, &spin_b)? },
                ModeArg::Y2Spin => Mode::Y2Spin { sigma: sigma(&ra, &spin_a)?, sigma_prime: sigma(&rb, &spin_b)? },
                ModeArg::Y2 => {
                    if spin_a.is_some() || spin_b.is_some() {
                        return Err(Failure::Usage("--spin-a/--spin-b apply to the spin modes only".into()));
                    }
                    Mode::Y2
                }
            };
            let cands = match candidates {
                Some(path) => {
                    let v = parse_json(&path)?;
                    let list = v.as_array().ok_or_else(|| Failure::Usage("candidates should be a list".into()))?;
                    list.iter()
                        .map(|c| homomorphism_from_json(&ra.homology, &rb.homology, c))
                        .collect::<Result<Vec<_>, _>>()?
                }
                None => Vec::new(),
            };
            match decide_y2(&ra, &rb, mode, &cands) {
                Ok(Decision::Equivalent(c)) => {
                    print(out, &json!({"decision": "equivalent", "certificate": certificate_to_json(&ra.spin, &c)}));
                    Ok(EXIT_OK)
                }
                Ok(Decision::NotEquivalent(reason)) => {
                    print(out, &json!({"decision": "not-equivalent", "reason": reason}));
                    Ok(EXIT_NO)
                }
                Ok(Decision::Unknown(reason)) => {
                    print(out, &json!({"decision": "unknown", "reason": reason}));
                    Ok(EXIT_UNKNOWN)
                }
                Err(Error::InfiniteSearchSpace) => {
                    print(out, &json!({"decision": "unknown", "reason": Error::InfiniteSearchSpace.to_string()}));
                    Ok(EXIT_UNKNOWN)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Surger { record, graphs } => {
            let r = load_record(&record)?;
            let g = graphs_from_json(&r.spin, &parse_json(&graphs)?)?;
            let _ = write!(out, "{}", record_to_string(&surgery_s(&r, &g)?));
            Ok(EXIT_OK)
        }
        Command::Verify { lemma, bound, seed } => {
            let report = match lemma {
                LemmaArg::Trivectors => verify_trivectors(bound)?,
                LemmaArg::Cubic => verify_cubic(bound as usize)?,
                LemmaArg::Tri => verify_tri(bound as usize)?,
                LemmaArg::Square => verify_square(bound, seed)?,
            };
            print(
                out,
                &json!({
                    "lemma": report.lemma,
                    "groups": report.groups,
                    "cases": report.cases,
                    "passed": report.passed(),
                    "failures": report.failures,
                }),
            );
            Ok(if report.passed() { EXIT_OK } else { EXIT_NO })
        }
        Command::Ygroup { orders, special } => {
            if orders.contains(&1) {
                return Err(Failure::Usage("orders must not contain 1".into()));
            }
            let a = FgAbelianGroup::new(orders.iter().copied());
            let s = if special.is_empty() { a.zero() } else { a.element(&special)? };
            let ys = y_group(&SpecialPair::new(s)?)?;
            print(out, &json!({"orders": a.orders(), "special": special, "invariant_factors": ys.invariant_factors()}));
            Ok(EXIT_OK)
        }
    }
}
