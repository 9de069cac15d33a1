//! `schurcert`: sign certificates for block matrices from the command line.
//!
//! Exit status: 0 positive result, 1 negative result, 2 criterion not
//! applicable (singular unit, failed gate, inconclusive classification),
//! 3 bad input or IO failure.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use schur_cert::{
    check_nn, check_pd, check_pd_bidiagonal, classify_critical_point, classify_hessian, count_inequalities,
    example_l2_functional, is_bidiagonal, oracle, recursion_depth, schur_first, schur_second, BlockMatrix, CheckMode,
    Classification, Error, NnVerdict, PdVerdict, Tolerances,
};

const POSITIVE: u8 = 0;
const NEGATIVE: u8 = 1;
const NOT_APPLICABLE: u8 = 2;
const BAD_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "schurcert",
    version,
    about = "Definiteness certificates for self-adjoint block matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide positive definiteness (pd) or nonnegativity (nn) of a block matrix file.
    Check {
        kind: CheckKind,
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Evaluate every chain instead of stopping at the first violation (pd only).
        #[arg(long)]
        full_tree: bool,
        /// Override a tolerance, e.g. `--tol pd_eps=1e-8`. Repeatable.
        #[arg(long = "tol", value_name = "KEY=VAL")]
        tol: Vec<String>,
    },
    /// Number of leaf inequalities of the first-kind criterion for n blocks.
    Count { n: usize },
    /// Recursion depth ⌈log₂ n⌉ of the first-kind criterion.
    Depth { n: usize },
    /// Apply one Schur operator and print the result in the input format.
    Schur {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: SchurKind,
        #[arg(long, default_value_t = 1)]
        i: u8,
        #[arg(long, default_value_t = 2)]
        j: u8,
        #[arg(long = "tol", value_name = "KEY=VAL")]
        tol: Vec<String>,
    },
    /// Classify a critical point from its Hessian.
    Classify {
        #[arg(long, value_enum, conflicts_with = "hessian", required_unless_present = "hessian")]
        example: Option<Example>,
        /// Truncation dimension for the built-in example.
        #[arg(long, default_value_t = 4)]
        trunc: usize,
        /// Block matrix file holding the Hessian; the gradient check is skipped.
        #[arg(long)]
        hessian: Option<PathBuf>,
        /// Finite-difference step (default 1e-3·max(1, ‖y‖)).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        json: bool,
        #[arg(long = "tol", value_name = "KEY=VAL")]
        tol: Vec<String>,
    },
    /// Compare the criteria with the eigenvalue oracle on the seeded corpus.
    Sweep {
        /// Inclusive seed range `A..B`.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Pd,
    Nn,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchurKind {
    First,
    Second,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    L2,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: BAD_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericallySingular { .. } | Error::NoConvergence { .. } => NOT_APPLICABLE,
            _ => BAD_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            kind,
            file,
            json,
            full_tree,
            tol,
        } => cmd_check(kind, &file, json, full_tree, &tol),
        Command::Count { n } => cmd_count(n),
        Command::Depth { n } => cmd_depth(n),
        Command::Schur { file, kind, i, j, tol } => cmd_schur(&file, kind, i, j, &tol),
        Command::Classify {
            example,
            trunc,
            hessian,
            step,
            json,
            tol,
        } => cmd_classify(example, trunc, hessian.as_deref(), step, json, &tol),
        Command::Sweep { seeds, n_max, out } => cmd_sweep(&seeds, n_max, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn tolerances(overrides: &[String]) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    for kv in overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Failure::input(format!("--tol expects KEY=VAL, got {kv:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("--tol {key}: {value:?} is not a number")))?;
        tol = tol.with(key.trim(), value)?;
    }
    Ok(tol)
}

fn load(path: &Path) -> Result<BlockMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    BlockMatrix::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_check(kind: CheckKind, file: &Path, json: bool, full_tree: bool, tol: &[String]) -> Outcome {
    let tol = tolerances(tol)?;
    let b = load(file)?;
    match kind {
        CheckKind::Pd => {
            let mode = if full_tree {
                CheckMode::FullTree
            } else {
                CheckMode::EarlyExit
            };
            let cert = check_pd(&b, &tol, mode)?;
            let bidiagonal = if b.order() > 1 && is_bidiagonal(&b, &tol) {
                Some(check_pd_bidiagonal(&b, &tol)?)
            } else {
                None
            };
            if json {
                let mut doc = json!({ "kind": "pd", "certificate": cert });
                if let Some(bi) = &bidiagonal {
                    doc["bidiagonal"] = json!(bi);
                }
                emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                ));
            } else {
                let mut text = cert.to_string();
                if let Some(bi) = &bidiagonal {
                    text += &format!(
                        "\nbidiagonal structure: {} checks, verdict {:?}\n{bi}",
                        bi.leaf_count, bi.verdict
                    );
                }
                emit(&text);
            }
            Ok(match cert.verdict {
                PdVerdict::PositiveDefinite => POSITIVE,
                PdVerdict::NotPositiveDefinite => NEGATIVE,
                PdVerdict::Indeterminate => NOT_APPLICABLE,
            })
        }
        CheckKind::Nn => {
            if full_tree {
                return Err(Failure::input("--full-tree applies to pd only"));
            }
            let cert = check_nn(&b, &tol)?;
            if json {
                let doc = json!({ "kind": "nn", "certificate": cert });
                emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                ));
            } else {
                emit(&cert.to_string());
            }
            Ok(match cert.verdict {
                NnVerdict::Nonnegative => POSITIVE,
                NnVerdict::NotNonnegative => NEGATIVE,
                NnVerdict::PreconditionFailed => NOT_APPLICABLE,
            })
        }
    }
}

fn require_positive(n: usize) -> Result<(), Failure> {
    if n == 0 {
        Err(Failure::input("n must be at least 1"))
    } else {
        Ok(())
    }
}

fn cmd_count(n: usize) -> Outcome {
    require_positive(n)?;
    emit(&format!("{}\n", count_inequalities(n)));
    Ok(POSITIVE)
}

fn cmd_depth(n: usize) -> Outcome {
    require_positive(n)?;
    emit(&format!("{}\n", recursion_depth(n)));
    Ok(POSITIVE)
}

fn cmd_schur(file: &Path, kind: SchurKind, i: u8, j: u8, tol: &[String]) -> Outcome {
    let tol = tolerances(tol)?;
    let b = load(file)?;
    let out = match kind {
        SchurKind::First => schur_first(&b, i, j, &tol)?,
        SchurKind::Second => schur_second(&b, &tol)?,
    };
    emit(&format!("{}\n", out.to_json()));
    Ok(POSITIVE)
}

fn cmd_classify(
    example: Option<Example>,
    trunc: usize,
    hessian: Option<&Path>,
    step: Option<f64>,
    json: bool,
    tol: &[String],
) -> Outcome {
    let tol = tolerances(tol)?;
    if step.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
        return Err(Failure::input("--step must be positive"));
    }
    let report = match (example, hessian) {
        (Some(Example::L2), _) => {
            let phi = example_l2_functional(trunc)?;
            let y: Vec<Vec<f64>> = phi.dims().iter().map(|&d| vec![0.0; d]).collect();
            classify_critical_point(&phi, &y, &tol, step, None)?
        }
        (None, Some(path)) => classify_hessian(&load(path)?, &tol),
        (None, None) => return Err(Failure::input("give --example or --hessian")),
    };
    if json {
        emit(&format!("{}\n", report.to_json()));
    } else {
        emit(&report.to_string());
    }
    Ok(match report.classification {
        Classification::StrongLocalMin | Classification::StrongLocalMax => POSITIVE,
        Classification::NotAMin | Classification::NotAMax => NEGATIVE,
        Classification::Inconclusive => NOT_APPLICABLE,
    })
}

fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, Failure> {
    let bad = || Failure::input(format!("--seeds expects A..B, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

fn cmd_sweep(seeds: &str, n_max: usize, out: &Path) -> Outcome {
    let seeds = parse_seeds(seeds)?;
    require_positive(n_max)?;
    let file = fs::File::create(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let rows = oracle::sweep(seeds, n_max, &Tolerances::default())?;
    oracle::write_sweep_csv(&rows, file).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let disagreements = rows.iter().filter(|r| r.agree == "false").count();
    let skipped = rows.iter().filter(|r| r.agree == "skipped").count();
    eprintln!(
        "{} instances, {skipped} skipped at the tolerance boundary, {disagreements} disagreements",
        rows.len()
    );
    Ok(if disagreements == 0 { POSITIVE } else { NEGATIVE })
}
