//! Command-line front end. Every command prints one JSON document on
//! stdout and exits with 0 when the property holds, 1 when it fails and
//! 2 on input or capacity errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cone::PolyCone;
use crate::error::{Error, Result};
use crate::matrix::{parse_rational, RMatrix, Rational};
use crate::patterns::{block_triangularize, is_fully_indecomposable, is_monomial, is_row_positive, BlockKind};
use crate::preservers::{
    analyze_preserver, factor_map, falsify_preserver, AnalysisBudget, FactorKind, Factorization, FalsifyOutcome,
    LinearMap, PreserverReport, RankOneCheck, RankOneOutcome, TheoremFlags, Verdict,
};
use crate::semipos::{
    classify_left_sp, classify_msp, classify_sp, decompose_diff_msp, decompose_sum_sp, msp_basis, sample_sp,
    sp_basis, MspVerdict, SpVerdict,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "semipos", version, about = "Exact semipositivity certificates over polyhedral cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a matrix.
    Check {
        kind: CheckKind,
        matrix: PathBuf,
        #[command(flatten)]
        cones: ConeArgs,
    },
    /// Inspect a cone file.
    Cone {
        op: ConeOp,
        cone: PathBuf,
        /// Point to test, for `member`.
        #[arg(allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Build a basis of m×n matrices.
    Basis {
        kind: CheckKind,
        m: usize,
        n: usize,
        #[command(flatten)]
        cones: ConeArgs,
    },
    /// Split a matrix into semipositive parts.
    Decompose {
        kind: DecomposeKind,
        matrix: PathBuf,
        #[command(flatten)]
        cones: ConeArgs,
    },
    /// Examine a linear map on matrices.
    Preserver {
        op: PreserverOp,
        map: PathBuf,
        #[command(flatten)]
        cones: ConeArgs,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Zero-pattern predicates.
    Pattern { op: PatternOp, matrix: PathBuf },
    /// Draw a random semipositive matrix.
    Sample {
        kind: SampleKind,
        m: usize,
        n: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        cones: ConeArgs,
    },
}

#[derive(Debug, Args)]
struct ConeArgs {
    /// Cone on the domain side; defaults to the nonnegative orthant.
    #[arg(long)]
    cone1: Option<PathBuf>,
    /// Cone on the codomain side; defaults to the nonnegative orthant.
    #[arg(long)]
    cone2: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckKind {
    Sp,
    Msp,
    Lsp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConeOp {
    Dual,
    Facets,
    Proper,
    Member,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecomposeKind {
    Sum,
    Diff,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PreserverOp {
    Check,
    Factor,
    Analyze,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatternOp {
    FullIndec,
    Blocks,
    Monomial,
    Rowpos,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SampleKind {
    Sp,
}

/// What a command run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, stdout: e.to_string(), stderr: String::new() };
            }
            let doc = json!({ "error": e.kind().to_string(), "version": VERSION });
            return Outcome { code: 2, stdout: render(&doc), stderr: e.to_string() };
        }
    };
    match execute(&cli.command) {
        Ok((holds, doc)) => Outcome { code: if holds { 0 } else { 1 }, stdout: render(&doc), stderr: String::new() },
        Err(e) => {
            let doc = json!({ "error": e.to_string(), "version": VERSION });
            Outcome { code: 2, stdout: render(&doc), stderr: format!("semipos: {e}\n") }
        }
    }
}

fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("json values serialize");
    s.push('\n');
    s
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

pub fn matrix(a: &RMatrix) -> Value {
    json!(a.to_strings())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<RMatrix> {
    RMatrix::parse(&read(path)?)
}

fn read_cone(path: &Path) -> Result<PolyCone> {
    PolyCone::parse(&read(path)?)
}

impl ConeArgs {
    fn load(&self, n: usize, m: usize) -> Result<(PolyCone, PolyCone)> {
        let k1 = match &self.cone1 {
            Some(p) => read_cone(p)?,
            None => PolyCone::orthant(n),
        };
        let k2 = match &self.cone2 {
            Some(p) => read_cone(p)?,
            None => PolyCone::orthant(m),
        };
        Ok((k1, k2))
    }
}

fn verified(ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification("certificate failed its check before output".into()))
    }
}

fn execute(command: &Command) -> Result<(bool, Value)> {
    match command {
        Command::Check { kind, matrix: path, cones } => {
            let a = read_matrix(path)?;
            let (k1, k2) = cones.load(a.cols(), a.rows())?;
            check(*kind, &a, &k1, &k2)
        }
        Command::Cone { op, cone, point } => cone_command(*op, &read_cone(cone)?, point),
        Command::Basis { kind, m, n, cones } => {
            let (k1, k2) = cones.load(*n, *m)?;
            let (name, basis) = match kind {
                CheckKind::Sp => ("basis sp", sp_basis(*m, *n, &k1, &k2)?),
                CheckKind::Msp => ("basis msp", msp_basis(*m, *n, &k1, &k2)?),
                CheckKind::Lsp => return Err(Error::InvalidInput("no basis construction for lsp".into())),
            };
            let elements: Vec<Value> = basis.iter().map(matrix).collect();
            Ok((true, json!({ "command": name, "verdict": "basis", "size": basis.len(), "basis": elements, "version": VERSION })))
        }
        Command::Decompose { kind, matrix: path, cones } => {
            let a = read_matrix(path)?;
            let (k1, k2) = cones.load(a.cols(), a.rows())?;
            let doc = match kind {
                DecomposeKind::Sum => {
                    let (b, c) = decompose_sum_sp(&a, &k1, &k2)?;
                    verified(&b + &c == a)?;
                    json!({ "command": "decompose sum", "verdict": "decomposed", "b": matrix(&b), "c": matrix(&c), "version": VERSION })
                }
                DecomposeKind::Diff => {
                    let (c1, c2) = decompose_diff_msp(&a, &k1, &k2)?;
                    verified(&c1 - &c2 == a)?;
                    json!({ "command": "decompose diff", "verdict": "decomposed", "c1": matrix(&c1), "c2": matrix(&c2), "version": VERSION })
                }
            };
            Ok((true, doc))
        }
        Command::Preserver { op, map, cones, trials, seed } => {
            let l = LinearMap::parse(&read(map)?)?;
            let (k1, k2) = cones.load(l.n(), l.m())?;
            preserver_command(*op, &l, &k1, &k2, *trials, *seed)
        }
        Command::Pattern { op, matrix: path } => pattern_command(*op, &read_matrix(path)?),
        Command::Sample { kind: SampleKind::Sp, m, n, seed, cones } => {
            let (k1, k2) = cones.load(*n, *m)?;
            let a = sample_sp(*m, *n, &k1, &k2, *seed)?;
            Ok((true, json!({ "command": "sample sp", "verdict": "sampled", "matrix": matrix(&a), "seed": seed, "version": VERSION })))
        }
    }
}

fn check(kind: CheckKind, a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<(bool, Value)> {
    match kind {
        CheckKind::Sp | CheckKind::Lsp => {
            let (name, v) = match kind {
                CheckKind::Sp => {
                    let v = classify_sp(a, k1, k2)?;
                    verified(v.verify(a, k1, k2)?)?;
                    ("check sp", v)
                }
                _ => {
                    let v = classify_left_sp(a, k1, k2)?;
                    verified(v.verify(&a.transpose(), &k2.dual()?, &k1.dual()?)?)?;
                    ("check lsp", v)
                }
            };
            Ok(match v {
                SpVerdict::Semipositive { witness } => {
                    (true, json!({ "command": name, "verdict": "semipositive", "witness": rationals(&witness), "version": VERSION }))
                }
                SpVerdict::NotSemipositive { certificate } => (
                    false,
                    json!({ "command": name, "verdict": "not semipositive", "certificate": rationals(&certificate), "version": VERSION }),
                ),
            })
        }
        CheckKind::Msp => Ok(match classify_msp(a, k1, k2)? {
            MspVerdict::Minimal { left_inverse } => {
                verified(&left_inverse * a == RMatrix::identity(a.cols()))?;
                (
                    true,
                    json!({ "command": "check msp", "verdict": "minimally semipositive", "left_inverse": matrix(&left_inverse), "version": VERSION }),
                )
            }
            MspVerdict::Redundant { witness } => (
                false,
                json!({ "command": "check msp", "verdict": "redundantly semipositive", "witness": rationals(&witness), "version": VERSION }),
            ),
            MspVerdict::NotSemipositive { certificate } => (
                false,
                json!({ "command": "check msp", "verdict": "not semipositive", "certificate": rationals(&certificate), "version": VERSION }),
            ),
        }),
    }
}

fn cone_command(op: ConeOp, k: &PolyCone, point: &[String]) -> Result<(bool, Value)> {
    let generators = |c: &PolyCone| Value::Array(c.generators().column_vectors().iter().map(|g| rationals(g)).collect());
    match op {
        ConeOp::Dual => {
            let d = k.dual()?;
            Ok((true, json!({ "command": "cone dual", "dim": d.dim(), "generators": generators(&d), "version": VERSION })))
        }
        ConeOp::Facets => {
            let f = k.facets()?;
            let rows: Vec<Value> = (0..f.rows()).map(|i| rationals(f.row(i))).collect();
            Ok((true, json!({ "command": "cone facets", "dim": k.dim(), "facets": rows, "version": VERSION })))
        }
        ConeOp::Proper => {
            let p = k.properness();
            Ok((
                p.is_proper(),
                json!({
                    "command": "cone proper",
                    "verdict": if p.is_proper() { "proper" } else { "not proper" },
                    "pointed": p.pointed,
                    "full_dimensional": p.full_dimensional,
                    "version": VERSION,
                }),
            ))
        }
        ConeOp::Member => {
            let x = point
                .iter()
                .map(|t| parse_rational(t).map_err(|message| Error::Parse { line: 0, message }))
                .collect::<Result<Vec<_>>>()?;
            if x.len() != k.dim() {
                return Err(Error::DimensionMismatch(format!("point has {} entries, cone lives in R^{}", x.len(), k.dim())));
            }
            let inside = k.contains(&x)?;
            Ok((
                inside,
                json!({ "command": "cone member", "verdict": if inside { "member" } else { "not member" }, "point": rationals(&x), "version": VERSION }),
            ))
        }
    }
}

fn factorization_json(f: &Factorization) -> Value {
    json!({
        "kind": match f.kind { FactorKind::Standard => "standard", FactorKind::Transposed => "transposed" },
        "x": matrix(&f.factors.x),
        "y": matrix(&f.factors.y),
        "sign": f.factors.sign,
    })
}

fn flags_json(f: &Option<TheoremFlags>) -> Value {
    match f {
        None => Value::Null,
        Some(f) => json!({ "sp": f.sp, "msp": f.msp }),
    }
}

/// JSON form of a preserver analysis.
pub fn report_json(r: &PreserverReport, seed: u64) -> Value {
    let counterexample = r.counterexample.as_ref().map(|c| {
        json!({
            "trial": c.trial,
            "a": matrix(&c.a),
            "witness": rationals(&c.witness),
            "image": matrix(&c.image),
            "certificate": rationals(&c.certificate),
        })
    });
    let rank_one = match &r.rank_one {
        RankOneCheck::NotApplicable => json!({ "status": "not applicable" }),
        RankOneCheck::Ran(RankOneOutcome::Pass) => json!({ "status": "pass" }),
        RankOneCheck::Ran(RankOneOutcome::Fail { a, image, image_rank }) => {
            json!({ "status": "fail", "a": matrix(a), "image": matrix(image), "image_rank": image_rank })
        }
    };
    json!({
        "command": "preserver analyze",
        "verdict": match r.verdict {
            Verdict::Counterexample => "counterexample",
            Verdict::StandardForm => "standard form",
            Verdict::Inconclusive => "inconclusive",
        },
        "invertible": r.invertible,
        "trials": r.trials,
        "counterexample": counterexample,
        "rank_one_condition": rank_one,
        "factorization": r.factorization.as_ref().map(factorization_json),
        "into_flags": flags_json(&r.into_flags),
        "onto_flags": flags_json(&r.onto_flags),
        "seed": seed,
        "version": VERSION,
    })
}

fn preserver_command(op: PreserverOp, l: &LinearMap, k1: &PolyCone, k2: &PolyCone, trials: u64, seed: u64) -> Result<(bool, Value)> {
    match op {
        PreserverOp::Check => match falsify_preserver(l, k1, k2, trials, seed)? {
            FalsifyOutcome::NoCounterexampleFound { trials } => Ok((
                true,
                json!({ "command": "preserver check", "verdict": "no counterexample found", "trials": trials, "seed": seed, "version": VERSION }),
            )),
            FalsifyOutcome::Counterexample(c) => {
                verified(c.verify(l, k1, k2)?)?;
                Ok((
                    false,
                    json!({
                        "command": "preserver check",
                        "verdict": "counterexample",
                        "trial": c.trial,
                        "a": matrix(&c.a),
                        "witness": rationals(&c.witness),
                        "image": matrix(&c.image),
                        "certificate": rationals(&c.certificate),
                        "seed": seed,
                        "version": VERSION,
                    }),
                ))
            }
        },
        PreserverOp::Factor => match factor_map(l) {
            Some(f) => {
                let rebuilt = if f.kind == FactorKind::Standard {
                    f.factors.to_map()
                } else {
                    f.factors.to_map().compose(&LinearMap::transpose_map(l.n()))?
                };
                verified(&rebuilt == l)?;
                let mut doc = json!({ "command": "preserver factor", "verdict": "factored", "version": VERSION });
                doc["factorization"] = factorization_json(&f);
                Ok((true, doc))
            }
            None => Ok((false, json!({ "command": "preserver factor", "verdict": "not a product map", "version": VERSION }))),
        },
        PreserverOp::Analyze => {
            let budget = AnalysisBudget { trials, seed, ..AnalysisBudget::default() };
            let report = analyze_preserver(l, k1, k2, budget)?;
            if let Some(c) = &report.counterexample {
                verified(c.verify(l, k1, k2)?)?;
            }
            Ok((report.verdict == Verdict::StandardForm, report_json(&report, seed)))
        }
    }
}

fn pattern_command(op: PatternOp, a: &RMatrix) -> Result<(bool, Value)> {
    let (name, holds) = match op {
        PatternOp::FullIndec => ("pattern full-indec", is_fully_indecomposable(a)?),
        PatternOp::Monomial => ("pattern monomial", is_monomial(a)?),
        PatternOp::Rowpos => ("pattern rowpos", is_row_positive(a)),
        PatternOp::Blocks => {
            let f = block_triangularize(a)?;
            let blocks: Vec<Value> = f
                .diagonal_blocks
                .iter()
                .zip(&f.block_kinds)
                .map(|(r, k)| {
                    json!({
                        "start": r.start,
                        "end": r.end,
                        "kind": match k {
                            BlockKind::FullyIndecomposable => "fully indecomposable",
                            BlockKind::ZeroOneByOne => "zero 1x1",
                        },
                    })
                })
                .collect();
            let doc = json!({
                "command": "pattern blocks",
                "verdict": if f.num_blocks() == 1 { "single block" } else { "partly decomposable" },
                "row_perm": f.row_perm,
                "col_perm": f.col_perm,
                "blocks": blocks,
                "permuted": matrix(&f.apply(a)),
                "version": VERSION,
            });
            return Ok((true, doc));
        }
    };
    Ok((holds, json!({ "command": name, "verdict": holds, "version": VERSION })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn run_with(args: &[&str]) -> (i32, Value) {
        let mut full = vec!["semipos"];
        full.extend_from_slice(args);
        let out = run(full);
        (out.code, serde_json::from_str(&out.stdout).unwrap_or(Value::Null))
    }

    #[test]
    fn check_sp_identity() {
        let a = file("1 0\n0 1\n");
        let (code, doc) = run_with(&["check", "sp", a.path().to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(doc["witness"], json!(["1", "1"]));
    }

    #[test]
    fn check_sp_failure_prints_certificate() {
        let a = file("1 -1\n-1 1\n");
        let (code, doc) = run_with(&["check", "sp", a.path().to_str().unwrap()]);
        assert_eq!(code, 1);
        assert_eq!(doc["certificate"], json!(["1", "1"]));
    }

    #[test]
    fn parse_error_exits_two_with_json() {
        let a = file("1 x\n");
        let out = run(["semipos", "check", "sp", a.path().to_str().unwrap()]);
        assert_eq!(out.code, 2);
        let doc: Value = serde_json::from_str(&out.stdout).unwrap();
        assert!(doc["error"].as_str().unwrap().contains("line 1"));
        assert!(!out.stderr.is_empty());
    }

    #[test]
    fn unknown_subcommand_exits_two() {
        let out = run(["semipos", "bogus"]);
        assert_eq!(out.code, 2);
        assert!(serde_json::from_str::<Value>(&out.stdout).unwrap()["error"].is_string());
    }

    #[test]
    fn member_accepts_negative_coordinates() {
        let k = file("dim 2\n1 0\n0 1\n");
        let (code, _) = run_with(&["cone", "member", k.path().to_str().unwrap(), "1", "-1"]);
        assert_eq!(code, 1);
        let (code, _) = run_with(&["cone", "member", k.path().to_str().unwrap(), "1/2", "3"]);
        assert_eq!(code, 0);
    }
}
