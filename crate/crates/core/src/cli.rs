//! Command-line front end.
//!
//! ```text
//! tcdesign construct --family e-exact --v 2 --m 2,2,4 --out d.json
//! tcdesign evaluate  --design d.json --criterion R
//! tcdesign verify    --design d.json --conditions thm3
//! tcdesign enumerate --v 2 --m 2,2,4 --criterion E
//! tcdesign certify   --claim a-implies-r --v 3 --q 3 --d 3
//! ```
//!
//! The result document goes to stdout, diagnostics to stderr. Exit status is
//! 0 on success, 1 when a verification or certification does not hold, and
//! 2 on invalid input (including an exceeded budget).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::constructors::{
    a_opt_approx, e_opt_approx, e_opt_exact, search_exact, verify_conditions, Family, GhVariant, SearchTarget,
};
use crate::criteria::{c_value, evaluate, Criterion, CriterionValue};
use crate::design::{AnyDesign, BlockDesign};
use crate::error::{Error, Result};
use crate::info::{contrast_info, lambda_min_value};
use crate::io::{design_to_csv, design_to_json, evaluation_json, read_design};
use crate::oracle::{brute_force_optimum, certify, sweep_invariants, CertifyOptions, Claim, DEFAULT_BUDGET};
use crate::scalar::{parse_rational, Rational, Scalar, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tcdesign", version, about = "Optimal block designs for comparing test treatments with a control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a design from one of the optimal families, or search for one.
    Construct(ConstructArgs),
    /// Score a design file under an optimality criterion.
    Evaluate(EvaluateArgs),
    /// Check a design file against the conditions of a family.
    Verify(VerifyArgs),
    /// Enumerate D(v, d, m): optimum of a criterion, or structural checks.
    Enumerate(EnumerateArgs),
    /// Certify an optimality claim by exhaustive enumeration.
    Certify(CertifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Approximate E-optimal product design (needs --s).
    EApprox,
    /// Approximate A-optimal product design (needs --s).
    AApprox,
    /// Exact E-optimal design with half of each block on the control.
    EExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditionsArg {
    Thm1,
    Thm3,
    Prop1,
    Thm5,
}

impl From<ConditionsArg> for Family {
    fn from(c: ConditionsArg) -> Family {
        match c {
            ConditionsArg::Thm1 => Family::ApproxE,
            ConditionsArg::Thm3 => Family::ExactE,
            ConditionsArg::Prop1 => Family::EqualBlockE,
            ConditionsArg::Thm5 => Family::Btib,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClaimArg {
    EExact,
    Varcov,
    AImpliesR,
    #[value(name = "e-c")]
    EC,
    Prop1,
}

impl From<ClaimArg> for Claim {
    fn from(c: ClaimArg) -> Claim {
        match c {
            ClaimArg::EExact => Claim::EOptExact,
            ClaimArg::Varcov => Claim::VarCovSumMin,
            ClaimArg::AImpliesR => Claim::AOptIsROpt,
            ClaimArg::EC => Claim::EOptCOpt,
            ClaimArg::Prop1 => Claim::Prop1EOpt,
        }
    }
}

/// Instance shape: `--m` directly, or `--q` with `--d` for equal blocks.
#[derive(Debug, Args)]
struct Shape {
    /// Number of test treatments.
    #[arg(long)]
    v: Option<usize>,
    /// Number of blocks.
    #[arg(long)]
    d: Option<usize>,
    /// Block sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u64>>,
    /// Common block size (with --d).
    #[arg(long)]
    q: Option<u64>,
}

impl Shape {
    fn v(&self) -> Result<usize> {
        match self.v {
            Some(v) if v >= 1 => Ok(v),
            Some(_) => Err(Error::InvalidArgument("--v must be at least 1".into())),
            None => Err(Error::InvalidArgument("--v is required".into())),
        }
    }

    fn block_sizes(&self) -> Result<Vec<u64>> {
        let m = match (&self.m, self.q, self.d) {
            (Some(m), None, d) => {
                if d.is_some_and(|d| d != m.len()) {
                    return Err(Error::InvalidArgument(format!("--d {} does not match {} block sizes", d.unwrap(), m.len())));
                }
                m.clone()
            }
            (None, Some(q), Some(d)) => vec![q; d],
            (None, Some(_), None) => return Err(Error::InvalidArgument("--q needs --d".into())),
            (Some(_), Some(_), _) => return Err(Error::InvalidArgument("give either --m or --q, not both".into())),
            (None, None, _) => return Err(Error::InvalidArgument("block sizes required: --m or --q with --d".into())),
        };
        if m.is_empty() {
            return Err(Error::InvalidArgument("need at least one block".into()));
        }
        if let Some(k) = m.iter().position(|&x| x == 0) {
            return Err(Error::ZeroBlockSize { block: k });
        }
        Ok(m)
    }
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the design here instead of embedding it in stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, value_enum, conflicts_with = "conditions")]
    family: Option<FamilyArg>,
    /// Search for the first exact design meeting these conditions instead.
    #[arg(long, value_enum)]
    conditions: Option<ConditionsArg>,
    /// Block weights for approximate families, comma separated rationals.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long)]
    paper_literal_gh: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    design: PathBuf,
    /// A, MV, E, R, phiR, varcov or c; all but c when omitted.
    #[arg(long, value_parser = parse_criterion)]
    criterion: Option<Criterion>,
    /// Contrast for the c criterion, comma separated rationals.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c_vector: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long, value_enum)]
    conditions: ConditionsArg,
    #[arg(long)]
    paper_literal_gh: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[command(flatten)]
    shape: Shape,
    /// Criterion to optimize; without it the structural checks are run.
    #[arg(long, value_parser = parse_criterion)]
    criterion: Option<Criterion>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, value_enum)]
    claim: ClaimArg,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random approximate designs compared against for the e-c claim.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    paper_literal_gh: bool,
}

fn parse_criterion(s: &str) -> std::result::Result<Criterion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn variant(literal: bool) -> GhVariant {
    if literal {
        GhVariant::Transcribed
    } else {
        GhVariant::Corrected
    }
}

fn rationals(list: &[String]) -> Result<Vec<Rational>> {
    list.iter().map(|x| parse_rational(x)).collect()
}

/// Parses `args` (including the program name) and runs one command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{shown}");
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{shown}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Construct(a) => construct(a, stdout),
        Command::Evaluate(a) => evaluate_cmd(a, stdout),
        Command::Verify(a) => verify(a, stdout),
        Command::Enumerate(a) => enumerate(a, stdout),
        Command::Certify(a) => certify_cmd(a, stdout, stderr),
    }
}

fn emit_json(stdout: &mut dyn Write, doc: &Json) -> Result<()> {
    writeln!(stdout, "{}", serde_json::to_string_pretty(doc)?)?;
    Ok(())
}

fn lambda_min_of(design: &AnyDesign) -> Result<Value> {
    Ok(match design {
        AnyDesign::Exact(x) => lambda_min_value(&contrast_info(x)?),
        AnyDesign::Rational(a) => lambda_min_value(&contrast_info(a)?),
        AnyDesign::Real(a) => lambda_min_value(&contrast_info(a)?),
    })
}

fn construct(a: ConstructArgs, stdout: &mut dyn Write) -> Result<i32> {
    let v = a.shape.v()?;
    let design: AnyDesign = match (a.family, a.conditions) {
        (Some(FamilyArg::EExact), _) => e_opt_exact(v, &a.shape.block_sizes()?)?.into(),
        (Some(family), _) => {
            let s = a
                .s
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("approximate families need --s".into()))?;
            let s = rationals(s)?;
            if a.shape.d.is_some_and(|d| d != s.len()) {
                return Err(Error::InvalidArgument("--d does not match the length of --s".into()));
            }
            if family == FamilyArg::EApprox {
                e_opt_approx(v, &s, None)?.into()
            } else {
                let s: Vec<f64> = s.iter().map(Scalar::to_f64).collect();
                a_opt_approx(v, &s)?.into()
            }
        }
        (None, Some(conditions)) => {
            let family = Family::from(conditions);
            if family == Family::ApproxE {
                return Err(Error::InvalidArgument("search works on exact designs; use --family e-approx".into()));
            }
            let target = SearchTarget { family, criterion: None, variant: variant(a.paper_literal_gh) };
            match search_exact(v, &a.shape.block_sizes()?, &target, a.budget)? {
                Some(d) => d.into(),
                None => {
                    emit_json(stdout, &json!({ "family": family.token(), "design": null, "found": false }))?;
                    return Ok(EXIT_FAILED);
                }
            }
        }
        (None, None) => return Err(Error::InvalidArgument("give --family or --conditions".into())),
    };
    let lambda = lambda_min_of(&design)?;
    let doc_design = match &a.output.out {
        Some(path) => {
            let text = match a.output.format {
                Format::Json => serde_json::to_string_pretty(&design_to_json(&design))? + "\n",
                Format::Csv => design_to_csv(&design)?,
            };
            std::fs::write(path, text)?;
            Json::String(path.display().to_string())
        }
        None if a.output.format == Format::Csv => {
            write!(stdout, "{}", design_to_csv(&design)?)?;
            return Ok(EXIT_OK);
        }
        None => design_to_json(&design),
    };
    emit_json(stdout, &json!({ "design": doc_design, "lambda_min": lambda.to_json() }))?;
    Ok(EXIT_OK)
}

fn evaluate_any(design: &AnyDesign, criterion: Criterion, c: Option<&[Rational]>) -> Result<CriterionValue> {
    fn go<D: BlockDesign>(d: &D, criterion: Criterion, c: Option<&[Rational]>) -> Result<CriterionValue> {
        if criterion != Criterion::C {
            return evaluate(d, criterion);
        }
        let c = c.ok_or_else(|| Error::InvalidArgument("the c criterion needs --c-vector".into()))?;
        let c: Vec<D::Elem> = c.iter().map(D::Elem::from_rational).collect();
        c_value(d, &c)
    }
    match design {
        AnyDesign::Exact(x) => go(x, criterion, c),
        AnyDesign::Rational(x) => go(x, criterion, c),
        AnyDesign::Real(x) => go(x, criterion, c),
    }
}

fn evaluate_cmd(a: EvaluateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let c = a.c_vector.as_deref().map(rationals).transpose()?;
    if a.criterion == Some(Criterion::C) && c.is_none() {
        return Err(Error::InvalidArgument("the c criterion needs --c-vector".into()));
    }
    let design = read_design(&a.design)?;
    let criteria: Vec<Criterion> = match a.criterion {
        Some(c) => vec![c],
        None => Criterion::ALL.into_iter().filter(|&c| c != Criterion::C).collect(),
    };
    let lambda = lambda_min_of(&design)?;
    let values = criteria
        .iter()
        .map(|&crit| evaluate_any(&design, crit, c.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Json => {
            let reports: Vec<Json> = values.iter().map(|v| evaluation_json(v, &lambda)).collect();
            let doc = if reports.len() == 1 { reports.into_iter().next().unwrap() } else { Json::Array(reports) };
            emit_json(stdout, &doc)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["criterion", "value", "feasible", "n_lambda_min"])?;
            for v in &values {
                w.write_record([v.criterion.name().to_string(), v.value.to_string(), v.feasible.to_string(), lambda.to_string()])?;
            }
            stdout.write_all(&w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
        }
    }
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let design = read_design(&a.design)?;
    let report = verify_conditions(&design, a.conditions.into(), variant(a.paper_literal_gh))?;
    match a.format {
        Format::Json => emit_json(stdout, &report.to_json())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["condition", "holds", "detail"])?;
            for c in &report.checks {
                w.write_record([c.name, if c.holds { "true" } else { "false" }, &c.detail])?;
            }
            stdout.write_all(&w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
        }
    }
    Ok(if report.satisfied { EXIT_OK } else { EXIT_FAILED })
}

fn enumerate(a: EnumerateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let v = a.shape.v()?;
    let m = a.shape.block_sizes()?;
    match a.criterion {
        Some(Criterion::C) => Err(Error::InvalidArgument("enumerate does not optimize the c criterion; use certify --claim e-c".into())),
        Some(criterion) => {
            let opt = brute_force_optimum(v, &m, criterion, a.budget)?;
            emit_json(stdout, &opt.to_json())?;
            Ok(EXIT_OK)
        }
        None => {
            let sweep = sweep_invariants(v, &m, a.budget)?;
            emit_json(
                stdout,
                &json!({
                    "v": v,
                    "d": m.len(),
                    "m": m,
                    "designs": sweep.designs.to_string(),
                    "feasible": sweep.feasible.to_string(),
                    "invariants_hold": sweep.passed(),
                    "violations": sweep.violations,
                }),
            )?;
            Ok(if sweep.passed() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

fn certify_cmd(a: CertifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let v = a.shape.v()?;
    let m = a.shape.block_sizes()?;
    let opts = CertifyOptions { budget: a.budget, seed: a.seed, samples: a.samples, variant: variant(a.paper_literal_gh) };
    let start = Instant::now();
    let cert = certify(a.claim.into(), v, &m, &opts)?;
    emit_json(stdout, &cert.to_json())?;
    // Timing stays off stdout so repeated runs produce identical bytes.
    writeln!(stderr, "wall_time_ms: {}", start.elapsed().as_millis())?;
    Ok(if cert.holds { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tcdesign").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn construct_reports_lambda_min() {
        let (code, out, _) = run_str(&["construct", "--family", "e-exact", "--v", "2", "--m", "2,2,4"]);
        assert_eq!(code, 0);
        let doc: Json = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["lambda_min"], "1");
        assert_eq!(doc["design"]["allocation"][0], json!([1, 1, 2]));
    }

    #[test]
    fn shape_errors_exit_2() {
        assert_eq!(run_str(&["construct", "--family", "e-exact", "--v", "2"]).0, 2);
        assert_eq!(run_str(&["construct", "--family", "e-exact", "--v", "2", "--m", "2,2", "--d", "3"]).0, 2);
        assert_eq!(run_str(&["construct", "--family", "e-exact", "--v", "2", "--q", "2"]).0, 2);
        assert_eq!(run_str(&["construct", "--family", "e-exact", "--v", "0", "--m", "2"]).0, 2);
        assert_eq!(run_str(&["construct", "--bogus"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
    }

    #[test]
    fn empty_family_is_invalid_input() {
        let (code, _, err) = run_str(&["construct", "--family", "e-exact", "--v", "2", "--m", "3,3"]);
        assert_eq!(code, 2);
        assert!(err.contains("odd size"));
    }

    #[test]
    fn search_by_conditions() {
        let (code, out, _) = run_str(&["construct", "--conditions", "thm5", "--v", "3", "--q", "3", "--d", "3"]);
        assert_eq!(code, 0);
        let doc: Json = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["design"]["allocation"][0], json!([1, 1, 1]));
    }

    #[test]
    fn enumerate_optimum_and_sweep() {
        let (code, out, _) = run_str(&["enumerate", "--v", "2", "--q", "2", "--d", "2", "--criterion", "varcov"]);
        assert_eq!(code, 0);
        let doc: Json = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["optimum"], "4");
        let (code, out, _) = run_str(&["enumerate", "--v", "2", "--q", "2", "--d", "2"]);
        assert_eq!(code, 0);
        let doc: Json = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["designs"], "36");
        assert_eq!(doc["invariants_hold"], true);
    }

    #[test]
    fn budget_exceeded_exits_2() {
        let (code, _, err) = run_str(&["enumerate", "--v", "3", "--q", "3", "--d", "3", "--criterion", "A", "--budget", "100"]);
        assert_eq!(code, 2);
        assert!(err.contains("budget"));
    }

    #[test]
    fn certify_writes_timing_to_stderr_only() {
        let (code, out, err) = run_str(&["certify", "--claim", "prop1", "--v", "2", "--q", "2", "--d", "2"]);
        assert_eq!(code, 0);
        assert!(err.starts_with("wall_time_ms"));
        assert!(!out.contains("wall"));
        let again = run_str(&["certify", "--claim", "prop1", "--v", "2", "--q", "2", "--d", "2"]);
        assert_eq!(out, again.1);
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("construct"));
    }
}
