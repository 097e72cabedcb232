//! `ricci-stab` command-line front end.
//!
//! Exit codes: 0 on success (inconclusive verdicts included), 1 when an
//! input is well-formed but invalid, 2 on I/O or JSON errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ricci_stab::catalog;
use ricci_stab::construct::{self, ExtensionSpec};
use ricci_stab::curvature::CurvaturePackage;
use ricci_stab::report;
use ricci_stab::soliton::{
    detect_soliton_with, einstein_certificate, extension_heuristic_certificate, q_certificate, sectional_certificate,
    stability_certificate, two_step_certificate, Criterion, SolitonReport, StabilityCertificate, Verdict,
};
use ricci_stab::sweep::{self, Family, Grid};
use ricci_stab::symtensor::{q_operator, rho_operator, sym_spectrum};
use ricci_stab::{Error, Execution, MetricLieAlgebra, Tolerances};

#[derive(Parser)]
#[command(name = "ricci-stab", version, about = "Linear stability of left-invariant Ricci solitons")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an algebra document: Jacobi identity, inner product, structure.
    Validate { path: PathBuf },
    /// Detect the soliton and emit stability certificates.
    Stability {
        /// Document path or `catalog:<name>`.
        source: String,
        #[arg(long, value_enum, default_value = "all")]
        criterion: CriterionArg,
    },
    /// Build a solvable extension and certify it.
    Extend(ExtendArgs),
    /// Evaluate a one-parameter family on a grid and write CSV.
    Sweep {
        /// lauret_curve, nil3_family or diagonal_abelian.
        family: String,
        /// Inclusive grid `a:b:steps`.
        #[arg(long)]
        range: Option<String>,
        /// JSON list of A-matrices for diagonal_abelian.
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary rows for the built-in nilsolitons.
    Report {
        /// Print a fixed-width table instead of JSON.
        #[arg(long)]
        tables: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Built-in algebras.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Args)]
struct ExtendArgs {
    source: String,
    /// Rank-one extension by the soliton derivation.
    #[arg(long, required_unless_present = "derivations", conflicts_with = "derivations")]
    einstein: bool,
    /// JSON list of commuting symmetric derivations.
    #[arg(long)]
    derivations: Option<PathBuf>,
    /// Also write the extension document here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Print an algebra document.
    Emit {
        name: String,
        /// Named parameter such as `t=0.5`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
    /// List entry names.
    List,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Q,
    Einstein,
    Sectional,
    TwoStep,
    ExtHeuristic,
    All,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("`{s}` is not key=value"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Io(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn load(source: &str) -> CliResult<MetricLieAlgebra> {
    match source.strip_prefix("catalog:") {
        Some(name) => Ok(catalog::resolve(name, &[])?),
        None => Ok(MetricLieAlgebra::from_json(&read(Path::new(source))?)?),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("cannot write to stdout: {e}"))),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> CliResult<()> {
    emit(&(serde_json::to_string_pretty(v).expect("JSON values always serialize") + "\n"))
}

fn not_applicable(criterion: Criterion, why: &Error) -> StabilityCertificate {
    StabilityCertificate {
        criterion,
        lhs: f64::NAN,
        rhs: f64::NAN,
        verdict: Verdict::NotApplicable,
        notes: why.to_string(),
    }
}

/// Runs one criterion; a missing precondition is a verdict, not an error.
fn certify(
    criterion: Criterion,
    pkg: &CurvaturePackage,
    report: &SolitonReport,
    tol: &Tolerances,
    exec: Execution,
) -> CliResult<StabilityCertificate> {
    let result = match criterion {
        Criterion::Q => q_certificate(pkg, report, tol),
        Criterion::Einstein => einstein_certificate(pkg, report, tol),
        Criterion::Sectional => sectional_certificate(pkg, report, tol, exec),
        Criterion::TwoStep => two_step_certificate(pkg, report, tol),
        Criterion::ExtHeuristic if !pkg.algebra().structure_report().is_nilpotent => Err(Error::NotNilpotent),
        Criterion::ExtHeuristic => extension_heuristic_certificate(report, tol),
        Criterion::RhoQuarter => unreachable!("reported inside the Q certificate"),
    };
    match result {
        Ok(c) => Ok(c),
        Err(e @ (Error::NotSoliton(_) | Error::NotTwoStep | Error::NotNilpotent)) => Ok(not_applicable(criterion, &e)),
        Err(e) => Err(e.into()),
    }
}

/// Curvature summary shared by `stability` and `extend`.
fn summary(alg: &MetricLieAlgebra, exec: Execution) -> CliResult<(CurvaturePackage, SolitonReport, Value)> {
    let pkg = CurvaturePackage::compute_with(alg, exec);
    let report = detect_soliton_with(&pkg);
    let max_q = sym_spectrum(&q_operator(&pkg))?.max();
    let max_rho = sym_spectrum(&rho_operator(&pkg))?.max();
    let v = json!({
        "label": alg.label(),
        "dim": alg.dim(),
        "structure": alg.structure_report(),
        "scal": pkg.scal,
        "soliton": report,
        "max_q": max_q,
        "max_rho": max_rho,
    });
    Ok((pkg, report, v))
}

fn cmd_validate(path: &Path) -> CliResult<()> {
    let text = read(path)?;
    let alg = match MetricLieAlgebra::from_json(&text) {
        Ok(a) => a,
        Err(e) => {
            let failure = Failure::from(e);
            if let Failure::Invalid(msg) = &failure {
                print_json(&json!({ "valid": false, "error": msg }))?;
            }
            return Err(failure);
        }
    };
    let jd = alg.jacobi_defect();
    let s = alg.structure_report();
    let kind = match (s.is_nilpotent, s.step) {
        (true, Some(step)) => format!("nilpotent, step {step}"),
        (true, None) => "nilpotent".to_string(),
        (false, _) if s.is_solvable => "solvable, not nilpotent".to_string(),
        _ => "not solvable".to_string(),
    };
    print_json(&json!({
        "valid": true,
        "label": alg.label(),
        "dim": alg.dim(),
        "jacobi_defect": jd.value,
        "worst_triple": [jd.triple.0 + 1, jd.triple.1 + 1, jd.triple.2 + 1],
        "kind": kind,
        "structure": s,
    }))
}

fn cmd_stability(source: &str, which: CriterionArg, exec: Execution) -> CliResult<()> {
    let alg = load(source)?;
    let tol = Tolerances::from_env();
    let (pkg, report, mut out) = summary(&alg, exec)?;
    let criteria: Vec<Criterion> = match which {
        CriterionArg::Q => vec![Criterion::Q],
        CriterionArg::Einstein => vec![Criterion::Einstein],
        CriterionArg::Sectional => vec![Criterion::Sectional],
        CriterionArg::TwoStep => vec![Criterion::TwoStep],
        CriterionArg::ExtHeuristic => vec![Criterion::ExtHeuristic],
        CriterionArg::All => vec![
            Criterion::Q,
            Criterion::Einstein,
            Criterion::Sectional,
            Criterion::TwoStep,
            Criterion::ExtHeuristic,
        ],
    };
    let certs = criteria
        .into_iter()
        .map(|c| certify(c, &pkg, &report, &tol, exec))
        .collect::<CliResult<Vec<_>>>()?;
    out["certificates"] = json!(certs);
    print_json(&out)
}

fn cmd_extend(args: &ExtendArgs, exec: Execution) -> CliResult<()> {
    let base = load(&args.source)?;
    let ext = match &args.derivations {
        Some(path) => {
            let maps = sweep::parse_matrices(&read(path)?)?;
            construct::lauret_extension(&ExtensionSpec::new(&base, maps)?)?
        }
        None => construct::einstein_rank_one_extension(&base)?,
    };
    let tol = Tolerances::from_env();
    let (pkg, report, mut out) = summary(&ext, exec)?;
    let cert = match stability_certificate(&pkg, &report, &tol) {
        Ok(c) => c,
        Err(e @ Error::NotSoliton(_)) => not_applicable(Criterion::Q, &e),
        Err(e) => return Err(e.into()),
    };
    let doc = ext.to_document();
    if let Some(path) = &args.out {
        write(path, &ext.to_json())?;
    }
    out["certificate"] = json!(cert);
    out["algebra"] = json!(doc);
    print_json(&out)
}

fn cmd_sweep(family: &str, range: Option<&str>, matrices: Option<&Path>, out: Option<&Path>, exec: Execution) -> CliResult<()> {
    let family = match family {
        "lauret_curve" => Family::LauretCurve,
        "nil3_family" => Family::Nil3Family,
        "diagonal_abelian" => {
            let path = matrices.ok_or_else(|| Failure::Invalid("diagonal_abelian needs --matrices <file>".into()))?;
            Family::DiagonalAbelian(sweep::parse_matrices(&read(path)?)?)
        }
        other => return Err(Failure::Invalid(format!("unknown family `{other}`"))),
    };
    let grid = range.map(Grid::parse).transpose()?;
    let rows = sweep::run_sweep(&family, grid, exec, &Tolerances::from_env())?;
    let csv = sweep::to_csv(&rows);
    match out {
        Some(path) => write(path, &csv),
        None => emit(&csv),
    }
}

fn cmd_report(tables: bool, csv: Option<&Path>, exec: Execution) -> CliResult<()> {
    let rows = report::build_report(exec, &Tolerances::from_env())?;
    if let Some(path) = csv {
        write(path, &report::to_csv(&rows))?;
    }
    if tables {
        emit(&report::format_table(&rows))
    } else if csv.is_none() {
        print_json(&json!(rows))
    } else {
        Ok(())
    }
}

fn cmd_catalog(cmd: &CatalogCommand) -> CliResult<()> {
    match cmd {
        CatalogCommand::Emit { name, params } => {
            let name = name.strip_prefix("catalog:").unwrap_or(name);
            emit(&(catalog::resolve(name, params)?.to_json() + "\n"))
        }
        CatalogCommand::List => emit(&(catalog::NAMES.join("\n") + "\n")),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match &cli.command {
        Command::Validate { path } => cmd_validate(path),
        Command::Stability { source, criterion } => cmd_stability(source, *criterion, exec),
        Command::Extend(args) => cmd_extend(args, exec),
        Command::Sweep { family, range, matrices, out } => {
            cmd_sweep(family, range.as_deref(), matrices.as_deref(), out.as_deref(), exec)
        }
        Command::Report { tables, csv } => cmd_report(*tables, csv.as_deref(), exec),
        Command::Catalog(cmd) => cmd_catalog(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
