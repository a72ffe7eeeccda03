//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on a negative mathematical verdict (with a JSON report on
//! standard output), 1 on usage, input or numerical failures.

pub mod io;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::classify::{classify_ssvp, ClosedVerdict};
use crate::error::{Error, Result};
use crate::flow::{
    bifurcate_traced, liberate_traced, liberation_direction, ssvp_via_tangent, superpattern_realize_traced,
    tangent_basis, SolverConfig, TraceEvent,
};
use crate::numerics::{DenseMatrix, SigmaList};
use crate::pattern::{pattern_of_default, term_rank, Pattern};
use crate::realize::{
    allows_zero_with_distinct, realize_c6, realize_cycle_with_zero, realize_distinct, realize_orthonormal_scaled,
    realize_path,
};
use crate::verify::{check_ssvp, check_ssvp_wrt, validate_certificate, CertificateReport, CheckMode};
use io::{load_config, load_matrix, load_pattern, parse_sigmas};
use report::{negative, render, TangentReport, TermRankReport, ZeroDistinctReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

/// Environment variable overriding `rng_seed`.
pub const SEED_ENV: &str = "SSVPKIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "ssvpkit", version, about = "SSVP checks and inverse singular value realizations for patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the SSVP, optionally relative to a superpattern.
    Check(CheckArgs),
    /// Validate a claimed SSVP violation Y.
    Certify(CertifyArgs),
    /// Closed-form SSVP rules.
    Classify(MatrixArg),
    /// Term rank and a maximum matching of a pattern.
    TermRank(TermRankArgs),
    /// Constructive realizers.
    Realize(RealizeArgs),
    /// Realize a superpattern of the pattern of an SSVP matrix.
    Superpattern(SuperpatternArgs),
    /// Move the singular values of an SSVP matrix while keeping its pattern.
    Bifurcate(BifurcateArgs),
    /// Liberate a matrix along a tangent direction.
    Liberate(LiberateArgs),
    /// Tangent space dimension and basis.
    Tangent(MatrixArg),
}

#[derive(Debug, Args)]
struct MatrixArg {
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Superpattern S for a relative check.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Decide rank in rational arithmetic when the input is rational.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Defaults to the pattern of the matrix.
    #[arg(long)]
    pattern: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TermRankArgs {
    #[arg(long, required_unless_present = "matrix", conflicts_with = "matrix")]
    pattern: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Ortho,
    C6,
    Distinct,
    Cycle,
    ZeroDistinct,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// SolverConfig JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Log solver iterations as JSON lines on standard error.
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct RealizeArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, allow_hyphen_values = true)]
    sigmas: Option<String>,
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Row-orthonormal Q for the ortho family.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct SuperpatternArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct BifurcateArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    sigmas: String,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct LiberateArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Tangent direction D.
    #[arg(long, required_unless_present = "pattern", conflicts_with = "pattern")]
    direction: Option<PathBuf>,
    /// Positions to liberate; a direction is searched for.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

enum Outcome {
    Done(Value),
    Negative(Value),
}

fn value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

struct Context<'a> {
    err: &'a mut dyn Write,
}

impl Context<'_> {
    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }

    fn sigmas(&mut self, text: &str) -> Result<SigmaList> {
        let (s, reordered) = parse_sigmas(text)?;
        if reordered {
            self.warn(&format!("sigma list reordered to {:?}", s.values()));
        }
        Ok(s)
    }

    fn config(&mut self, args: &SolverArgs) -> Result<SolverConfig> {
        let mut cfg = match &args.config {
            Some(p) => load_config(p)?,
            None => SolverConfig::default(),
        };
        if let Ok(seed) = std::env::var(SEED_ENV) {
            cfg.rng_seed = seed
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{SEED_ENV} must be an unsigned integer, got {seed:?}")))?;
        }
        Ok(cfg)
    }
}

/// Parses `argv` (program name first), runs the verb and writes the report to `out`.
/// Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut trace_lines: Vec<String> = Vec::new();
    let tracing = matches!(
        &cli.command,
        Command::Realize(RealizeArgs { solver: SolverArgs { trace: true, .. }, .. })
            | Command::Superpattern(SuperpatternArgs { solver: SolverArgs { trace: true, .. }, .. })
            | Command::Bifurcate(BifurcateArgs { solver: SolverArgs { trace: true, .. }, .. })
            | Command::Liberate(LiberateArgs { solver: SolverArgs { trace: true, .. }, .. })
    );
    let outcome = {
        let mut trace = |e: &TraceEvent| {
            if tracing {
                trace_lines.push(serde_json::to_string(e).expect("trace serializes"));
            }
        };
        let mut ctx = Context { err: &mut *err };
        dispatch(cli.command, &mut ctx, &mut trace)
    };
    for line in &trace_lines {
        let _ = writeln!(err, "{line}");
    }
    match outcome {
        Ok(Outcome::Done(v)) => {
            let _ = out.write_all(render(&v).as_bytes());
            EXIT_OK
        }
        Ok(Outcome::Negative(v)) => {
            let _ = out.write_all(render(&v).as_bytes());
            EXIT_NEGATIVE
        }
        Err(e) if e.is_mathematical() => {
            let _ = out.write_all(render(&negative(&e)).as_bytes());
            EXIT_NEGATIVE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(command: Command, ctx: &mut Context, trace: &mut dyn FnMut(&TraceEvent)) -> Result<Outcome> {
    match command {
        Command::Check(a) => {
            let m = load_matrix(&a.matrix)?;
            let mode = if a.exact { CheckMode::ExactWhenRational } else { CheckMode::Numeric };
            let cert = match &a.pattern {
                Some(p) => check_ssvp_wrt(&m, &load_pattern(p)?, mode)?,
                None => check_ssvp(&m, mode)?,
            };
            let v = value(&CertificateReport::from(&cert));
            Ok(if cert.has_ssvp() { Outcome::Done(v) } else { Outcome::Negative(v) })
        }
        Command::Certify(a) => {
            let m = load_matrix(&a.matrix)?;
            let y = load_matrix(&a.y)?;
            let s = match &a.pattern {
                Some(p) => load_pattern(p)?,
                None => pattern_of_default(&m)?,
            };
            let check = validate_certificate(&m, &y, &s)?;
            let v = value(&check);
            Ok(if check.valid { Outcome::Done(v) } else { Outcome::Negative(v) })
        }
        Command::Classify(a) => {
            let verdict = classify_ssvp(&load_matrix(&a.matrix)?);
            let v = value(&verdict);
            Ok(if verdict.verdict == ClosedVerdict::Lacks { Outcome::Negative(v) } else { Outcome::Done(v) })
        }
        Command::TermRank(a) => {
            let p = match (&a.pattern, &a.matrix) {
                (Some(p), _) => load_pattern(p)?,
                (None, Some(m)) => pattern_of_default(&load_matrix(m)?)?,
                (None, None) => return Err(Error::InvalidInput("--pattern or --matrix is required".into())),
            };
            let (k, matching) = term_rank(&p);
            Ok(Outcome::Done(value(&TermRankReport {
                term_rank: k,
                full: k == p.rows().min(p.cols()),
                matching: matching.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            })))
        }
        Command::Realize(a) => realize(a, ctx),
        Command::Superpattern(a) => {
            let cfg = ctx.config(&a.solver)?;
            let m = load_matrix(&a.matrix)?;
            let p = load_pattern(&a.pattern)?;
            Ok(Outcome::Done(value(&superpattern_realize_traced(&m, &p, &cfg, trace)?)))
        }
        Command::Bifurcate(a) => {
            let cfg = ctx.config(&a.solver)?;
            let m = load_matrix(&a.matrix)?;
            let target = ctx.sigmas(&a.sigmas)?;
            Ok(Outcome::Done(value(&bifurcate_traced(&m, &target, &cfg, trace)?)))
        }
        Command::Liberate(a) => {
            let cfg = ctx.config(&a.solver)?;
            let m = load_matrix(&a.matrix)?;
            let d = match (&a.direction, &a.pattern) {
                (Some(d), _) => load_matrix(d)?,
                (None, Some(p)) => liberation_direction(&m, &load_pattern(p)?)?,
                (None, None) => return Err(Error::InvalidInput("--direction or --pattern is required".into())),
            };
            Ok(Outcome::Done(value(&liberate_traced(&m, &d, &cfg, trace)?)))
        }
        Command::Tangent(a) => {
            let m = load_matrix(&a.matrix)?;
            let t = tangent_basis(&m, 1e-10)?;
            Ok(Outcome::Done(value(&TangentReport { dimension: t.dimension, ssvp: ssvp_via_tangent(&m), basis: &t })))
        }
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidInput(format!("{flag} is required for this family")))
}

fn realize(a: RealizeArgs, ctx: &mut Context) -> Result<Outcome> {
    let cfg = ctx.config(&a.solver)?;
    let result = match a.family {
        Family::Path => realize_path(&ctx.sigmas(&require(a.sigmas, "--sigmas")?)?)?,
        Family::Ortho => {
            let q: DenseMatrix = load_matrix(&require(a.matrix, "--matrix")?)?;
            realize_orthonormal_scaled(&q, &ctx.sigmas(&require(a.sigmas, "--sigmas")?)?)?
        }
        Family::C6 => realize_c6(ctx.sigmas(&require(a.sigmas, "--sigmas")?)?.values(), &cfg)?,
        Family::Distinct => {
            let p: Pattern = load_pattern(&require(a.pattern, "--pattern")?)?;
            realize_distinct(&p, &ctx.sigmas(&require(a.sigmas, "--sigmas")?)?, &cfg)?
        }
        Family::Cycle => realize_cycle_with_zero(&ctx.sigmas(&require(a.sigmas, "--sigmas")?)?, &cfg)?,
        Family::ZeroDistinct => {
            let p = load_pattern(&require(a.pattern, "--pattern")?)?;
            let allows = allows_zero_with_distinct(&p)?;
            let verdict = if allows { "allows" } else { "every-matrix-invertible" };
            let v = value(&ZeroDistinctReport { verdict, allows });
            return Ok(if allows { Outcome::Done(v) } else { Outcome::Negative(v) });
        }
    };
    Ok(Outcome::Done(value(&result)))
}
