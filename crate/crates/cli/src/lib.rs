//! The `kcocycle` command line. [`run`] takes the argument list and output
//! streams so it can be driven in-process; `main` only forwards to it.
//!
//! Exit codes: 0 success, 1 validation or guard failure, 2 parse error,
//! 3 path search failure, 4 enumeration budget exhausted.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use kcocycle::homotopy::PathFile;
use kcocycle::kgraph::CubicalCocycle;
use kcocycle::{
    adjacency_matrix, enumerate_factorisations, geodesic_path, ktheory_2graph, path_search,
    residual_report, validate_cubical_cocycle, validate_factorisation, validate_skeleton,
    EnumerationOptions, EnumerationStatus, Error, FactorisationRule, PathSearchConfig,
    SearchOutcome, Skeleton, UnitaryCocycle, ValidationReport,
};
use num_complex::Complex64;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEARCH_FAILED: i32 = 3;
pub const EXIT_TRUNCATED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "kcocycle", version, about = "Skeletons, factorisation rules, unitary cocycles and 2-graph K-theory")]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a skeleton and optionally a factorisation rule and phases on it.
    Validate {
        skeleton: PathBuf,
        factorisation: Option<PathBuf>,
        phases: Option<PathBuf>,
    },
    /// K-groups of a 2-graph from its skeleton.
    Ktheory { skeleton: PathBuf },
    /// Derive a unitary cocycle from a rule and phases, or check one
    #[command(subcommand)]
    Cocycle(CocycleCommand),
    /// Paths of unitary cocycles
    #[command(subcommand)]
    Path(PathCommand),
    /// Stream every factorisation rule on a skeleton as JSON lines.
    Enumerate {
        skeleton: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        count_only: bool,
        /// Maximum number of block assignments tried.
        #[arg(long, default_value_t = EnumerationOptions::default().budget)]
        budget: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CocycleCommand {
    /// Build the unitary cocycle of a factorisation rule and phases (default 1).
    Derive {
        skeleton: PathBuf,
        factorisation: PathBuf,
        phases: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the residual report; succeed iff the residual is within tolerance.
    Check {
        skeleton: PathBuf,
        cocycle: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct Endpoints {
    pub skeleton: PathBuf,
    pub start: PathBuf,
    pub end: PathBuf,
    /// Number of intervals; the path has one more sample.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PathCommand {
    /// Blockwise geodesic between two cocycles.
    Geodesic(Endpoints),
    /// Search for a path of cocycles between two cocycles.
    Search {
        #[command(flatten)]
        endpoints: Endpoints,
        #[arg(long, default_value_t = PathSearchConfig::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = PathSearchConfig::default().max_iters)]
        max_iters: usize,
    },
}

/// Why a command did not succeed, mapped one-to-one onto exit codes.
#[derive(Debug)]
enum Failure {
    Parse(String),
    Invalid(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(m) | Failure::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotUnitary { .. }
            | Error::InvalidLayer(_)
            | Error::NonCommuting
            | Error::NotContained
            | Error::SkeletonMismatch(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: kcocycle::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        Failure::Invalid(m) => Failure::Invalid(format!("{}: {m}", path.display())),
    })
}

fn load_skeleton(path: &Path) -> Result<Arc<Skeleton>, Failure> {
    Ok(Arc::new(in_file(path, Skeleton::from_json(&read(path)?))?))
}

fn load_cocycle(s: &Arc<Skeleton>, path: &Path) -> Result<UnitaryCocycle, Failure> {
    in_file(path, UnitaryCocycle::from_json(s.clone(), &read(path)?))
}

fn load_phases(s: &Skeleton, path: Option<&Path>) -> Result<CubicalCocycle, Failure> {
    match path {
        Some(p) => in_file(p, CubicalCocycle::from_json(s, &read(p)?)),
        None => Ok(CubicalCocycle::constant(s, Complex64::new(1.0, 0.0))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => write_atomic(p, &format!("{text}\n"))
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(|e| Failure::Invalid(e.to_string())),
    }
}

fn validate(
    skeleton: &Path,
    factorisation: Option<&Path>,
    phases: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let s = load_skeleton(skeleton)?;
    let mut reports = vec![validate_skeleton(&s)];
    if let Some(fpath) = factorisation {
        if !reports[0].ok {
            let mut r = ValidationReport::new("factorisation");
            r.note("skipped: the skeleton is invalid");
            reports.push(r);
        } else {
            let rule = in_file(fpath, FactorisationRule::from_json(&s, &read(fpath)?))?;
            let report = validate_factorisation(&s, &rule)?;
            let rule_ok = report.ok;
            reports.push(report);
            if let Some(ppath) = phases {
                let phi = load_phases(&s, Some(ppath))?;
                if rule_ok {
                    reports.push(validate_cubical_cocycle(&s, &rule, &phi)?);
                } else {
                    let mut r = ValidationReport::new("cubical_cocycle");
                    r.note("skipped: the factorisation rule is invalid");
                    reports.push(r);
                }
            }
        }
    }
    let ok = reports.iter().all(|r| r.ok && r.notes.iter().all(|n| !n.starts_with("skipped")));
    emit(None, &to_json(&reports), out)?;
    Ok(if ok { EXIT_OK } else { EXIT_INVALID })
}

fn ktheory(skeleton: &Path, out: &mut dyn Write) -> Outcome {
    let s = load_skeleton(skeleton)?;
    if s.k() != 2 {
        return Err(Failure::Invalid(format!("Evans formula requires k=2 (got k={})", s.k())));
    }
    if !validate_skeleton(&s).ok {
        return Err(Failure::Invalid("skeleton fails validation".into()));
    }
    let groups = ktheory_2graph(&adjacency_matrix(&s, 1)?, &adjacency_matrix(&s, 2)?)?;
    emit(None, &to_json(&groups), out)?;
    Ok(EXIT_OK)
}

fn derive(
    skeleton: &Path,
    factorisation: &Path,
    phases: Option<&Path>,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let s = load_skeleton(skeleton)?;
    if !validate_skeleton(&s).ok {
        return Err(Failure::Invalid("skeleton fails validation".into()));
    }
    let rule = in_file(factorisation, FactorisationRule::from_json(&s, &read(factorisation)?))?;
    let phi = load_phases(&s, phases)?;
    let u = kcocycle::from_kgraph(s, &rule, &phi)?;
    emit(output, &to_json(&u.to_file()), out)?;
    Ok(EXIT_OK)
}

fn check(skeleton: &Path, cocycle: &Path, tol: f64, out: &mut dyn Write) -> Outcome {
    let s = load_skeleton(skeleton)?;
    let u = load_cocycle(&s, cocycle)?;
    let report = residual_report(&u);
    emit(None, &to_json(&report), out)?;
    Ok(if report.residual <= tol { EXIT_OK } else { EXIT_INVALID })
}

fn path(cmd: &PathCommand, seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let ends = match cmd {
        PathCommand::Geodesic(e) => e,
        PathCommand::Search { endpoints, .. } => endpoints,
    };
    let s = load_skeleton(&ends.skeleton)?;
    let u0 = load_cocycle(&s, &ends.start)?;
    let u1 = load_cocycle(&s, &ends.end)?;
    let output = ends.output.as_deref();
    match cmd {
        PathCommand::Geodesic(e) => {
            let p = geodesic_path(&u0, &u1, e.samples)?;
            emit(output, &to_json(&p.to_file()), out)?;
            Ok(EXIT_OK)
        }
        PathCommand::Search { endpoints, tol, max_iters } => {
            let cfg = PathSearchConfig {
                samples: endpoints.samples,
                tol: *tol,
                max_iters: *max_iters,
                seed,
                ..Default::default()
            };
            match path_search(&u0, &u1, &cfg)? {
                SearchOutcome::Found(p) => {
                    let file: PathFile = p.to_file();
                    emit(output, &to_json(&file), out)?;
                    Ok(EXIT_OK)
                }
                SearchOutcome::Failed(report) => {
                    let _ = writeln!(err, "path search failed: {}", report.reason);
                    emit(output, &to_json(&report), out)?;
                    Ok(EXIT_SEARCH_FAILED)
                }
            }
        }
    }
}

fn enumerate(
    skeleton: &Path,
    limit: Option<usize>,
    count_only: bool,
    budget: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let s = load_skeleton(skeleton)?;
    if !validate_skeleton(&s).ok {
        return Err(Failure::Invalid("skeleton fails validation".into()));
    }
    let mut write_error = None;
    let summary = enumerate_factorisations(&s, EnumerationOptions { limit, budget }, |rule| {
        if !count_only && write_error.is_none() {
            let line = serde_json::to_string(&rule.to_file(&s)).expect("plain data serializes");
            if let Err(e) = writeln!(out, "{line}") {
                write_error = Some(e);
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(Failure::Invalid(e.to_string()));
    }
    if count_only {
        emit(None, &summary.emitted.to_string(), out)?;
    }
    match summary.status {
        EnumerationStatus::Truncated => {
            let _ = writeln!(
                err,
                "truncated: budget of {budget} assignments exhausted after {} rules",
                summary.emitted
            );
            Ok(EXIT_TRUNCATED)
        }
        EnumerationStatus::Complete | EnumerationStatus::LimitReached => Ok(EXIT_OK),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Validate {
            skeleton,
            factorisation,
            phases,
        } => validate(skeleton, factorisation.as_deref(), phases.as_deref(), out),
        Command::Ktheory { skeleton } => ktheory(skeleton, out),
        Command::Cocycle(CocycleCommand::Derive {
            skeleton,
            factorisation,
            phases,
            output,
        }) => derive(skeleton, factorisation, phases.as_deref(), output.as_deref(), out),
        Command::Cocycle(CocycleCommand::Check { skeleton, cocycle, tol }) => {
            check(skeleton, cocycle, *tol, out)
        }
        Command::Path(cmd) => path(cmd, cli.seed, out, err),
        Command::Enumerate {
            skeleton,
            limit,
            count_only,
            budget,
        } => enumerate(skeleton, *limit, *count_only, *budget, out, err),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            match f {
                Failure::Parse(_) => EXIT_PARSE,
                Failure::Invalid(_) => EXIT_INVALID,
            }
        }
    }
}
