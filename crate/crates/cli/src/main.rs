//! `putlab` command-line tool.

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use putlab::checks::{self, Suite};
use putlab::mechanisms::{
    block_design_mechanism, complete_design, decompose_extremal, proposed_mechanism, randomized_response, verify_ldp,
    verify_qldp,
};
use putlab::oracle::DEFAULT_SEED;
use putlab::put::{corollary_ratio_limits, curve_point, curve_sweep, eps_grid, SweepOptions};
use putlab::tolerance::Tolerances;
use putlab::Error;

use crate::io::{CurveRow, DecompositionFile, Mechanism, MechanismFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Failed(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{0}")]
    NotPrivate(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capability(m) => CliError::Unsupported(m),
            Error::Domain(m) | Error::Validation(m) => CliError::Usage(m),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Malformed(_) => 4,
            CliError::NotPrivate(_) => 5,
            CliError::Failed(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Core(_) => 1,
        }
    }
}

/// Privacy-utility trade-offs for locally private hypothesis testing.
#[derive(Parser)]
#[command(name = "putlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate quantum and classical trade-off curves over a privacy grid.
    Curves(CurvesArgs),
    /// Run a named invariant suite.
    Verify(VerifyArgs),
    /// Build, check or decompose a mechanism file.
    #[command(subcommand)]
    Mechanism(MechanismCommand),
    /// Small-eps advantage ratios against their analytic limits.
    Limits(LimitsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long)]
    v: usize,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    eps_min: f64,
    #[arg(long)]
    eps_max: f64,
    #[arg(long)]
    eps_steps: usize,
    /// Space the grid geometrically instead of linearly.
    #[arg(long)]
    log_grid: bool,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Leave asymmetric quantum cells empty when no closed form applies.
    #[arg(long)]
    no_numeric: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismType {
    Proposed,
    BlockDesign,
    Rr,
}

#[derive(Subcommand)]
enum MechanismCommand {
    /// Write a mechanism as JSON.
    Build {
        #[arg(long = "type", value_enum)]
        kind: MechanismType,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        eps: f64,
        /// Block size for `block-design` (all k-subsets are used).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report whether a mechanism file satisfies the privacy constraint.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to the `eps` recorded in the file.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Factor a classical mechanism through the extremal mechanism.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to the `eps` recorded in the file.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LimitsArgs {
    /// Inclusive range such as `2..9` or `3-9`, or a single value.
    #[arg(long, default_value = "2..9")]
    v_range: String,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn curves(a: CurvesArgs) -> Result<(), CliError> {
    let grid = eps_grid(a.eps_min, a.eps_max, a.eps_steps, a.log_grid)?;
    let opts = SweepOptions { numeric_fallback: !a.no_numeric };
    let rows: Vec<CurveRow> = curve_sweep(a.v, a.eta, &grid, opts)?.iter().map(CurveRow::from).collect();
    let text = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_csv(&mut buf, &rows)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialise") + "\n",
    };
    emit(a.out.as_deref(), &text)
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let suite: Suite = a.suite.parse()?;
    let results = checks::run(suite, a.seed)?;
    for c in &results {
        println!("{c}");
    }
    let failed: Vec<_> = results.iter().filter(|c| !c.passed).collect();
    println!("{} of {} checks passed", results.len() - failed.len(), results.len());
    match failed.first() {
        None => Ok(()),
        Some(c) => Err(CliError::Failed(format!("check `{}` failed with margin {:e}", c.name, c.margin))),
    }
}

/// Loads a mechanism file and settles the privacy level to check against.
fn read_mechanism(path: &Path, eps: Option<f64>) -> Result<(Mechanism, f64), CliError> {
    let file = MechanismFile::parse(&fs::read_to_string(path)?)?;
    let eps = eps.or(file.eps()).ok_or_else(|| CliError::Usage("no --eps given and none recorded in the file".into()))?;
    Ok((file.into_mechanism()?, eps))
}

fn mechanism(cmd: MechanismCommand) -> Result<(), CliError> {
    match cmd {
        MechanismCommand::Build { kind, v, eps, k, out } => {
            let file = match kind {
                MechanismType::Proposed => MechanismFile::from_cq(&proposed_mechanism(v, eps)?, Some(eps)),
                MechanismType::Rr => MechanismFile::from_classical(&randomized_response(v, eps)?, Some(eps)),
                MechanismType::BlockDesign => {
                    let k = k.ok_or_else(|| CliError::Usage("--k is required for block-design".into()))?;
                    MechanismFile::from_classical(&block_design_mechanism(&complete_design(v, k)?, eps)?, Some(eps))
                }
            };
            emit(out.as_deref(), &(serde_json::to_string_pretty(&file).expect("mechanism serialises") + "\n"))
        }
        MechanismCommand::Check { input, eps } => {
            let (mech, eps) = read_mechanism(&input, eps)?;
            let (passed, report) = match mech {
                Mechanism::Cq(m) => {
                    let r = verify_qldp(&m, eps, 1e-12);
                    let (x, xp) = r.worst_pair;
                    (r.passed, format!("QLDP at eps={eps}: worst pair ({x}, {xp}), margin {:e}", r.margin))
                }
                Mechanism::Classical(q) => {
                    let r = verify_ldp(&q, eps, 1e-12);
                    let (x, xp, y) = r.worst;
                    (r.passed, format!("LDP at eps={eps}: worst rows ({x}, {xp}) in column {y}, margin {:e}", r.margin))
                }
            };
            println!("{} {report}", if passed { "PASS" } else { "FAIL" });
            if passed {
                Ok(())
            } else {
                Err(CliError::Failed("privacy check failed".into()))
            }
        }
        MechanismCommand::Decompose { input, eps, out } => {
            let (q, eps) = match read_mechanism(&input, eps)? {
                (Mechanism::Classical(q), eps) => (q, eps),
                (Mechanism::Cq(_), _) => return Err(CliError::Unsupported("decompose needs a classical mechanism".into())),
            };
            let dec = decompose_extremal(&q, eps).map_err(|e| match e {
                Error::Precondition(m) => CliError::NotPrivate(m),
                other => other.into(),
            })?;
            let file = DecompositionFile::new(&dec, &q);
            eprintln!("reconstruction residual {:e}", file.residual);
            emit(out.as_deref(), &(serde_json::to_string_pretty(&file).expect("decomposition serialises") + "\n"))
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("cannot parse v range `{s}`"));
    let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo < 2 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn limits(a: LimitsArgs) -> Result<(), CliError> {
    let (lo, hi) = parse_range(&a.v_range)?;
    let eps = 1e-3;
    let mut rows = Vec::new();
    for v in lo..=hi {
        let lim = corollary_ratio_limits(v)?;
        let p = curve_point(v, 1.0, eps, SweepOptions { numeric_fallback: false })?;
        let a = lim.a.zip(p.ratio_a);
        rows.push((v, lim.s, p.ratio_s.unwrap_or(f64::NAN), a));
    }
    print!("{}", io::limits_table(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match Tolerances::from_env() {
        Ok(t) => Tolerances::install(t),
        Err(e) => {
            eprintln!("error: {}: {e}", putlab::tolerance::ENV_VAR);
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Curves(a) => curves(a),
        Command::Verify(a) => verify(a),
        Command::Mechanism(c) => mechanism(c),
        Command::Limits(a) => limits(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
