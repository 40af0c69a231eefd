//! `decnorm`: norms, cones and verification suites from the command line.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 solver failure (a
//! diagnostic JSON document goes to standard output), 3 a verification
//! suite reported failures.

mod input;
mod report;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use report::{Options, Report, Request};

pub enum CliError {
    Usage(String),
    Domain(String),
    Solver { message: String, diagnostic: Value },
}

#[derive(Parser)]
#[command(name = "decnorm", version, about = "Decomposable, cb, δ- and Δ-norms of finite-dimensional C*-algebra maps and tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a norm of a linear map (dec, cb) or a tensor (delta, Delta, inj).
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        #[command(flatten)]
        input: InputArg,
        /// Matrix level; for tensors it must match the level in the file.
        #[arg(long)]
        level: Option<usize>,
        /// Bracket width below which a Delta bracket is reported as a value.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide membership of a tensor in the δ-cone or the Δ-cone.
    ConeMember {
        #[arg(value_enum)]
        cone: ConeKind,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        level: Option<usize>,
        /// Eigenvalue tolerance of the positivity tests.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Largest factorization size tried for the Δ-cone [default: dim A · dim B].
        #[arg(long)]
        k_max: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Split a linear map into the witness pair of its dec norm.
    Decompose {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a verification suite, or all of them.
    Verify {
        /// Suite name, or `all`.
        #[arg(required_unless_present = "replay")]
        suite: Option<String>,
        /// Cap on the total matrix side of each leg.
        #[arg(long, default_value_t = 4)]
        dims: usize,
        /// Cap on the matrix level.
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Rerun a verify report, or one trial from a failure's `repro` record.
        #[arg(long, conflicts_with = "suite")]
        replay: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve a semidefinite program given as JSON.
    SolveSdp {
        #[arg(long, required_unless_present = "replay")]
        input: Option<PathBuf>,
        /// Rerun any non-verify report produced by this tool.
        #[arg(long, conflicts_with = "input")]
        replay: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    #[value(name = "dec")]
    Dec,
    #[value(name = "cb")]
    Cb,
    #[value(name = "delta")]
    Delta,
    #[value(name = "Delta")]
    BigDelta,
    #[value(name = "inj")]
    Inj,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeKind {
    #[value(name = "delta-cone", alias = "delta")]
    Delta,
    #[value(name = "Delta-cone", alias = "Delta")]
    BigDelta,
}

#[derive(Args)]
struct InputArg {
    /// JSON input file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative duality gap at which the solver stops.
    #[arg(long, default_value_t = 1e-8)]
    gap_tol: f64,
    /// Relative primal and dual residual at which the solver stops.
    #[arg(long, default_value_t = 1e-9)]
    feas_tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

#[derive(Args)]
struct CommonArgs {
    /// Seed for all randomness [default: $DECNORM_SEED, else 0].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Output {
    Json,
    Table,
}

fn seed(common: &CommonArgs) -> Result<u64, CliError> {
    if let Some(s) = common.seed {
        return Ok(s);
    }
    match std::env::var("DECNORM_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("DECNORM_SEED={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn options(level: Option<usize>, tol: f64, solver: Option<&SolverArgs>) -> Options {
    let defaults = decnorm::sdp::SolverOptions::default();
    Options {
        level,
        tol,
        gap_tol: solver.map_or(defaults.gap_tol, |s| s.gap_tol),
        feas_tol: solver.map_or(defaults.feas_tol, |s| s.feas_tol),
        max_iter: solver.map_or(defaults.max_iter, |s| s.max_iter),
        k_max: None,
        trials: None,
        dims: None,
        workers: None,
    }
}

fn request(command: &str, target: Option<&str>, seed: u64, options: Options, input: Option<Value>) -> Request {
    Request {
        command: command.into(),
        target: target.map(Into::into),
        seed,
        options,
        input,
    }
}

/// Reads a report written by this tool and rebuilds its request.
fn load_report(path: &PathBuf) -> Result<(Value, Option<Request>), CliError> {
    let doc = input::read_json(path)?;
    let req = serde_json::from_value::<Request>(doc.clone()).ok();
    Ok((doc, req))
}

fn dispatch(cli: Cli) -> Result<(Report, Output), CliError> {
    match cli.command {
        Command::Norm {
            kind,
            input,
            level,
            tol,
            solver,
            common,
        } => {
            let target = match kind {
                NormKind::Dec => "dec",
                NormKind::Cb => "cb",
                NormKind::Delta => "delta",
                NormKind::BigDelta => "Delta",
                NormKind::Inj => "inj",
            };
            let doc = input::read_json(&input.input)?;
            let req = request("norm", Some(target), seed(&common)?, options(level, tol, Some(&solver)), Some(doc));
            Ok((run::execute(&req, &input.input.display().to_string())?, common.output))
        }
        Command::ConeMember {
            cone,
            input,
            level,
            tol,
            k_max,
            common,
        } => {
            let target = match cone {
                ConeKind::Delta => "delta-cone",
                ConeKind::BigDelta => "Delta-cone",
            };
            let doc = input::read_json(&input.input)?;
            let mut opts = options(level, tol, None);
            opts.k_max = k_max;
            let req = request("cone-member", Some(target), seed(&common)?, opts, Some(doc));
            Ok((run::execute(&req, &input.input.display().to_string())?, common.output))
        }
        Command::Decompose { input, solver, common } => {
            let doc = input::read_json(&input.input)?;
            let req = request("decompose", None, seed(&common)?, options(None, 0.0, Some(&solver)), Some(doc));
            Ok((run::execute(&req, &input.input.display().to_string())?, common.output))
        }
        Command::Verify {
            suite,
            dims,
            level,
            trials,
            workers,
            replay,
            common,
        } => {
            if let Some(path) = replay {
                let (doc, req) = load_report(&path)?;
                let report = match req {
                    Some(req) if req.command == "verify" => run::execute(&req, "replay")?,
                    _ if doc.get("suite").is_some() && doc.get("instance").is_some() => {
                        let mut opts = options(Some(level), 0.0, None);
                        opts.dims = Some(dims);
                        let req = request("verify", None, seed(&common)?, opts, None);
                        run::replay_trial(&doc, &req)?
                    }
                    _ => {
                        return Err(CliError::Usage(format!(
                            "{}: neither a verify report nor a failure reproduction record",
                            path.display()
                        )))
                    }
                };
                return Ok((report, common.output));
            }
            let mut opts = options(Some(level), 0.0, None);
            opts.dims = Some(dims);
            opts.trials = Some(trials);
            opts.workers = Some(workers);
            let req = request("verify", suite.as_deref(), seed(&common)?, opts, None);
            Ok((run::execute(&req, "")?, common.output))
        }
        Command::SolveSdp {
            input,
            replay,
            solver,
            common,
        } => {
            if let Some(path) = replay {
                let (_, req) = load_report(&path)?;
                let req = match req {
                    Some(req) if req.command != "verify" => req,
                    _ => {
                        return Err(CliError::Usage(format!(
                            "{}: not a norm, cone-member, decompose or solve-sdp report (use verify --replay for suites)",
                            path.display()
                        )))
                    }
                };
                return Ok((run::execute(&req, &path.display().to_string())?, common.output));
            }
            let path = input.expect("clap enforces --input or --replay");
            let doc = input::read_json(&path)?;
            let req = request("solve-sdp", None, seed(&common)?, options(None, 0.0, Some(&solver)), Some(doc));
            Ok((run::execute(&req, &path.display().to_string())?, common.output))
        }
    }
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok((report, output)) => {
            match output {
                Output::Json => emit(&(serde_json::to_string_pretty(&report).expect("reports serialize") + "\n")),
                Output::Table => emit(&report.table()),
            }
            if report.result.get("passed") == Some(&Value::Bool(false)) {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(m)) => {
            eprintln!("domain error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Solver { message, diagnostic }) => {
            eprintln!("solver failure: {message}");
            emit(&(serde_json::to_string_pretty(&diagnostic).expect("diagnostics serialize") + "\n"));
            ExitCode::from(2)
        }
    }
}
