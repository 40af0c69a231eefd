use serde_json::{json, Value};

use decnorm::choi::LinMap;
use decnorm::norms::{
    big_delta_norm_with, cb_norm_problem, cb_norm_with, cone_member_big_delta_with, cone_member_delta, dec_norm_problem,
    dec_norm_with, delta_norm_with, inj_norm_with, NormOptions, SolverStats, TensorElement,
};
use decnorm::sdp::{check_certificate, solve, SdpProblem, SolverOptions, Status};
use decnorm::verify::{run_suite, run_trial, SuiteConfig, SuiteReport, SUITES};

use crate::input::typed;
use crate::report::{Report, Request};
use crate::CliError;

/// Runs a request. `origin` names where the input came from, for messages.
pub fn execute(req: &Request, origin: &str) -> Result<Report, CliError> {
    match req.command.as_str() {
        "norm" => norm(req, origin),
        "cone-member" => cone_member(req, origin),
        "decompose" => decompose(req, origin),
        "verify" => verify(req),
        "solve-sdp" => solve_sdp(req, origin),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

fn input<'a>(req: &'a Request) -> Result<&'a Value, CliError> {
    req.input
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{} needs --input", req.command)))
}

fn solver_options(req: &Request) -> SolverOptions {
    SolverOptions {
        gap_tol: req.options.gap_tol,
        feas_tol: req.options.feas_tol,
        max_iter: req.options.max_iter,
    }
}

fn norm_options(req: &Request) -> NormOptions {
    NormOptions {
        solver: solver_options(req),
        seed: req.seed,
        ..NormOptions::default()
    }
}

/// Maps a library error to the CLI's classes; solver failures carry the
/// request and, when known, the program that failed.
fn lib_err(e: decnorm::Error, req: &Request, problem: impl FnOnce() -> Option<SdpProblem>) -> CliError {
    match e {
        decnorm::Error::SolverFailure {
            iteration,
            residual,
            ref message,
        } => CliError::Solver {
            message: e.to_string(),
            diagnostic: json!({
                "error": "solver-failure",
                "message": message,
                "iteration": iteration,
                "residual": if residual.is_finite() { json!(residual) } else { Value::Null },
                "request": req,
                "problem": problem(),
            }),
        },
        decnorm::Error::Domain(m) => CliError::Domain(m),
        decnorm::Error::Usage(m) => CliError::Usage(m),
    }
}

fn tensor(req: &Request, origin: &str) -> Result<TensorElement, CliError> {
    let z: TensorElement = typed(input(req)?, "tensor element", origin)?;
    if let Some(level) = req.options.level {
        if level != z.level() {
            return Err(CliError::Domain(format!(
                "{origin}: tensor has level {}, but --level {level} was given",
                z.level()
            )));
        }
    }
    Ok(z)
}

fn amplified_problem(t: &LinMap, level: usize, build: fn(&LinMap) -> SdpProblem) -> Option<SdpProblem> {
    t.amplify(level).ok().map(|m| build(&m))
}

fn norm(req: &Request, origin: &str) -> Result<Report, CliError> {
    let opts = norm_options(req);
    let target = req.target.as_deref().unwrap_or_default();
    let (result, solver) = match target {
        "dec" | "cb" => {
            let t: LinMap = typed(input(req)?, "linear map", origin)?;
            let level = req.options.level.unwrap_or(1);
            if level == 0 {
                return Err(CliError::Usage("--level must be at least 1".into()));
            }
            if target == "dec" {
                let r = dec_norm_with(&t, level, &opts)
                    .map_err(|e| lib_err(e, req, || amplified_problem(&t, level, dec_norm_problem)))?;
                (json!({ "value": r.value, "witness": r.witness }), r.solver)
            } else {
                let r = cb_norm_with(&t, level, &opts)
                    .map_err(|e| lib_err(e, req, || amplified_problem(&t, level, cb_norm_problem)))?;
                (json!({ "value": r.value, "lower_bound": r.lower_bound }), r.solver)
            }
        }
        "delta" => {
            let z = tensor(req, origin)?;
            let r = delta_norm_with(&z, &opts).map_err(|e| lib_err(e, req, || None))?;
            (
                json!({ "value": r.value, "sampled_lower": r.sampled_lower, "witness": r.dec.witness }),
                r.dec.solver,
            )
        }
        "Delta" => {
            let z = tensor(req, origin)?;
            let r = big_delta_norm_with(&z, &opts).map_err(|e| lib_err(e, req, || None))?;
            let value = (r.width() <= req.options.tol).then(|| r.midpoint());
            (
                json!({
                    "value": value,
                    "bracket": { "lower": r.lower, "upper": r.upper },
                    "converged": r.converged,
                    "primal_upper": r.primal_upper,
                }),
                r.solver,
            )
        }
        "inj" => {
            let z = tensor(req, origin)?;
            let r = inj_norm_with(&z, &opts).map_err(|e| lib_err(e, req, || None))?;
            (json!({ "value": r.value, "lower_bound": r.lower_bound }), r.solver)
        }
        other => return Err(CliError::Usage(format!("unknown norm {other:?}"))),
    };
    Ok(Report::new(req.clone(), result, solver))
}

fn cone_member(req: &Request, origin: &str) -> Result<Report, CliError> {
    let z = tensor(req, origin)?;
    let tol = req.options.tol;
    let result = match req.target.as_deref().unwrap_or_default() {
        "delta-cone" | "delta" => {
            let member = cone_member_delta(&z, tol).map_err(|e| lib_err(e, req, || None))?;
            json!({ "member": member })
        }
        "Delta-cone" | "Delta" => {
            let m = cone_member_big_delta_with(&z, tol, req.options.k_max).map_err(|e| lib_err(e, req, || None))?;
            json!({
                "member": m.member,
                "k_max_limited": m.k_max_limited,
                "k": m.witness.as_ref().map(|w| w.k),
                "witness": m.witness,
            })
        }
        other => return Err(CliError::Usage(format!("unknown cone {other:?}"))),
    };
    Ok(Report::new(req.clone(), result, None))
}

fn decompose(req: &Request, origin: &str) -> Result<Report, CliError> {
    let t: LinMap = typed(input(req)?, "linear map", origin)?;
    let opts = norm_options(req);
    let r = dec_norm_with(&t, 1, &opts).map_err(|e| lib_err(e, req, || Some(dec_norm_problem(&t))))?;
    let w = r.witness.expect("dec_norm returns a witness");
    let margin = w.block_margin(&t).map_err(|e| lib_err(e, req, || None))?;
    let result = json!({
        "value": w.value,
        "block_margin": margin,
        "witness": w,
    });
    Ok(Report::new(req.clone(), result, r.solver))
}

fn suite_config(req: &Request) -> SuiteConfig {
    let d = SuiteConfig::default();
    SuiteConfig {
        dims: req.options.dims.unwrap_or(d.dims),
        level: req.options.level.unwrap_or(d.level),
        trials: req.options.trials.unwrap_or(d.trials),
        seed: req.seed,
        workers: req.options.workers.unwrap_or(d.workers),
    }
}

fn verify(req: &Request) -> Result<Report, CliError> {
    let cfg = suite_config(req);
    if cfg.dims == 0 || cfg.level == 0 {
        return Err(CliError::Usage("--dims and --level must be at least 1".into()));
    }
    let target = req.target.as_deref().unwrap_or("all");
    let names: Vec<&str> = if target == "all" { SUITES.to_vec() } else { vec![target] };
    let mut reports = Vec::new();
    for name in names {
        reports.push(run_suite(name, &cfg).map_err(|e| lib_err(e, req, || None))?);
    }
    let passed = reports.iter().all(SuiteReport::passed);
    Ok(Report::new(req.clone(), json!({ "passed": passed, "reports": reports }), None))
}

/// Reruns one trial from a failure's reproduction record.
pub fn replay_trial(repro: &Value, req: &Request) -> Result<Report, CliError> {
    let suite = repro["suite"]
        .as_str()
        .ok_or_else(|| CliError::Usage("reproduction record has no suite".into()))?;
    let cfg: SuiteConfig = serde_json::from_value(repro["config"].clone())
        .map_err(|e| CliError::Usage(format!("reproduction record has a bad config: {e}")))?;
    let trial = repro["trial"]
        .as_u64()
        .ok_or_else(|| CliError::Usage("reproduction record has no trial".into()))? as usize;
    let outcome = run_trial(suite, &cfg, trial).map_err(|e| lib_err(e, req, || None))?;
    let (_, tol) = decnorm::verify::suite_info(suite).map_err(|e| lib_err(e, req, || None))?;
    let passed = outcome.error.is_none() && outcome.checks.iter().all(|c| c.violation <= tol);
    let mut req = req.clone();
    req.target = Some(suite.to_string());
    req.seed = cfg.seed;
    let result = json!({
        "passed": passed,
        "tolerance": tol,
        "instance_matches": outcome.instance == repro["instance"],
        "trial": outcome,
    });
    Ok(Report::new(req, result, None))
}

fn solve_sdp(req: &Request, origin: &str) -> Result<Report, CliError> {
    let p: SdpProblem = typed(input(req)?, "SDP problem", origin)?;
    let sol = solve(&p, &solver_options(req)).map_err(|e| lib_err(e, req, || None))?;
    let cert = check_certificate(&p, &sol);
    let stats = SolverStats {
        status: sol.status,
        iterations: sol.iterations,
        gap: sol.gap,
        primal_infeasibility: sol.primal_infeasibility,
        dual_infeasibility: sol.dual_infeasibility,
    };
    if sol.status == Status::MaxIter {
        return Err(CliError::Solver {
            message: format!("solver hit the iteration cap after {} iterations", sol.iterations),
            diagnostic: json!({
                "error": "solver-failure",
                "message": "iteration cap reached",
                "iteration": sol.iterations,
                "residual": sol.gap.max(sol.primal_infeasibility).max(sol.dual_infeasibility),
                "request": req,
                "problem": Value::Null,
                "solver": stats,
            }),
        });
    }
    let result = json!({
        "status": sol.status,
        "value": sol.value(),
        "primal_value": sol.primal_value,
        "dual_value": sol.dual_value,
        "certificate": cert,
        "dropped_rows": sol.dropped_rows,
        "solution": sol,
    });
    Ok(Report::new(req.clone(), result, Some(stats)))
}
