//! Seeded property suites.
//!
//! Each suite draws `trials` independent instances, computes the quantities
//! it compares, and records every comparison as a [`Check`]: a named
//! violation that must not exceed the suite's declared tolerance. Trial `t`
//! of a suite draws from its own random stream, so reports do not depend on
//! the number of workers.

pub mod gen;
pub mod projective;
mod suites;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::random::{stream_rng, Rng64};

pub use projective::{cb_ball_sup, cross_check_projective, ProjectiveCheck};

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 14] = [
    "regularity",
    "cone-arith",
    "subcross",
    "delta-le-Delta",
    "positive-lemma",
    "duality1",
    "duality2",
    "pisier",
    "functorial-cp",
    "functorial-dec",
    "injective-coincide",
    "ell2-coincide",
    "unitary",
    "factorization",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Cap on the total matrix side of each leg.
    pub dims: usize,
    /// Cap on the matrix level.
    pub level: usize,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    pub workers: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: 4,
            level: 2,
            trials: 20,
            seed: 0,
            workers: 1,
        }
    }
}

/// One compared quantity: `violation ≤ tolerance` passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub quantity: String,
    pub violation: f64,
}

impl Check {
    pub fn new(quantity: impl Into<String>, violation: f64) -> Self {
        Self {
            quantity: quantity.into(),
            violation,
        }
    }

    /// `lhs ≤ rhs`.
    pub fn le(quantity: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(quantity, lhs - rhs)
    }

    /// `lhs == rhs`.
    pub fn eq(quantity: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(quantity, (lhs - rhs).abs())
    }

    /// A yes/no property: violation 0 or 1.
    pub fn holds(quantity: impl Into<String>, ok: bool) -> Self {
        Self::new(quantity, if ok { 0.0 } else { 1.0 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub seed: u64,
    pub quantity: String,
    /// `None` when the trial could not be evaluated.
    pub violation: Option<f64>,
    /// `"solver-failure"`, `"domain-error"` or `"violation"`.
    pub tag: String,
    pub message: Option<String>,
    /// Self-contained reproduction: suite, configuration, trial and the
    /// instance data.
    pub repro: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub description: String,
    pub tolerance: f64,
    pub config: SuiteConfig,
    pub trials: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
    /// Largest violation over all checks (at least 0); infinite, written as
    /// `null`, when a trial failed to evaluate.
    #[serde(with = "inf_as_null")]
    pub max_violation: f64,
    /// Largest violation per quantity.
    pub quantities: BTreeMap<String, f64>,
    pub elapsed_ms: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// The report with its timing zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "suite {}  (tolerance {:e}, {} trials, {} checks, seed {}, dims {}, level {})\n",
            self.suite,
            self.tolerance,
            self.trials,
            self.checks,
            self.config.seed,
            self.config.dims,
            self.config.level
        );
        out.push_str(&format!("{:<40} {:>14}\n", "quantity", "max violation"));
        for (q, v) in &self.quantities {
            out.push_str(&format!("{q:<40} {v:>14.3e}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!(
                "FAIL trial {} {} [{}] {}\n",
                f.trial,
                f.quantity,
                f.tag,
                f.violation
                    .map(|v| format!("{v:.3e}"))
                    .or_else(|| f.message.clone())
                    .unwrap_or_default()
            ));
        }
        out.push_str(&format!(
            "{}  max violation {}  ({:.0} ms)\n",
            if self.passed() { "PASS" } else { "FAIL" },
            if self.max_violation.is_finite() {
                format!("{:.3e}", self.max_violation)
            } else {
                "n/a".into()
            },
            self.elapsed_ms
        ));
        out
    }
}

/// The instance and checks of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub instance: Value,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub solver_failure: bool,
}

pub(crate) type SuiteFn = fn(&mut Rng64, &SuiteConfig, &mut Value) -> Result<Vec<Check>>;

pub(crate) struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub tolerance: f64,
    pub run: SuiteFn,
}

fn lookup(name: &str) -> Result<(usize, &'static Suite)> {
    suites::ALL
        .iter()
        .enumerate()
        .find(|(_, s)| s.name == name)
        .ok_or_else(|| Error::usage(format!("unknown suite {name:?}; known suites: {}", SUITES.join(", "))))
}

/// Description and tolerance of a suite.
pub fn suite_info(name: &str) -> Result<(&'static str, f64)> {
    let (_, s) = lookup(name)?;
    Ok((s.description, s.tolerance))
}

/// Runs a single trial of a suite.
pub fn run_trial(name: &str, config: &SuiteConfig, trial: usize) -> Result<TrialOutcome> {
    let (index, suite) = lookup(name)?;
    Ok(trial_outcome(index, suite, config, trial))
}

fn trial_outcome(index: usize, suite: &Suite, config: &SuiteConfig, trial: usize) -> TrialOutcome {
    let mut rng = stream_rng(config.seed, ((index as u64) << 32) | trial as u64);
    let mut instance = json!({});
    match (suite.run)(&mut rng, config, &mut instance) {
        Ok(checks) => TrialOutcome {
            trial,
            instance,
            checks,
            error: None,
            solver_failure: false,
        },
        Err(e) => TrialOutcome {
            trial,
            instance,
            checks: Vec::new(),
            solver_failure: e.is_solver_failure(),
            error: Some(e.to_string()),
        },
    }
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let (index, suite) = lookup(name)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::usage(format!("cannot start workers: {e}")))?;
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| trial_outcome(index, suite, config, t))
            .collect()
    });

    let mut failures = Vec::new();
    let mut quantities: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_violation = 0.0f64;
    let mut checks = 0;
    for o in outcomes {
        let repro = || {
            json!({
                "suite": name,
                "config": config,
                "trial": o.trial,
                "instance": o.instance,
            })
        };
        if let Some(msg) = &o.error {
            max_violation = f64::INFINITY;
            failures.push(Failure {
                trial: o.trial,
                seed: config.seed,
                quantity: "evaluation".into(),
                violation: None,
                tag: if o.solver_failure { "solver-failure" } else { "domain-error" }.into(),
                message: Some(msg.clone()),
                repro: repro(),
            });
            continue;
        }
        for c in &o.checks {
            checks += 1;
            let v = if c.violation.is_nan() { f64::INFINITY } else { c.violation };
            let slot = quantities.entry(c.quantity.clone()).or_insert(0.0);
            *slot = slot.max(v);
            max_violation = max_violation.max(v);
            if v > suite.tolerance {
                failures.push(Failure {
                    trial: o.trial,
                    seed: config.seed,
                    quantity: c.quantity.clone(),
                    violation: Some(v),
                    tag: "violation".into(),
                    message: None,
                    repro: repro(),
                });
            }
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        description: suite.description.to_string(),
        tolerance: suite.tolerance,
        config: config.clone(),
        trials: config.trials,
        checks,
        failures,
        max_violation,
        quantities,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
