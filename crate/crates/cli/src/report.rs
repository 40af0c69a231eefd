use serde::{Deserialize, Serialize};
use serde_json::Value;

use decnorm::norms::SolverStats;
use decnorm::verify::SuiteReport;

/// Options as they were applied; replaying a report reuses them verbatim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    pub level: Option<usize>,
    pub tol: f64,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    pub k_max: Option<usize>,
    pub trials: Option<usize>,
    pub dims: Option<usize>,
    pub workers: Option<usize>,
}

/// Everything needed to rerun a computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub command: String,
    pub target: Option<String>,
    pub seed: u64,
    pub options: Options,
    /// The parsed input document, embedded so that the report is
    /// self-contained.
    pub input: Option<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub request: Request,
    pub result: Value,
    pub solver: Option<SolverStats>,
}

impl Report {
    pub fn new(request: Request, result: Value, solver: Option<SolverStats>) -> Self {
        Self {
            tool: "decnorm".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            request,
            result,
            solver,
        }
    }

    pub fn table(&self) -> String {
        if self.request.command == "verify" {
            if let Some(reports) = self.result.get("reports") {
                let reports: Vec<SuiteReport> = serde_json::from_value(reports.clone()).unwrap_or_default();
                if !reports.is_empty() {
                    return reports.iter().map(SuiteReport::table).collect::<Vec<_>>().join("\n");
                }
            }
        }
        let mut out = format!(
            "{} {}  (seed {})\n",
            self.request.command,
            self.request.target.as_deref().unwrap_or(""),
            self.request.seed
        );
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                match v {
                    Value::Object(inner) if k == "bracket" => {
                        for (ik, iv) in inner {
                            out.push_str(&format!("{:<24} {}\n", format!("{k}.{ik}"), scalar(iv)));
                        }
                    }
                    Value::Object(_) | Value::Array(_) => {}
                    _ => out.push_str(&format!("{k:<24} {}\n", scalar(v))),
                }
            }
        }
        if let Some(s) = &self.solver {
            out.push_str(&format!(
                "{:<24} {:?}, {} iterations, gap {:.3e}\n",
                "solver", s.status, s.iterations, s.gap
            ));
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.10}"),
            _ => n.to_string(),
        },
        Value::Null => "n/a".into(),
        other => other.to_string().trim_matches('"').to_string(),
    }
}
