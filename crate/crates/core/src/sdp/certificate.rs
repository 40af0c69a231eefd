//! Independent recomputation of SDP residuals.
//!
//! Uses only the problem data and the reported primal/dual point, and the
//! Jacobi eigensolver for the PSD checks, so it shares nothing with the
//! interior-point internals.

use serde::{Deserialize, Serialize};

use super::{blocks_frobenius, norm2, relative_gap, SdpProblem, SdpSolution, Sense};
use crate::linalg::{psd_check, CMatrix, HermitianMatrix};

/// Relative residuals of a claimed solution, in the same measures the solver
/// uses for its stopping test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `max(‖b − A(X)‖/(1+‖b‖), PSD violation of X)`.
    pub primal_feas: f64,
    /// `max(‖S − Z‖_F/(1+‖C‖_F), PSD violation of Z)` with `S` the dual slack
    /// recomputed from `y`.
    pub dual_feas: f64,
    pub gap: f64,
}

fn psd_violation(blocks: &[CMatrix]) -> f64 {
    blocks
        .iter()
        .map(|m| {
            let Ok(h) = HermitianMatrix::new(m) else {
                return f64::INFINITY;
            };
            match psd_check(&h, 0.0) {
                Ok(c) => (-c.min_eig).max(0.0) / (1.0 + m.max_abs()),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

pub fn check_certificate(p: &SdpProblem, s: &SdpSolution) -> Certificate {
    let x = &s.variable_values;
    let b = p.rhs();
    let ax = p.apply_constraints(x);
    let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let primal_feas = (norm2(&rp) / (1.0 + norm2(&b))).max(psd_violation(x));

    let aty = p.adjoint_constraints(&s.y);
    let slack: Vec<CMatrix> = p
        .objective
        .iter()
        .zip(&aty)
        .map(|(c, a)| match p.sense {
            Sense::Minimize => c - a,
            Sense::Maximize => a - c,
        })
        .collect();
    let diff: Vec<CMatrix> = slack.iter().zip(&s.z).map(|(a, z)| a - z).collect();
    let dual_feas =
        (blocks_frobenius(&diff) / (1.0 + blocks_frobenius(&p.objective))).max(psd_violation(&s.z));

    let pv = p.objective_value(x);
    let dv: f64 = b.iter().zip(&s.y).map(|(bi, yi)| bi * yi).sum();
    let xz: f64 = x.iter().zip(&s.z).map(|(a, z)| a.inner_re(z)).sum();
    Certificate {
        primal_feas,
        dual_feas,
        gap: relative_gap(pv, dv, xz),
    }
}
