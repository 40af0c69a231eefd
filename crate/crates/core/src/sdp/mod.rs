//! Standard-form semidefinite programs over block-diagonal Hermitian
//! variables, and a primal-dual interior-point solver for them.
//!
//! Primal: optimize `⟨C, X⟩` subject to `⟨A_i, X⟩ = b_i`, `X ⪰ 0`, where
//! `⟨H, X⟩ = Re tr(H X)` summed over blocks. For a minimization the dual is
//! `max b·y` subject to `Z = C − Σ y_i A_i ⪰ 0`; for a maximization it is
//! `min b·y` subject to `Z = Σ y_i A_i − C ⪰ 0`.

mod certificate;
mod solver;

pub use certificate::{check_certificate, Certificate};
pub use solver::solve;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C0};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// One nonzero of a Hermitian coefficient matrix, encoded `[row, col, [re, im]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, [f64; 2])", into = "(usize, usize, [f64; 2])")]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

impl From<(usize, usize, [f64; 2])> for Entry {
    fn from((row, col, v): (usize, usize, [f64; 2])) -> Self {
        Entry {
            row,
            col,
            value: Complex64::new(v[0], v[1]),
        }
    }
}

impl From<Entry> for (usize, usize, [f64; 2]) {
    fn from(e: Entry) -> Self {
        (e.row, e.col, [e.value.re, e.value.im])
    }
}

/// The part of a constraint matrix living in one variable block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockTerm {
    pub block: usize,
    pub entries: Vec<Entry>,
}

/// `⟨A, X⟩ = rhs` with `A` Hermitian, given sparsely.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<BlockTerm>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(rhs: f64) -> Self {
        Self {
            terms: Vec::new(),
            rhs,
        }
    }

    fn push(&mut self, block: usize, row: usize, col: usize, value: Complex64) {
        let e = Entry { row, col, value };
        match self.terms.iter_mut().find(|t| t.block == block) {
            Some(t) => t.entries.push(e),
            None => self.terms.push(BlockTerm {
                block,
                entries: vec![e],
            }),
        }
    }

    /// Adds the term `Re(c · X_{ij})` to the constraint functional.
    pub fn add_re(&mut self, block: usize, i: usize, j: usize, c: Complex64) -> &mut Self {
        if i == j {
            self.push(block, i, i, Complex64::new(c.re, 0.0));
        } else {
            self.push(block, j, i, c * 0.5);
            self.push(block, i, j, c.conj() * 0.5);
        }
        self
    }

    /// Adds `w E_{ij} + conj(w) E_{ji}` to the coefficient matrix, or
    /// `Re(w) E_{ii}` on the diagonal.
    pub fn add_hermitian_entry(&mut self, block: usize, i: usize, j: usize, w: Complex64) -> &mut Self {
        if i == j {
            self.add_re(block, i, i, w)
        } else {
            self.add_re(block, i, j, w.conj() * 2.0)
        }
    }

    /// Adds `c · Re X_{ij}`.
    pub fn add_real_part(&mut self, block: usize, i: usize, j: usize, c: f64) -> &mut Self {
        self.add_re(block, i, j, Complex64::new(c, 0.0))
    }

    /// Adds `c · Im X_{ij}`.
    pub fn add_imag_part(&mut self, block: usize, i: usize, j: usize, c: f64) -> &mut Self {
        // Re(-i c X) = c Im X
        self.add_re(block, i, j, Complex64::new(0.0, -c))
    }

    /// Merges repeated positions and drops zeros; sorts for a canonical form.
    pub fn canonicalize(&mut self) {
        for t in &mut self.terms {
            t.entries.sort_by_key(|e| (e.row, e.col));
            let mut merged: Vec<Entry> = Vec::with_capacity(t.entries.len());
            for e in t.entries.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.row == e.row && last.col == e.col => last.value += e.value,
                    _ => merged.push(e),
                }
            }
            merged.retain(|e| e.value != C0);
            t.entries = merged;
        }
        self.terms.retain(|t| !t.entries.is_empty());
        self.terms.sort_by_key(|t| t.block);
    }

    /// `Re tr(A X)` for block-diagonal `X`.
    pub fn evaluate(&self, x: &[CMatrix]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let xb = &x[t.block];
                t.entries
                    .iter()
                    .map(|e| (e.value * xb[(e.col, e.row)]).re)
                    .sum::<f64>()
            })
            .sum()
    }

    /// Adds `s · A` into block-diagonal `out`.
    pub fn accumulate(&self, s: f64, out: &mut [CMatrix]) {
        for t in &self.terms {
            let ob = &mut out[t.block];
            for e in &t.entries {
                ob[(e.row, e.col)] += e.value * s;
            }
        }
    }
}

/// A standard-form SDP.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    /// Side length of each Hermitian variable block.
    pub blocks: Vec<usize>,
    /// Objective matrix per block (Hermitian).
    pub objective: Vec<CMatrix>,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(blocks: Vec<usize>, sense: Sense) -> Self {
        let objective = blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        Self {
            blocks,
            objective,
            constraints: Vec::new(),
            sense,
        }
    }

    /// Adds `Re(c · X_{ij})` to the objective.
    pub fn add_objective_re(&mut self, block: usize, i: usize, j: usize, c: Complex64) {
        let ob = &mut self.objective[block];
        if i == j {
            ob[(i, i)] += Complex64::new(c.re, 0.0);
        } else {
            ob[(j, i)] += c * 0.5;
            ob[(i, j)] += c.conj() * 0.5;
        }
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.rhs).collect()
    }

    /// `⟨C, X⟩`.
    pub fn objective_value(&self, x: &[CMatrix]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xb)| c.inner_re(xb)).sum()
    }

    /// `A(X)`.
    pub fn apply_constraints(&self, x: &[CMatrix]) -> Vec<f64> {
        self.constraints.iter().map(|c| c.evaluate(x)).collect()
    }

    /// `Σ y_i A_i` as block-diagonal matrices.
    pub fn adjoint_constraints(&self, y: &[f64]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = self.blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        for (c, &yi) in self.constraints.iter().zip(y) {
            if yi != 0.0 {
                c.accumulate(yi, &mut out);
            }
        }
        out
    }

    /// Checks shapes, indices and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::domain("SDP needs at least one variable block"));
        }
        if self.blocks.iter().any(|&n| n == 0) {
            return Err(Error::domain("SDP variable blocks must have positive size"));
        }
        if self.objective.len() != self.blocks.len() {
            return Err(Error::domain("objective must have one matrix per block"));
        }
        for (b, (c, &n)) in self.objective.iter().zip(&self.blocks).enumerate() {
            if c.shape() != (n, n) {
                return Err(Error::domain(format!(
                    "objective block {b} has shape {:?}, expected {n}x{n}",
                    c.shape()
                )));
            }
            if c.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::domain(format!("objective block {b} is not finite")));
            }
            if !c.is_hermitian(1e-12 * (1.0 + c.max_abs())) {
                return Err(Error::domain(format!("objective block {b} is not Hermitian")));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::domain(format!("constraint {i} has non-finite rhs")));
            }
            for t in &con.terms {
                let Some(&n) = self.blocks.get(t.block) else {
                    return Err(Error::domain(format!(
                        "constraint {i} references missing block {}",
                        t.block
                    )));
                };
                for e in &t.entries {
                    if e.row >= n || e.col >= n {
                        return Err(Error::domain(format!(
                            "constraint {i} entry ({}, {}) outside block {} of size {n}",
                            e.row, e.col, t.block
                        )));
                    }
                    if !e.value.re.is_finite() || !e.value.im.is_finite() {
                        return Err(Error::domain(format!("constraint {i} is not finite")));
                    }
                }
            }
            let mut dense: Vec<CMatrix> = self.blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
            con.accumulate(1.0, &mut dense);
            for (b, m) in dense.iter().enumerate() {
                if !m.is_hermitian(1e-12 * (1.0 + m.max_abs())) {
                    return Err(Error::domain(format!(
                        "constraint {i} is not Hermitian in block {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

/// Solver tolerances. Gap and residuals are relative:
/// gap `= max(|p − d|, ⟨X,Z⟩) / (1 + |p| + |d|)`,
/// primal residual `= ‖b − A(X)‖ / (1 + ‖b‖)`,
/// dual residual `= ‖C ∓ A^*(y) − Z‖_F / (1 + ‖C‖_F)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-9,
            max_iter: 100,
        }
    }
}

/// Result of [`solve`]. `y` and `z` are the dual variables in the sign
/// convention of the problem's own sense.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub variable_values: Vec<CMatrix>,
    pub y: Vec<f64>,
    pub z: Vec<CMatrix>,
    pub status: Status,
    pub iterations: usize,
    /// Constraint rows removed by presolve (zero or duplicate rows).
    pub dropped_rows: Vec<usize>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Midpoint of the primal and dual values.
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }
}

/// Relative gap used throughout.
pub(crate) fn relative_gap(p: f64, d: f64, xz: f64) -> f64 {
    (p - d).abs().max(xz.abs()) / (1.0 + p.abs() + d.abs())
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn blocks_frobenius(m: &[CMatrix]) -> f64 {
    m.iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}
