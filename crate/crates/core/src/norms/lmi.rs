//! Linear matrix inequalities `Σ y_i A_i + K ⪰ 0` with objective `min b·y`,
//! assembled as the dual of a maximization in standard form.

use num_complex::Complex64;

use crate::linalg::{CMatrix, C0};
use crate::sdp::{Constraint, Sense, SdpProblem};

#[derive(Clone, Copy, Debug)]
enum Param {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

/// An `n x n` Hermitian matrix of unknowns, one `y` per real parameter.
#[derive(Clone, Copy, Debug)]
pub(crate) struct HermVar {
    first: usize,
    n: usize,
}

impl HermVar {
    fn params(&self) -> impl Iterator<Item = (usize, Param)> + '_ {
        let n = self.n;
        let diag = (0..n).map(Param::Diag);
        let off = (0..n).flat_map(move |i| {
            (i + 1..n).flat_map(move |j| [Param::Re(i, j), Param::Im(i, j)])
        });
        diag.chain(off)
            .enumerate()
            .map(move |(k, p)| (self.first + k, p))
    }

    pub fn value(&self, y: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (k, p) in self.params() {
            match p {
                Param::Diag(i) => m[(i, i)] = Complex64::new(y[k], 0.0),
                Param::Re(i, j) => {
                    m[(i, j)].re = y[k];
                    m[(j, i)].re = y[k];
                }
                Param::Im(i, j) => {
                    m[(i, j)].im = y[k];
                    m[(j, i)].im = -y[k];
                }
            }
        }
        m
    }
}

pub(crate) struct LmiBuilder {
    pub problem: SdpProblem,
}

impl LmiBuilder {
    pub fn new(blocks: Vec<usize>) -> Self {
        Self {
            problem: SdpProblem::new(blocks, Sense::Maximize),
        }
    }

    /// New scalar unknown with objective coefficient `cost`.
    pub fn scalar(&mut self, cost: f64) -> usize {
        self.problem.add_constraint(Constraint::new(cost));
        self.problem.constraints.len() - 1
    }

    pub fn hermitian(&mut self, n: usize) -> HermVar {
        let first = self.problem.constraints.len();
        for _ in 0..n * n {
            self.problem.add_constraint(Constraint::new(0.0));
        }
        HermVar { first, n }
    }

    /// Adds `scale · I` on the diagonal of `block` to the coefficient of `y`.
    pub fn place_scalar(&mut self, y: usize, block: usize, range: std::ops::Range<usize>, scale: f64) {
        let c = &mut self.problem.constraints[y];
        for i in range {
            c.add_hermitian_entry(block, i, i, Complex64::new(scale, 0.0));
        }
    }

    /// Adds `scale · S[i, j]` at position `pos(i, j)` of `block` for every
    /// entry with `pos` defined. `pos(j, i)` must be the transpose of
    /// `pos(i, j)`.
    pub fn place(
        &mut self,
        var: HermVar,
        block: usize,
        pos: impl Fn(usize, usize) -> Option<(usize, usize)>,
        scale: f64,
    ) {
        for (k, p) in var.params() {
            let c = &mut self.problem.constraints[k];
            match p {
                Param::Diag(i) => {
                    if let Some((r, s)) = pos(i, i) {
                        c.add_hermitian_entry(block, r, s, Complex64::new(scale, 0.0));
                    }
                }
                Param::Re(i, j) => {
                    if let Some((r, s)) = pos(i, j) {
                        let w = if r == s { 2.0 * scale } else { scale };
                        c.add_hermitian_entry(block, r, s, Complex64::new(w, 0.0));
                    }
                }
                Param::Im(i, j) => {
                    if let Some((r, s)) = pos(i, j) {
                        if r != s {
                            c.add_hermitian_entry(block, r, s, Complex64::new(0.0, scale));
                        }
                    }
                }
            }
        }
    }

    /// Adds the constant `K` (Hermitian) at offset `(off, off)` of `block`.
    pub fn constant(&mut self, block: usize, off: usize, k: &CMatrix) {
        let c = &mut self.problem.objective[block];
        for i in 0..k.rows() {
            for j in 0..k.cols() {
                if k[(i, j)] != C0 {
                    c[(off + i, off + j)] -= k[(i, j)];
                }
            }
        }
    }
}
