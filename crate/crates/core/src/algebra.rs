//! Finite-dimensional C*-algebras, their trace duals, and elements of the
//! matrix levels `M_n(V)` for `V = A` or `V = A*`.
//!
//! An algebra is a list of block sizes `[n_1, .., n_k]`; its elements are
//! block-diagonal `D x D` matrices with `D = Σ n_b`. A functional `f ∈ A*` is
//! stored as the block-diagonal matrix `F` with `f(a) = tr(F a)`.
//!
//! A level-`n` element is an `nD x nD` matrix made of `n x n` slots of size
//! `D`, each slot carrying the block pattern of the algebra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::choi::LinMap;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_function, op_norm, psd_check, CMatrix, HermitianMatrix, C0, C1};

/// A finite-dimensional C*-algebra `M_{n_1} ⊕ .. ⊕ M_{n_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr")]
pub struct Algebra {
    blocks: Vec<usize>,
}

#[derive(Deserialize)]
struct AlgebraRepr {
    blocks: Vec<usize>,
}

impl TryFrom<AlgebraRepr> for Algebra {
    type Error = Error;
    fn try_from(r: AlgebraRepr) -> Result<Self> {
        Algebra::new(r.blocks)
    }
}

/// Position of a matrix unit `e^{(b)}_{st}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Unit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl Algebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::domain("an algebra needs at least one block"));
        }
        if blocks.iter().any(|&n| n == 0) {
            return Err(Error::domain("block sizes must be positive"));
        }
        Ok(Self { blocks })
    }

    /// `M_d`.
    pub fn full(d: usize) -> Self {
        Self::new(vec![d]).expect("positive size")
    }

    /// `ℓ∞^n`, the diagonal algebra.
    pub fn diagonal(n: usize) -> Self {
        Self::new(vec![1; n]).expect("positive size")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self, b: usize) -> usize {
        self.blocks[b]
    }

    /// Side `D` of the embedding matrices.
    pub fn side(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Vector-space dimension `Σ n_b²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Row offset of block `b` in the embedding.
    pub fn offset(&self, b: usize) -> usize {
        self.blocks[..b].iter().sum()
    }

    /// Index of `e^{(b)}_{st}` in the canonical basis.
    pub fn unit_index(&self, block: usize, row: usize, col: usize) -> usize {
        let before: usize = self.blocks[..block].iter().map(|n| n * n).sum();
        before + row * self.blocks[block] + col
    }

    pub fn units(&self) -> impl Iterator<Item = Unit> + '_ {
        self.blocks.iter().enumerate().flat_map(|(block, &n)| {
            (0..n).flat_map(move |row| (0..n).map(move |col| Unit { block, row, col }))
        })
    }

    pub fn unit(&self, k: usize) -> Unit {
        self.units().nth(k).expect("basis index in range")
    }

    /// Embedding of `e^{(b)}_{st}`.
    pub fn unit_matrix(&self, u: Unit) -> CMatrix {
        let d = self.side();
        let off = self.offset(u.block);
        let mut m = CMatrix::zeros(d, d);
        m[(off + u.row, off + u.col)] = C1;
        m
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.side())
    }

    /// `true` when `(i, j)` of the `D x D` embedding lies inside a block.
    pub fn in_pattern(&self, i: usize, j: usize) -> bool {
        self.block_of(i) == self.block_of(j)
    }

    /// Block containing embedding row `i`.
    pub fn block_of(&self, mut i: usize) -> usize {
        for (b, &n) in self.blocks.iter().enumerate() {
            if i < n {
                return b;
            }
            i -= n;
        }
        panic!("row index outside algebra")
    }

    /// Checks that `x` is `D x D` and vanishes off the block pattern.
    pub fn check_element(&self, x: &CMatrix) -> Result<()> {
        let d = self.side();
        if x.shape() != (d, d) {
            return Err(Error::domain(format!(
                "element has shape {:?}, algebra side is {d}",
                x.shape()
            )));
        }
        self.check_pattern(x, 1)
    }

    /// Checks the block pattern in every `D x D` slot of an `nD x nD` matrix.
    pub fn check_pattern(&self, x: &CMatrix, n: usize) -> Result<()> {
        let d = self.side();
        if x.shape() != (n * d, n * d) {
            return Err(Error::domain(format!(
                "level-{n} matrix has shape {:?}, expected {}x{}",
                x.shape(),
                n * d,
                n * d
            )));
        }
        let owner: Vec<usize> = (0..d).map(|i| self.block_of(i)).collect();
        for i in 0..n * d {
            for j in 0..n * d {
                if owner[i % d] != owner[j % d] && x[(i, j)] != C0 {
                    return Err(Error::domain(format!(
                        "entry ({i}, {j}) lies outside the block pattern"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Zeroes every entry off the block pattern in each slot.
    pub fn project_pattern(&self, x: &CMatrix) -> CMatrix {
        let d = self.side();
        let owner: Vec<usize> = (0..d).map(|i| self.block_of(i)).collect();
        CMatrix::from_fn(x.rows(), x.cols(), |i, j| {
            if owner[i % d] == owner[j % d] {
                x[(i, j)]
            } else {
                C0
            }
        })
    }

    /// Coefficients of `x` in the canonical basis (`x_{st}` of each block).
    pub fn coefficients(&self, x: &CMatrix) -> Vec<Complex64> {
        self.units()
            .map(|u| {
                let off = self.offset(u.block);
                x[(off + u.row, off + u.col)]
            })
            .collect()
    }

    pub fn from_coefficients(&self, c: &[Complex64]) -> Result<CMatrix> {
        if c.len() != self.dim() {
            return Err(Error::domain(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                c.len()
            )));
        }
        let d = self.side();
        let mut m = CMatrix::zeros(d, d);
        for (u, &v) in self.units().zip(c) {
            let off = self.offset(u.block);
            m[(off + u.row, off + u.col)] = v;
        }
        Ok(m)
    }

    /// Block `b` of an element.
    pub fn block(&self, x: &CMatrix, b: usize) -> CMatrix {
        let off = self.offset(b);
        let n = self.blocks[b];
        x.submatrix(off, off, n, n)
    }

    pub fn from_blocks(&self, blocks: &[CMatrix]) -> Result<CMatrix> {
        if blocks.len() != self.blocks.len()
            || blocks.iter().zip(&self.blocks).any(|(m, &n)| m.shape() != (n, n))
        {
            return Err(Error::domain("block shapes do not match the algebra"));
        }
        Ok(CMatrix::direct_sum(blocks))
    }

    /// `M_n(A)` as an algebra: blocks `[n n_1, .., n n_k]`.
    pub fn amplified(&self, n: usize) -> Algebra {
        Algebra::new(self.blocks.iter().map(|b| b * n).collect()).expect("n >= 1")
    }

    /// Rewrites a level-`n` matrix (slot layout, row `i D + r`) in the
    /// layout of [`Algebra::amplified`] (block `b`, row `i n_b + s`).
    pub fn level_to_amplified(&self, n: usize, x: &CMatrix) -> CMatrix {
        let perm = self.level_permutation(n);
        CMatrix::from_fn(x.rows(), x.cols(), |i, j| x[(perm[i], perm[j])])
    }

    /// Inverse of [`Algebra::level_to_amplified`].
    pub fn amplified_to_level(&self, n: usize, x: &CMatrix) -> CMatrix {
        let perm = self.level_permutation(n);
        let mut out = CMatrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                out[(perm[i], perm[j])] = x[(i, j)];
            }
        }
        out
    }

    // perm[amplified index] = level index
    fn level_permutation(&self, n: usize) -> Vec<usize> {
        let d = self.side();
        let mut perm = Vec::with_capacity(n * d);
        for (b, &nb) in self.blocks.iter().enumerate() {
            let off = self.offset(b);
            for i in 0..n {
                for s in 0..nb {
                    perm.push(i * d + off + s);
                }
            }
        }
        perm
    }
}

/// An algebra (`dual = false`) or its trace dual.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub algebra: Algebra,
    pub dual: bool,
}

impl Space {
    pub fn primal(algebra: Algebra) -> Self {
        Self {
            algebra,
            dual: false,
        }
    }

    pub fn dual(algebra: Algebra) -> Self {
        Self {
            algebra,
            dual: true,
        }
    }

    /// The space this one pairs with.
    pub fn opposite(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            dual: !self.dual,
        }
    }
}

/// An element of `M_n(V)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LevelRepr")]
pub struct LevelElement {
    space: Space,
    level: usize,
    matrix: CMatrix,
}

#[derive(Deserialize)]
struct LevelRepr {
    space: Space,
    level: usize,
    matrix: CMatrix,
}

impl TryFrom<LevelRepr> for LevelElement {
    type Error = Error;
    fn try_from(r: LevelRepr) -> Result<Self> {
        LevelElement::new(r.space, r.level, r.matrix)
    }
}

impl LevelElement {
    pub fn new(space: Space, level: usize, matrix: CMatrix) -> Result<Self> {
        if level == 0 {
            return Err(Error::domain("level must be at least 1"));
        }
        space.algebra.check_pattern(&matrix, level)?;
        Ok(Self {
            space,
            level,
            matrix,
        })
    }

    pub fn zero(space: Space, level: usize) -> Self {
        let d = space.algebra.side();
        Self::new(space, level, CMatrix::zeros(level * d, level * d)).expect("zero is well formed")
    }

    /// The order unit: `1` on the primal side, `I_n ⊗ (tr / D)` on the dual
    /// side (the normalized trace, which has norm one).
    pub fn unit(space: Space, level: usize) -> Self {
        let d = space.algebra.side();
        let s = if space.dual { 1.0 / d as f64 } else { 1.0 };
        let m = CMatrix::identity(level * d).scale_real(s);
        Self::new(space, level, m).expect("identity is well formed")
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Slot `(i, j)`, an element of the base space.
    pub fn slot(&self, i: usize, j: usize) -> CMatrix {
        let d = self.space.algebra.side();
        self.matrix.submatrix(i * d, j * d, d, d)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            level: self.level,
            matrix: self.matrix.adjoint(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.level != other.level {
            return Err(Error::domain("elements live in different spaces or levels"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space.clone(),
            level: self.level,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space.clone(),
            level: self.level,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            level: self.level,
            matrix: self.matrix.scale(s),
        }
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.matrix.is_hermitian(tol)
    }

    /// The map `a ↦ [tr(F_ij a)]` from the base algebra into `M_n`. Only
    /// defined on the dual side.
    pub fn associated_map(&self) -> Result<LinMap> {
        if !self.space.dual {
            return Err(Error::domain("associated map is defined for dual elements only"));
        }
        let alg = &self.space.algebra;
        let n = self.level;
        let d = alg.side();
        let choi = alg
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, &nb)| {
                let off = alg.offset(b);
                // C[(s,i),(t,j)] = (F_ij)_{ts}
                let c = CMatrix::from_fn(nb * n, nb * n, |r, col| {
                    let (s, i) = (r / n, r % n);
                    let (t, j) = (col / n, col % n);
                    self.matrix[(i * d + off + t, j * d + off + s)]
                });
                vec![c]
            })
            .collect();
        LinMap::from_choi(alg.clone(), Algebra::full(n), choi)
    }

    /// Inverse of [`LevelElement::associated_map`].
    pub fn from_associated_map(map: &LinMap) -> Result<Self> {
        let alg = map.source().clone();
        if map.target().num_blocks() != 1 {
            return Err(Error::domain("associated maps take values in a full matrix algebra"));
        }
        let n = map.target().side();
        let d = alg.side();
        let mut m = CMatrix::zeros(n * d, n * d);
        for (b, &nb) in alg.blocks().iter().enumerate() {
            let off = alg.offset(b);
            let c = map.choi_block(b, 0);
            for s in 0..nb {
                for i in 0..n {
                    for t in 0..nb {
                        for j in 0..n {
                            m[(i * d + off + t, j * d + off + s)] = c[(s * n + i, t * n + j)];
                        }
                    }
                }
            }
        }
        Self::new(Space::dual(alg), n, m)
    }

    /// Operator norm on the primal side; cb norm of the associated map on the
    /// dual side.
    pub fn level_norm(&self) -> Result<f64> {
        if self.space.dual {
            Ok(crate::norms::cb_norm(&self.associated_map()?, 1)?.value)
        } else {
            op_norm(&self.matrix)
        }
    }

    /// Membership in `M_n(V)^+`.
    pub fn level_positive(&self, tol: f64) -> Result<bool> {
        let scale = 1.0 + self.matrix.max_abs();
        if !self.is_self_adjoint(tol.max(crate::linalg::STRUCT_TOL) * scale) {
            return Err(Error::domain("positivity is only defined for self-adjoint elements"));
        }
        if self.space.dual {
            self.associated_map()?.is_cp(tol)
        } else {
            let h = HermitianMatrix::from_square(&self.matrix);
            Ok(psd_check(&h, tol)?.is_psd)
        }
    }

    /// `α^* x α` for `α ∈ M_{m,n}`, `m` the level of `x`.
    pub fn compress(&self, alpha: &CMatrix) -> Result<Self> {
        if alpha.rows() != self.level || alpha.cols() == 0 {
            return Err(Error::domain(format!(
                "compression matrix must be {}xk, got {:?}",
                self.level,
                alpha.shape()
            )));
        }
        let d = self.space.algebra.side();
        let a = crate::linalg::kron(alpha, &CMatrix::identity(d));
        let m = a.adjoint_matmul(&self.matrix).matmul(&a);
        let m = self.space.algebra.project_pattern(&m);
        Self::new(self.space.clone(), alpha.cols(), m)
    }

    /// `[[a, x], [y, d]]` at level `2n`.
    pub fn block2(a: &Self, x: &Self, y: &Self, d: &Self) -> Result<Self> {
        a.check_same(x)?;
        a.check_same(y)?;
        a.check_same(d)?;
        let m = CMatrix::block2(&a.matrix, &x.matrix, &y.matrix, &d.matrix);
        Self::new(a.space.clone(), 2 * a.level, m)
    }

    /// Positive `a`, `d` of norm below one with `[[a, x], [x^*, d]] ≥ 0`, for
    /// `‖x‖ < 1`.
    pub fn regularity_witness(&self) -> Result<(Self, Self)> {
        if self.space.dual {
            return self.dual_regularity_witness();
        }
        let norm = op_norm(&self.matrix)?;
        if norm >= 1.0 {
            return Err(Error::domain(format!(
                "regularity witness needs norm below 1, got {norm}"
            )));
        }
        let eps = 0.5 * (1.0 - norm);
        let alg = &self.space.algebra;
        let sqrt = |m: &CMatrix| hermitian_function(m, |l| l.max(0.0).sqrt());
        let left = sqrt(&self.matrix.matmul_adjoint(&self.matrix))?;
        let right = sqrt(&self.matrix.adjoint_matmul(&self.matrix))?;
        let shift = CMatrix::identity(self.matrix.rows()).scale_real(eps);
        let a = alg.project_pattern(&(&left + &shift).hermitian_part());
        let d = alg.project_pattern(&(&right + &shift).hermitian_part());
        Ok((
            Self::new(self.space.clone(), self.level, a)?,
            Self::new(self.space.clone(), self.level, d)?,
        ))
    }

    fn dual_regularity_witness(&self) -> Result<(Self, Self)> {
        let map = self.associated_map()?;
        let dec = crate::norms::dec_norm(&map, 1)?;
        if dec.value >= 1.0 {
            return Err(Error::domain(format!(
                "regularity witness needs norm below 1, got {}",
                dec.value
            )));
        }
        let w = dec.witness.as_ref().expect("nonzero map has a witness");
        let eps = 0.5 * (1.0 - w.value);
        let unit = Self::unit(self.space.clone(), self.level).scale(Complex64::new(eps, 0.0));
        let a = Self::from_associated_map(&w.s1)?.add(&unit)?;
        let d = Self::from_associated_map(&w.s2)?.add(&unit)?;
        Ok((a, d))
    }
}
