//! Linear maps between finite-dimensional C*-algebras, stored by Choi blocks.
//!
//! For `T: A → B` with blocks `n_b` and `m_c`, the block
//! `C^{bc} ∈ M_{n_b} ⊗ M_{m_c}` has entries
//! `C^{bc}[(s,p),(t,q)] = T(e^{(b)}_{st})_c[p,q]`, row index `s m_c + p`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Unit};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, psd_check, CMatrix, HermitianMatrix, C0, C1};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinMapRepr")]
pub struct LinMap {
    source: Algebra,
    target: Algebra,
    choi: Vec<Vec<CMatrix>>,
}

#[derive(Deserialize)]
struct LinMapRepr {
    source: Algebra,
    target: Algebra,
    choi: Vec<Vec<CMatrix>>,
}

impl TryFrom<LinMapRepr> for LinMap {
    type Error = Error;
    fn try_from(r: LinMapRepr) -> Result<Self> {
        LinMap::from_choi(r.source, r.target, r.choi)
    }
}

impl LinMap {
    /// `map_of_choi`: wraps Choi blocks after checking their shapes.
    pub fn from_choi(source: Algebra, target: Algebra, choi: Vec<Vec<CMatrix>>) -> Result<Self> {
        if choi.len() != source.num_blocks() {
            return Err(Error::domain(format!(
                "expected {} rows of Choi blocks, got {}",
                source.num_blocks(),
                choi.len()
            )));
        }
        for (b, row) in choi.iter().enumerate() {
            if row.len() != target.num_blocks() {
                return Err(Error::domain(format!(
                    "Choi row {b} has {} blocks, expected {}",
                    row.len(),
                    target.num_blocks()
                )));
            }
            for (c, m) in row.iter().enumerate() {
                let side = source.block_size(b) * target.block_size(c);
                if m.shape() != (side, side) {
                    return Err(Error::domain(format!(
                        "Choi block ({b}, {c}) has shape {:?}, expected {side}x{side}",
                        m.shape()
                    )));
                }
            }
        }
        Ok(Self {
            source,
            target,
            choi,
        })
    }

    /// `choi_of_map`: builds the map from the images of the canonical basis.
    pub fn from_basis_images(source: Algebra, target: Algebra, images: &[CMatrix]) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::domain(format!(
                "expected {} basis images, got {}",
                source.dim(),
                images.len()
            )));
        }
        for img in images {
            target.check_element(img)?;
        }
        let mut choi = Self::zero_blocks(&source, &target);
        for (k, u) in source.units().enumerate() {
            Self::write_image(&target, &mut choi[u.block], u, &images[k]);
        }
        Self::from_choi(source, target, choi)
    }

    /// Builds the map from a function evaluated on the basis.
    pub fn from_fn(
        source: Algebra,
        target: Algebra,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let images: Vec<CMatrix> = source.units().map(|u| f(&source.unit_matrix(u))).collect();
        Self::from_basis_images(source, target, &images)
    }

    fn zero_blocks(source: &Algebra, target: &Algebra) -> Vec<Vec<CMatrix>> {
        source
            .blocks()
            .iter()
            .map(|&nb| {
                target
                    .blocks()
                    .iter()
                    .map(|&mc| CMatrix::zeros(nb * mc, nb * mc))
                    .collect()
            })
            .collect()
    }

    fn write_image(target: &Algebra, row: &mut [CMatrix], u: Unit, img: &CMatrix) {
        for (c, &mc) in target.blocks().iter().enumerate() {
            let off = target.offset(c);
            for p in 0..mc {
                for q in 0..mc {
                    row[c][(u.row * mc + p, u.col * mc + q)] = img[(off + p, off + q)];
                }
            }
        }
    }

    pub fn zero(source: Algebra, target: Algebra) -> Self {
        let choi = Self::zero_blocks(&source, &target);
        Self {
            source,
            target,
            choi,
        }
    }

    pub fn identity(a: &Algebra) -> Self {
        Self::from_fn(a.clone(), a.clone(), Clone::clone).expect("identity is well formed")
    }

    /// Blockwise transpose.
    pub fn transpose(a: &Algebra) -> Self {
        Self::from_fn(a.clone(), a.clone(), CMatrix::transpose).expect("transpose is well formed")
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn choi(&self) -> &[Vec<CMatrix>] {
        &self.choi
    }

    pub fn choi_block(&self, b: usize, c: usize) -> &CMatrix {
        &self.choi[b][c]
    }

    /// `T(e^{(b)}_{st})` read off the Choi blocks.
    pub fn unit_image(&self, u: Unit) -> CMatrix {
        let d = self.target.side();
        let mut out = CMatrix::zeros(d, d);
        for (c, &mc) in self.target.blocks().iter().enumerate() {
            let off = self.target.offset(c);
            let blk = &self.choi[u.block][c];
            for p in 0..mc {
                for q in 0..mc {
                    out[(off + p, off + q)] = blk[(u.row * mc + p, u.col * mc + q)];
                }
            }
        }
        out
    }

    pub fn basis_images(&self) -> Vec<CMatrix> {
        self.source.units().map(|u| self.unit_image(u)).collect()
    }

    /// `T(a) = Σ a^{(b)}_{st} T(e^{(b)}_{st})`.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        self.source.check_element(a)?;
        let d = self.target.side();
        let mut out = CMatrix::zeros(d, d);
        for (c, &mc) in self.target.blocks().iter().enumerate() {
            let off = self.target.offset(c);
            for (b, &nb) in self.source.blocks().iter().enumerate() {
                let soff = self.source.offset(b);
                let blk = &self.choi[b][c];
                for s in 0..nb {
                    for t in 0..nb {
                        let x = a[(soff + s, soff + t)];
                        if x == C0 {
                            continue;
                        }
                        for p in 0..mc {
                            for q in 0..mc {
                                out[(off + p, off + q)] += x * blk[(s * mc + p, t * mc + q)];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `T(1)`.
    pub fn image_of_unit(&self) -> CMatrix {
        self.apply(&self.source.identity()).expect("unit is well formed")
    }

    /// `T^*(a) = T(a^*)^*`. Its Choi blocks are the adjoints of those of `T`.
    pub fn adjoint_map(&self) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            choi: self
                .choi
                .iter()
                .map(|row| row.iter().map(CMatrix::adjoint).collect())
                .collect(),
        }
    }

    /// `T_n = id_{M_n} ⊗ T : M_n(A) → M_n(B)`, both sides in the layout of
    /// [`Algebra::amplified`].
    pub fn amplify(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("amplification level must be at least 1"));
        }
        let source = self.source.amplified(n);
        let target = self.target.amplified(n);
        let mut choi = Self::zero_blocks(&source, &target);
        for (b, &nb) in self.source.blocks().iter().enumerate() {
            for (c, &mc) in self.target.blocks().iter().enumerate() {
                let blk = &self.choi[b][c];
                let out = &mut choi[b][c];
                let w = n * mc;
                for i in 0..n {
                    for j in 0..n {
                        for s in 0..nb {
                            for t in 0..nb {
                                for p in 0..mc {
                                    for q in 0..mc {
                                        let r = (i * nb + s) * w + i * mc + p;
                                        let col = (j * nb + t) * w + j * mc + q;
                                        out[(r, col)] = blk[(s * mc + p, t * mc + q)];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Self::from_choi(source, target, choi)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinMap) -> Result<Self> {
        if inner.target != self.source {
            return Err(Error::domain("composition: inner target differs from outer source"));
        }
        let images = inner
            .basis_images()
            .iter()
            .map(|x| self.apply(x))
            .collect::<Result<Vec<_>>>()?;
        Self::from_basis_images(inner.source.clone(), self.target.clone(), &images)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::domain("maps have different source or target"));
        }
        Ok(())
    }

    /// `λ self + μ other`.
    pub fn combine(&self, lambda: Complex64, other: &Self, mu: Complex64) -> Result<Self> {
        self.check_same_shape(other)?;
        let choi = self
            .choi
            .iter()
            .zip(&other.choi)
            .map(|(r1, r2)| {
                r1.iter()
                    .zip(r2)
                    .map(|(a, b)| {
                        let mut m = a.scale(lambda);
                        m.axpy(mu, b);
                        m
                    })
                    .collect()
            })
            .collect();
        Self::from_choi(self.source.clone(), self.target.clone(), choi)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(C1, other, C1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(C1, other, -C1)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            choi: self
                .choi
                .iter()
                .map(|row| row.iter().map(|m| m.scale(s)).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.choi.iter().flatten().all(|m| m.max_abs() == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.choi
            .iter()
            .flatten()
            .zip(other.choi.iter().flatten())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.choi.iter().flatten().map(CMatrix::max_abs).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all Choi blocks of the Hermitian part.
    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for m in self.choi.iter().flatten() {
            let h = HermitianMatrix::from_square(m);
            min = min.min(psd_check(&h, 0.0)?.min_eig);
        }
        Ok(min)
    }

    /// Choi criterion, blockwise. Non-Hermitian Choi blocks are not cp.
    pub fn is_cp(&self, tol: f64) -> Result<bool> {
        for m in self.choi.iter().flatten() {
            if !m.is_hermitian(tol.max(crate::linalg::STRUCT_TOL) * (1.0 + m.max_abs())) {
                return Ok(false);
            }
            let h = HermitianMatrix::from_square(m);
            if !psd_check(&h, tol)?.is_psd {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// cp with `‖T(1)‖ ≤ 1 + tol`.
    pub fn is_ccp(&self, tol: f64) -> Result<bool> {
        Ok(self.is_cp(tol)? && op_norm(&self.image_of_unit())? <= 1.0 + tol)
    }

    /// `‖T(1)‖`, the cb norm when `T` is cp.
    pub fn cp_norm(&self) -> Result<f64> {
        op_norm(&self.image_of_unit())
    }
}

/// Permutes tensor factors: output factor `k` is input factor `perm[k]`.
pub fn canonical_shuffle(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let side: usize = dims.iter().product();
    if m.shape() != (side, side) {
        return Err(Error::domain(format!(
            "matrix shape {:?} does not match factor sizes {dims:?}",
            m.shape()
        )));
    }
    let k = dims.len();
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::domain(format!("{perm:?} is not a permutation of 0..{k}")));
    }
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    // map[input index] = output index
    let map: Vec<usize> = (0..side)
        .map(|mut r| {
            let mut digits = vec![0; k];
            for f in (0..k).rev() {
                digits[f] = r % dims[f];
                r /= dims[f];
            }
            perm.iter()
                .zip(&out_dims)
                .fold(0, |acc, (&p, &od)| acc * od + digits[p])
        })
        .collect();
    let mut out = CMatrix::zeros(side, side);
    for i in 0..side {
        for j in 0..side {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// The map `a ↦ [[S1(a), T(a)], [T^*(a), S2(a)]]` into `M_2(B)`.
pub fn block2x2(s1: &LinMap, t: &LinMap, s2: &LinMap) -> Result<LinMap> {
    s1.check_same_shape(t)?;
    s1.check_same_shape(s2)?;
    let source = s1.source.clone();
    let target = s1.target.amplified(2);
    let ts = t.adjoint_map();
    let parts = [[s1, t], [&ts, s2]];
    let mut choi = LinMap::zero_blocks(&source, &target);
    for (b, &nb) in source.blocks().iter().enumerate() {
        for (c, &mc) in s1.target.blocks().iter().enumerate() {
            let w = 2 * mc;
            let out = &mut choi[b][c];
            for (k, row) in parts.iter().enumerate() {
                for (l, x) in row.iter().enumerate() {
                    let blk = &x.choi[b][c];
                    for s in 0..nb {
                        for t in 0..nb {
                            for p in 0..mc {
                                for q in 0..mc {
                                    out[(s * w + k * mc + p, t * w + l * mc + q)] =
                                        blk[(s * mc + p, t * mc + q)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    LinMap::from_choi(source, target, choi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_reproduces_basis_images() {
        let a = Algebra::new(vec![2, 1]).unwrap();
        let t = LinMap::transpose(&a);
        for u in a.units() {
            let e = a.unit_matrix(u);
            assert_eq!(t.apply(&e).unwrap(), e.transpose());
        }
    }

    #[test]
    fn shuffle_rejects_bad_permutation() {
        let m = CMatrix::identity(4);
        assert!(canonical_shuffle(&m, &[2, 2], &[0, 0]).is_err());
        assert!(canonical_shuffle(&m, &[2, 3], &[1, 0]).is_err());
    }
}
