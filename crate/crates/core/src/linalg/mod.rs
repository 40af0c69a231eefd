//! Dense complex linear algebra.
//!
//! Everything the rest of the crate needs from a matrix library lives here:
//! a row-major [`CMatrix`], a Hermitian eigensolver (cyclic Jacobi on the
//! real symmetric embedding), PSD tests, Kronecker products and the operator
//! and trace norms. Matrices are small (side at most a few hundred), so the
//! code favours clarity over blocking.

mod cholesky;
mod dense;
mod eigen;

pub use cholesky::{cholesky_real, solve_cholesky_real, RealMatrix};
pub use dense::{cholesky_lower, eigh, eigvalsh, invert_lower, svd};
pub use eigen::{eig_hermitian, eig_real_symmetric, eigvals_hermitian, EigenDecomposition};

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Complex zero.
pub const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Complex one.
pub const C1: Complex64 = Complex64 { re: 1.0, im: 0.0 };
/// Imaginary unit.
pub const CI: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default tolerance for structural (entrywise) equality.
pub const STRUCT_TOL: f64 = 1e-12;
/// Default tolerance for PSD membership.
pub const PSD_TOL: f64 = 1e-8;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Column vector from entries.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Complex64, other: &CMatrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = CMatrix::zeros(n, m);
        for i in 0..n {
            let out_row = &mut out.data[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == C0 {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^* other` without forming the adjoint.
    pub fn adjoint_matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, other.rows, "adjoint_matmul shape mismatch");
        let (n, k, m) = (self.cols, self.rows, other.cols);
        let mut out = CMatrix::zeros(n, m);
        for p in 0..k {
            let b_row = &other.data[p * m..(p + 1) * m];
            for i in 0..n {
                let a = self.data[p * n + i].conj();
                if a == C0 {
                    continue;
                }
                let out_row = &mut out.data[i * m..(i + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self other^*` without forming the adjoint.
    pub fn matmul_adjoint(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.cols, "matmul_adjoint shape mismatch");
        let (n, k, m) = (self.rows, self.cols, other.rows);
        let mut out = CMatrix::zeros(n, m);
        for i in 0..n {
            let a_row = &self.data[i * k..(i + 1) * k];
            for j in 0..m {
                let b_row = &other.data[j * k..(j + 1) * k];
                let mut s = C0;
                for (a, b) in a_row.iter().zip(b_row) {
                    s += a * b.conj();
                }
                out.data[i * m + j] = s;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Real inner product `Re tr(self^* other)`.
    pub fn inner_re(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.shape() == other.shape() && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `(M + M^*)/2`.
    pub fn hermitian_part(&self) -> CMatrix {
        assert!(self.is_square());
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_submatrix(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// `[[a, b], [c, d]]` from four equally shaped blocks.
    pub fn block2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
        let (r, k) = a.shape();
        let mut out = CMatrix::zeros(2 * r, 2 * k);
        out.set_submatrix(0, 0, a);
        out.set_submatrix(0, k, b);
        out.set_submatrix(r, 0, c);
        out.set_submatrix(r, k, d);
        out
    }

    /// Real symmetric embedding: each entry `a+bi` becomes `[[a,-b],[b,a]]`.
    pub fn real_embedding(&self) -> RealMatrix {
        let (n, m) = self.shape();
        let mut out = RealMatrix::zeros(2 * n, 2 * m);
        for i in 0..n {
            for j in 0..m {
                let z = self[(i, j)];
                out[(2 * i, 2 * j)] = z.re;
                out[(2 * i, 2 * j + 1)] = -z.im;
                out[(2 * i + 1, 2 * j)] = z.im;
                out[(2 * i + 1, 2 * j + 1)] = z.re;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// A Hermitian matrix. Construction symmetrizes, so `entry(i,j) == conj(entry(j,i))`
/// holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Symmetrizes `m` into its Hermitian part.
    pub fn new(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::domain(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Like [`HermitianMatrix::new`] but panics on non-square input.
    pub fn from_square(m: &CMatrix) -> Self {
        Self::new(m).expect("square matrix")
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Outcome of [`psd_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eig: f64,
}

/// Checks `min_eig >= -tol`. A 0x0 matrix is PSD with `min_eig = 0`.
pub fn psd_check(m: &HermitianMatrix, tol: f64) -> Result<PsdCheck> {
    if tol < 0.0 {
        return Err(Error::domain("psd tolerance must be non-negative"));
    }
    if m.dim() == 0 {
        return Ok(PsdCheck {
            is_psd: true,
            min_eig: 0.0,
        });
    }
    let min_eig = eigvals_hermitian(m)?[0];
    Ok(PsdCheck {
        is_psd: min_eig >= -tol,
        min_eig,
    })
}

/// Smallest eigenvalue of the Hermitian part of `m` (0 for empty input).
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(psd_check(&HermitianMatrix::new(m)?, 0.0)?.min_eig)
}

/// Standard Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let x = a[(i, j)];
            if x == C0 {
                continue;
            }
            for p in 0..rb {
                for q in 0..cb {
                    out[(i * rb + p, j * cb + q)] = x * b[(p, q)];
                }
            }
        }
    }
    out
}

fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Vec::new());
    }
    // Use the smaller Gram matrix.
    let gram = if m.rows() <= m.cols() {
        m.matmul_adjoint(m)
    } else {
        m.adjoint_matmul(m)
    };
    let vals = eigvals_hermitian(&HermitianMatrix::from_square(&gram))?;
    Ok(vals.iter().map(|&l| l.max(0.0).sqrt()).collect())
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.into_iter().fold(0.0, f64::max))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.into_iter().sum())
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let eig = eig_hermitian(&HermitianMatrix::new(m)?)?;
    Ok(eig.reconstruct_with(|l| f(l)))
}

/// `(M^* M)^{1/2}`.
pub fn abs_right(m: &CMatrix) -> Result<CMatrix> {
    hermitian_function(&m.adjoint_matmul(m), |l| l.max(0.0).sqrt())
}

/// Complex column vector helpers.
pub fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// JSON encoding of a complex scalar: `[re, im]`.
pub fn complex_to_json(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn complex_from_json(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&z| complex_to_json(z)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(complex_from_json)
            .collect();
        Ok(CMatrix {
            rows: r,
            cols: c,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&CMatrix::identity(2), &CMatrix::identity(2));
        assert_eq!(k, CMatrix::identity(4));
    }

    #[test]
    fn kron_with_projector_gives_block_diagonal() {
        let p = CMatrix::from_real_diag(&[1.0, 0.0]);
        let m = CMatrix::from_vec(2, 2, vec![c(1., 2.), c(3., 0.), c(0., -1.), c(4., 4.)]).unwrap();
        let k = kron(&p, &m);
        let expected = CMatrix::direct_sum(&[m.clone(), CMatrix::zeros(2, 2)]);
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_matrix_unit_index_arithmetic() {
        let mut e12 = CMatrix::zeros(2, 2);
        e12[(0, 1)] = C1;
        let mut e21 = CMatrix::zeros(2, 2);
        e21[(1, 0)] = C1;
        let k = kron(&e12, &e21);
        // row 0*2+1, col 1*2+0
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (1, 2) { C1 } else { C0 };
                assert_eq!(k[(i, j)], want);
            }
        }
    }

    #[test]
    fn norms_of_simple_matrices() {
        let i3 = CMatrix::identity(3);
        assert!((op_norm(&i3).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_norm(&i3).unwrap() - 3.0).abs() < 1e-12);

        let d = CMatrix::from_real_diag(&[3.0, -4.0]);
        assert!((op_norm(&d).unwrap() - 4.0).abs() < 1e-12);
        assert!((trace_norm(&d).unwrap() - 7.0).abs() < 1e-12);

        let s = 0.5f64.sqrt();
        let xi = CMatrix::column(&[c(s, 0.), c(0., s)]);
        let eta = CMatrix::column(&[c(0.6, 0.), c(0., 0.), c(0., 0.8)]);
        let r1 = xi.matmul_adjoint(&eta);
        assert!((op_norm(&r1).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_norm(&r1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_matrices_have_zero_norms() {
        let e = CMatrix::zeros(0, 0);
        assert_eq!(op_norm(&e).unwrap(), 0.0);
        assert_eq!(trace_norm(&e).unwrap(), 0.0);
        let chk = psd_check(&HermitianMatrix::from_square(&e), 0.0).unwrap();
        assert!(chk.is_psd);
    }

    #[test]
    fn psd_check_examples() {
        let id = HermitianMatrix::from_square(&CMatrix::identity(3));
        let chk = psd_check(&id, 1e-8).unwrap();
        assert!(chk.is_psd);
        assert!((chk.min_eig - 1.0).abs() < 1e-12);

        let m = HermitianMatrix::from_square(&CMatrix::from_real(2, 2, &[1., 2., 2., 1.]).unwrap());
        let chk = psd_check(&m, 1e-8).unwrap();
        assert!(!chk.is_psd);
        assert!((chk.min_eig + 1.0).abs() < 1e-12);

        let z = HermitianMatrix::from_square(&CMatrix::zeros(2, 2));
        let chk = psd_check(&z, 0.0).unwrap();
        assert!(chk.is_psd);
        assert_eq!(chk.min_eig, 0.0);
    }

    #[test]
    fn negative_tolerance_is_rejected() {
        let id = HermitianMatrix::from_square(&CMatrix::identity(1));
        assert!(psd_check(&id, -1.0).is_err());
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let m = CMatrix::from_vec(2, 2, vec![c(1., 1.), c(2., 1.), c(0., 0.), c(3., 0.)]).unwrap();
        let h = HermitianMatrix::new(&m).unwrap();
        let a = h.as_matrix();
        assert_eq!(a[(0, 1)], a[(1, 0)].conj());
        assert_eq!(a[(0, 0)].im, 0.0);
        assert!(HermitianMatrix::new(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn json_encoding_is_nested_pairs() {
        let m = CMatrix::from_vec(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<CMatrix>("[[[1,0]],[]]").is_err());
    }
}
