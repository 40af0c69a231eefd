//! Fast Hermitian kernels backed by nalgebra. The interior-point solver calls
//! these every iteration; the Jacobi solver stays the reference.
//!
//! Eigenproblems go through the real symmetric embedding here as well:
//! nalgebra's complex Hermitian path loses eigenvector accuracy on matrices
//! with a wide spectrum, while its real tridiagonal QR stays at machine
//! precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::{eig_hermitian, recover_from_embedding};
use super::{CMatrix, EigenDecomposition, HermitianMatrix, RealMatrix};
use crate::error::{Error, Result};

fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn from_na(m: &DMatrix<Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn hermitian_na(m: &CMatrix) -> DMatrix<Complex64> {
    let h = m.hermitian_part();
    to_na(&h)
}

fn embedded_eigen(m: &CMatrix, vectors: bool) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let n = 2 * m.rows();
    let emb = m.hermitian_part().real_embedding();
    let na = DMatrix::from_row_slice(n, n, emb.data());
    let fail = || Error::solver(0, f64::NAN, "tridiagonal QR eigensolver did not converge");
    if vectors {
        let eig = na.try_symmetric_eigen(f64::EPSILON, 10_000).ok_or_else(fail)?;
        Ok((eig.eigenvalues.iter().copied().collect(), Some(eig.eigenvectors)))
    } else {
        Ok((na.symmetric_eigenvalues().iter().copied().collect(), None))
    }
}

/// Eigendecomposition of the Hermitian part of `m`, ascending.
pub fn eigh(m: &CMatrix) -> Result<EigenDecomposition> {
    let d = m.rows();
    if d == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let (vals, vecs) = embedded_eigen(m, true)?;
    let vecs = vecs.expect("vectors requested");
    let n = 2 * d;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let rvals: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let mut rvecs = RealMatrix::zeros(n, n);
    for (j, &src) in idx.iter().enumerate() {
        for i in 0..n {
            rvecs[(i, j)] = vecs[(i, src)];
        }
    }
    let h = m.hermitian_part();
    let fast = recover_from_embedding(&h, &rvals, &rvecs)?;
    // nalgebra's QR occasionally returns eigenvectors mixed across distinct
    // eigenvalues when the off-diagonal part is tiny; Jacobi handles those.
    if decomposition_residual(&h, &fast) <= 1e-12 * (1.0 + h.max_abs()) {
        Ok(fast)
    } else {
        eig_hermitian(&HermitianMatrix::new(&h)?)
    }
}

/// `max(‖H V − V Λ‖, ‖V^* V − I‖)`, entrywise.
fn decomposition_residual(h: &CMatrix, e: &EigenDecomposition) -> f64 {
    let v = &e.vectors;
    let hv = h.matmul(v);
    let vl = v.matmul(&CMatrix::from_real_diag(&e.values));
    let orth = (&v.adjoint_matmul(v) - &CMatrix::identity(v.cols())).max_abs();
    (&hv - &vl).max_abs().max(orth)
}

/// Eigenvalues only of the Hermitian part of `m`, ascending.
pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let (mut vals, _) = embedded_eigen(m, false)?;
    vals.sort_by(f64::total_cmp);
    // each eigenvalue appears twice in the embedding
    Ok(vals.into_iter().step_by(2).collect())
}

/// Lower Cholesky factor `L` with `m = L L^*`, or `None` if `m` is not
/// numerically positive definite.
pub fn cholesky_lower(m: &CMatrix) -> Option<CMatrix> {
    let c = hermitian_na(m).cholesky()?;
    let l = from_na(&c.l());
    // the complex square root never fails: a pivot with negative real part
    // comes back with |im| > re instead of an error
    let pivots_ok = (0..l.rows()).all(|i| {
        let p = l[(i, i)];
        p.re > 0.0 && p.re.is_finite() && p.im.abs() < p.re
    });
    pivots_ok.then_some(l)
}

/// Inverse of a lower triangular matrix.
pub fn invert_lower(l: &CMatrix) -> Option<CMatrix> {
    let inv = to_na(l).try_inverse()?;
    Some(from_na(&inv))
}

/// Thin SVD `m = U diag(s) V^*` with `s` descending.
pub fn svd(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok((CMatrix::zeros(r, 0), Vec::new(), CMatrix::zeros(c, 0)));
    }
    let fail = || Error::solver(0, f64::NAN, "SVD did not converge");
    let s = to_na(m).try_svd(true, true, f64::EPSILON, 10_000).ok_or_else(fail)?;
    let u = s.u.ok_or_else(fail)?;
    let vt = s.v_t.ok_or_else(fail)?;
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    let uo = CMatrix::from_fn(r, k, |i, j| u[(i, idx[j])]);
    let vo = CMatrix::from_fn(c, k, |i, j| vt[(idx[j], i)].conj());
    let so = idx.iter().map(|&i| s.singular_values[i]).collect();
    Ok((uo, so, vo))
}
