//! Hermitian eigensolver.
//!
//! A d×d Hermitian matrix is embedded as a 2d×2d real symmetric matrix and
//! diagonalized by cyclic Jacobi. Every eigenvalue of the original appears
//! twice in the embedding. Complex eigenvectors are recovered cluster by
//! cluster with a pivoted Gram-Schmidt pass, which picks exactly one complex
//! direction out of each real pair even inside degenerate eigenspaces.

use num_complex::Complex64;

use super::{CMatrix, HermitianMatrix, RealMatrix, C0};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching unit eigenvectors as
/// the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `U diag(λ) U^*`.
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }

    /// `U diag(f(λ)) U^*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.values.len();
        let u = &self.vectors;
        let mut scaled = u.clone();
        for j in 0..d {
            let s = f(self.values[j]);
            for i in 0..d {
                scaled[(i, j)] *= s;
            }
        }
        scaled.matmul_adjoint(u)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Cyclic Jacobi for a real symmetric matrix. Returns ascending eigenvalues
/// and eigenvectors as columns.
pub fn eig_real_symmetric(a: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    let (vals, vecs) = jacobi(a, true)?;
    Ok((vals, vecs.expect("vectors requested")))
}

/// Eigenvalues of a Hermitian matrix, ascending, without eigenvectors.
pub fn eigvals_hermitian(m: &HermitianMatrix) -> Result<Vec<f64>> {
    if m.dim() == 0 {
        return Ok(Vec::new());
    }
    let (vals, _) = jacobi(&m.as_matrix().real_embedding(), false)?;
    // every eigenvalue appears twice in the embedding
    Ok(vals.into_iter().step_by(2).collect())
}

fn jacobi(a: &RealMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<RealMatrix>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::domain("eigensolver needs a square matrix"));
    }
    let mut m = a.clone();
    // symmetrize from the upper triangle
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = if want_vectors {
        RealMatrix::identity(n)
    } else {
        RealMatrix::zeros(0, 0)
    };
    let total: f64 = m.data().iter().map(|x| x * x).sum();
    if total == 0.0 || n <= 1 {
        return Ok(sorted(n, &m, v));
    }
    let target = total * (f64::EPSILON * f64::EPSILON);
    let mut off = off_diag_sq(&m);
    let mut sweep = 0;
    while off > target {
        if sweep == MAX_SWEEPS {
            return Err(Error::SolverFailure {
                iteration: sweep,
                residual: off.sqrt(),
                message: "Jacobi eigensolver did not converge".into(),
            });
        }
        sweep += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (m[(p, p)], m[(q, q)]);
                // Drop entries that no longer affect the diagonal in floating point.
                let g = 100.0 * apq.abs();
                if sweep > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s, t, apq);
            }
        }
        off = off_diag_sq(&m);
    }
    Ok(sorted(n, &m, v))
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    m: &mut RealMatrix,
    v: &mut RealMatrix,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    t: f64,
    apq: f64,
) {
    let n = m.rows();
    let tau = s / (1.0 + c);
    m[(p, p)] -= t * apq;
    m[(q, q)] += t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let np = akp - s * (akq + tau * akp);
        let nq = akq + s * (akp - tau * akq);
        m[(k, p)] = np;
        m[(p, k)] = np;
        m[(k, q)] = nq;
        m[(q, k)] = nq;
    }
    if v.rows() == 0 {
        return;
    }
    let data = v.data_mut();
    for k in 0..n {
        let vp = data[k * n + p];
        let vq = data[k * n + q];
        data[k * n + p] = vp - s * (vq + tau * vp);
        data[k * n + q] = vq + s * (vp - tau * vq);
    }
}

fn off_diag_sq(m: &RealMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s
}

fn sorted(n: usize, m: &RealMatrix, v: RealMatrix) -> (Vec<f64>, Option<RealMatrix>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| m[(a, a)].total_cmp(&m[(b, b)]));
    let values = idx.iter().map(|&i| m[(i, i)]).collect();
    if v.rows() == 0 {
        return (values, None);
    }
    let mut out = RealMatrix::zeros(n, n);
    for (new, &old) in idx.iter().enumerate() {
        for k in 0..n {
            out[(k, new)] = v[(k, old)];
        }
    }
    (values, Some(out))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Postcondition: `M = U diag(λ) U^*` with `U` unitary to roughly machine
/// precision and `λ` ascending.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    let h = m.as_matrix();
    let d = h.rows();
    if d == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let (rvals, rvecs) = eig_real_symmetric(&h.real_embedding())?;
    recover_from_embedding(h, &rvals, &rvecs)
}

/// Turns an eigensystem of the real embedding of `h` (ascending values,
/// vectors as columns) into a complex eigensystem of `h`.
pub(crate) fn recover_from_embedding(
    h: &CMatrix,
    rvals: &[f64],
    rvecs: &RealMatrix,
) -> Result<EigenDecomposition> {
    let d = h.rows();
    let scale = rvals.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cluster_tol = 1e-10 * scale.max(f64::MIN_POSITIVE);

    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    let mut start = 0;
    while start < 2 * d {
        let mut end = start + 1;
        while end < 2 * d && rvals[end] - rvals[end - 1] <= cluster_tol {
            end += 1;
        }
        pick_cluster(rvecs, start, end, d, &mut accepted);
        start = end;
    }
    if accepted.len() != d {
        return Err(Error::SolverFailure {
            iteration: 0,
            residual: (accepted.len() as f64 - d as f64).abs(),
            message: format!(
                "eigenvector recovery found {} directions for dimension {d}",
                accepted.len()
            ),
        });
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = accepted
        .into_iter()
        .map(|q| {
            let hq = h.mul_vec(&q);
            let rq: f64 = q.iter().zip(&hq).map(|(a, b)| (a.conj() * b).re).sum();
            (rq, q)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = CMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (j, (val, q)) in pairs.into_iter().enumerate() {
        values.push(val);
        for i in 0..d {
            vectors[(i, j)] = q[i];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn pick_cluster(
    rvecs: &RealMatrix,
    start: usize,
    end: usize,
    d: usize,
    accepted: &mut Vec<Vec<Complex64>>,
) {
    let mut cands: Vec<Vec<Complex64>> = (start..end)
        .map(|col| {
            let mut c: Vec<Complex64> = (0..d)
                .map(|i| Complex64::new(rvecs[(2 * i, col)], rvecs[(2 * i + 1, col)]))
                .collect();
            for q in accepted.iter() {
                project_out(&mut c, q);
            }
            c
        })
        .collect();
    loop {
        let best = cands
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm_sq(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((bi, bn)) = best else { break };
        // Real unit vectors map to unit complex vectors; after removing the
        // accepted span a genuine new direction keeps a residual of order
        // 1/cluster size, numerical leftovers are near machine precision.
        if bn < 1e-6 || accepted.len() == d {
            break;
        }
        let mut q = cands.swap_remove(bi);
        for a in accepted.iter() {
            project_out(&mut q, a);
        }
        let nq = norm_sq(&q).sqrt();
        for z in q.iter_mut() {
            *z /= nq;
        }
        for c in cands.iter_mut() {
            project_out(c, &q);
        }
        accepted.push(q);
    }
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn project_out(v: &mut [Complex64], q: &[Complex64]) {
    let mut dot = C0;
    for (a, b) in q.iter().zip(v.iter()) {
        dot += a.conj() * b;
    }
    for (x, a) in v.iter_mut().zip(q) {
        *x -= dot * a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(rows: usize, data: &[(f64, f64)]) -> HermitianMatrix {
        let m = CMatrix::from_vec(
            rows,
            rows,
            data.iter().map(|&(a, b)| Complex64::new(a, b)).collect(),
        )
        .unwrap();
        HermitianMatrix::new(&m).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let e = eig_hermitian(&herm(2, &[(1., 0.), (0., 0.), (0., 0.), (2., 0.)])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert!(e.vectors[(0, 0)].norm() > 0.999_999);
        assert!(e.vectors[(1, 1)].norm() > 0.999_999);
    }

    #[test]
    fn pauli_x() {
        let e = eig_hermitian(&herm(2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_is_recovered_from_complex_entries() {
        let m = herm(2, &[(0., 0.), (0., -1.), (0., 1.), (0., 0.)]);
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().approx_eq(m.as_matrix(), 1e-13));
    }

    #[test]
    fn identity_is_fully_degenerate() {
        let m = HermitianMatrix::from_square(&CMatrix::identity(5));
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values.len(), 5);
        let uu = e.vectors.matmul_adjoint(&e.vectors);
        assert!(uu.approx_eq(&CMatrix::identity(5), 1e-12));
    }
}
