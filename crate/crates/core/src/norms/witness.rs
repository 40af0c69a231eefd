//! Positive completions `[[u1, z], [z^*, u2]]` of an arbitrary tensor.
//!
//! With `x_p` the canonical basis of each leg and `a_p, d_p` basis elements
//! such that `[[a_p, x_p], [x_p^*, d_p]] ≥ 0`, write
//! `z = α (1_n ⊗ v ⊗ w) β^*` for `v = diag(x_p)`, `w = diag(y_q)`,
//! `α_{i,(r,p,q)} = λ δ_{ir}` and `β_{j,(r,p,q)} = conj(z[r][j][p][q]) / λ`.
//! Then `u1 = α (1 ⊗ v1 ⊗ w1) α^*` and `u2 = β (1 ⊗ v2 ⊗ w2) β^*` complete
//! `z`, and `λ² = ‖B‖ / sqrt(PQ)` balances the two bounds to
//! `sqrt(PQ) ‖B‖`, `B_{j,(r,p,q)} = z[r][j][p][q]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::big_delta::expansion_matrix;
use super::TensorElement;
use crate::algebra::{LevelElement, Space};
use crate::error::Result;
use crate::linalg::{op_norm, CMatrix, C0};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonemptyWitness {
    pub u1: TensorElement,
    pub u2: TensorElement,
    /// Upper bound on `max(|u1|_Δ, |u2|_Δ)` from the factorization.
    pub bound: f64,
    pub lambda: f64,
}

/// Index of `(a_p, d_p)` for each basis element `x_p` of a leg.
fn corner_units(space: &Space) -> Vec<(usize, usize)> {
    let alg = &space.algebra;
    alg.units()
        .map(|u| {
            let ss = alg.unit_index(u.block, u.row, u.row);
            let tt = alg.unit_index(u.block, u.col, u.col);
            if space.dual {
                (tt, ss)
            } else {
                (ss, tt)
            }
        })
        .collect()
}

/// `[[a_p, x_p], [x_p^*, d_p]]` as a level-2 element of the leg.
pub fn basis_block(space: &Space, p: usize) -> Result<LevelElement> {
    let alg = &space.algebra;
    let (a, d) = corner_units(space)[p];
    let unit = |k: usize| {
        let mut c = vec![C0; alg.dim()];
        c[k] = Complex64::new(1.0, 0.0);
        alg.from_coefficients(&c)
    };
    let x = unit(p)?;
    let m = CMatrix::block2(&unit(a)?, &x, &x.adjoint(), &unit(d)?);
    LevelElement::new(space.clone(), 2, m)
}

pub fn nonempty_witness(z: &TensorElement) -> Result<NonemptyWitness> {
    let n = z.level();
    let (pd, qd) = (z.left().algebra.dim(), z.right().algebra.dim());
    let (l, r) = (z.left().clone(), z.right().clone());
    let b = expansion_matrix(z);
    let bnorm = op_norm(&b)?;
    if bnorm == 0.0 {
        return Ok(NonemptyWitness {
            u1: TensorElement::zero(l.clone(), r.clone(), n),
            u2: TensorElement::zero(l, r, n),
            bound: 0.0,
            lambda: 0.0,
        });
    }
    let scale = ((pd * qd) as f64).sqrt();
    let lam2 = bnorm / scale;
    let lambda = lam2.sqrt();
    let cl = corner_units(&l);
    let cr = corner_units(&r);

    let mut sa = vec![C0; pd];
    for &(a, _) in &cl {
        sa[a] += 1.0;
    }
    let mut sb = vec![C0; qd];
    for &(a, _) in &cr {
        sb[a] += 1.0;
    }
    let u1 = TensorElement::from_fn(l.clone(), r.clone(), n, |i, j, p, q| {
        if i == j {
            sa[p] * sb[q] * lam2
        } else {
            C0
        }
    })?;

    let mut u2 = TensorElement::zero(l, r, n);
    for (p, &(_, dp)) in cl.iter().enumerate() {
        for (q, &(_, dq)) in cr.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    // Σ_r β_{i,(r,p,q)} conj(β_{j,(r,p,q)})
                    let mut acc = C0;
                    for rr in 0..n {
                        acc += z.coeff(rr, i, p, q).conj() * z.coeff(rr, j, p, q);
                    }
                    if acc != C0 {
                        let cur = u2.coeff(i, j, dp, dq);
                        u2.set(i, j, dp, dq, cur + acc / lam2);
                    }
                }
            }
        }
    }
    Ok(NonemptyWitness {
        u1,
        u2,
        bound: scale * bnorm,
        lambda,
    })
}

impl NonemptyWitness {
    /// `[[u1, z], [z^*, u2]]`.
    pub fn block(&self, z: &TensorElement) -> Result<TensorElement> {
        TensorElement::block2(&self.u1, z, &z.adjoint(), &self.u2)
    }

    /// Largest deviation between `z` and `α (1 ⊗ v ⊗ w) β^*`.
    pub fn reassembly_error(&self, z: &TensorElement) -> f64 {
        if self.lambda == 0.0 {
            return z.max_abs();
        }
        let n = z.level();
        let (pd, qd) = (z.left().algebra.dim(), z.right().algebra.dim());
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for p in 0..pd {
                    for q in 0..qd {
                        // only r = i survives in α
                        let beta_j = z.coeff(i, j, p, q).conj() / self.lambda;
                        let v = Complex64::new(self.lambda, 0.0) * beta_j.conj();
                        err = err.max((v - z.coeff(i, j, p, q)).norm());
                    }
                }
            }
        }
        err
    }
}

/// For `z = v ⊗ w`: corners `v1 ⊗ w1`, `v2 ⊗ w2` from the regularity
/// witnesses of the rescaled legs.
pub fn elementary_nonempty_witness(v: &LevelElement, w: &LevelElement) -> Result<(TensorElement, TensorElement)> {
    let (nv, nw) = (v.level_norm()?, w.level_norm()?);
    let z = TensorElement::elementary(v, w);
    if nv == 0.0 || nw == 0.0 {
        let zero = TensorElement::zero(z.left().clone(), z.right().clone(), z.level());
        return Ok((zero.clone(), zero));
    }
    let (cv, cw) = (0.5 / nv, 0.5 / nw);
    let (v1, v2) = v.scale(Complex64::new(cv, 0.0)).regularity_witness()?;
    let (w1, w2) = w.scale(Complex64::new(cw, 0.0)).regularity_witness()?;
    let back = Complex64::new(1.0 / (cv * cw), 0.0);
    Ok((
        TensorElement::elementary(&v1, &w1).scale(back),
        TensorElement::elementary(&v2, &w2).scale(back),
    ))
}
