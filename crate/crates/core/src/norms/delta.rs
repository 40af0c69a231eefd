//! δ-norm on `A^* ⊗ B`: the dec norm of the associated map, with the
//! supremum over c.c.p. pairs kept as a sampled lower bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{cb_norm_with, dec_norm_with, CbNorm, DecNorm, NormOptions, TensorElement};
use crate::algebra::{Algebra, Space};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix, C0};
use crate::random::{ccp_map, positive_level_element, stream_rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaNorm {
    pub value: f64,
    /// Best `‖(φ ⊗ ψ)_n(z)‖` over the sampled c.c.p. pairs.
    pub sampled_lower: f64,
    pub dec: DecNorm,
}

/// `z` rewritten in the `A^* ⊗ B` shape.
pub(crate) fn dual_primal_shape(z: &TensorElement) -> Result<TensorElement> {
    match (z.left().dual, z.right().dual) {
        (true, false) => Ok(z.clone()),
        (false, true) => Ok(z.flip()),
        _ => Err(Error::domain(
            "this route needs exactly one dual leg (A* ⊗ B or A ⊗ B*)",
        )),
    }
}

pub fn delta_norm(z: &TensorElement) -> Result<DeltaNorm> {
    delta_norm_with(z, &NormOptions::default())
}

pub fn delta_norm_with(z: &TensorElement, opts: &NormOptions) -> Result<DeltaNorm> {
    let z = dual_primal_shape(z)?;
    let dec = dec_norm_with(&z.associated_map()?, 1, opts)?;
    let sampled_lower = delta_sampled_lower(&z, opts.samples, opts.seed)?;
    Ok(DeltaNorm {
        value: dec.value,
        sampled_lower,
        dec,
    })
}

/// `‖z‖_∨ = ‖Ψ_n(z)‖_cb`.
pub fn inj_norm(z: &TensorElement) -> Result<CbNorm> {
    inj_norm_with(z, &NormOptions::default())
}

pub fn inj_norm_with(z: &TensorElement, opts: &NormOptions) -> Result<CbNorm> {
    let z = dual_primal_shape(z)?;
    cb_norm_with(&z.associated_map()?, 1, opts)
}

/// `max ‖(φ ⊗ ψ)_n(z)‖` over `samples` seeded pairs of c.c.p. maps
/// `φ: A^* → M_k`, `ψ: B → M_l`.
///
/// `φ` is given by a positive contraction `a ∈ M_k(A)` through
/// `φ(f) = [f(a_{rs})]`; `ψ` has a random Choi matrix `W W^*` scaled to
/// `‖ψ(1)‖ = 1`.
pub fn delta_sampled_lower(z: &TensorElement, samples: usize, seed: u64) -> Result<f64> {
    let z = dual_primal_shape(z)?;
    if z.is_zero() {
        return Ok(0.0);
    }
    let a_alg = z.left().algebra.clone();
    let b_alg = z.right().algebra.clone();
    let mut best = 0.0f64;
    for trial in 0..samples {
        let mut rng = stream_rng(seed, 0xde17a + trial as u64);
        let k = rng.gen_range(1..=a_alg.side().min(4));
        let l = rng.gen_range(1..=b_alg.side().min(4));
        let a = positive_level_element(&mut rng, &Space::primal(a_alg.clone()), k);
        let norm = op_norm(a.matrix())?;
        let a = a.matrix().scale_real(1.0 / norm);
        let psi = ccp_map(&mut rng, &b_alg, &Algebra::full(l));
        best = best.max(op_norm(&apply_pair(&z, &a, k, &psi.basis_images(), l))?);
    }
    Ok(best)
}

/// `(φ ⊗ ψ)_n(z) ∈ M_n(M_k ⊗ M_l)`, row index `(i k + r) l + u`, for `z` in
/// `A^* ⊗ B`, `φ(f) = [f(a_{rr'})]` given by `a ∈ M_k(A)` (level layout) and
/// `ψ` given by its basis images in `M_l`.
pub fn apply_pair(z: &TensorElement, a: &CMatrix, k: usize, psi: &[CMatrix], l: usize) -> CMatrix {
    let alg = &z.left().algebra;
    let d = alg.side();
    let n = z.level();
    // φ(f_p)[r, r'] = (a_{r r'})_{ts} for p = (b, s, t)
    let phi: Vec<CMatrix> = alg
        .units()
        .map(|u| {
            let off = alg.offset(u.block);
            CMatrix::from_fn(k, k, |r, rp| a[(r * d + off + u.col, rp * d + off + u.row)])
        })
        .collect();
    let w = k * l;
    let mut out = CMatrix::zeros(n * w, n * w);
    for i in 0..n {
        for j in 0..n {
            for (p, fp) in phi.iter().enumerate() {
                for (q, pq) in psi.iter().enumerate() {
                    let c = z.coeff(i, j, p, q);
                    if c == C0 {
                        continue;
                    }
                    for r in 0..k {
                        for rp in 0..k {
                            let x = c * fp[(r, rp)];
                            if x == C0 {
                                continue;
                            }
                            for u in 0..l {
                                for up in 0..l {
                                    out[(i * w + r * l + u, j * w + rp * l + up)] += x * pq[(u, up)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
