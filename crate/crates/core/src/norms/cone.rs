//! Membership in the two tensor cones.
//!
//! For `z ∈ M_n(A^* ⊗ B)` the δ-cone is the set where `Ψ_n(z)` is cp. The
//! Δ-cone asks for a factorization `Ψ_n(z) = S ∘ R` with `R: A → M_k` cp
//! and `S(x) = α (x ⊗ w) α^*`, `w ∈ M_l(B)^+`.

use serde::{Deserialize, Serialize};

use super::delta::dual_primal_shape;
use super::TensorElement;
use crate::algebra::Algebra;
use crate::choi::LinMap;
use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix, C0, C1};

pub fn cone_member_delta(z: &TensorElement, tol: f64) -> Result<bool> {
    dual_primal_shape(z)?.associated_map()?.is_cp(tol)
}

/// `Ψ_n(z) = S ∘ R` with `S(x) = α (x ⊗ w) α^*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationWitness {
    /// `R: A → M_k`, cp.
    pub r: LinMap,
    /// `w ∈ M_l(B)^+`, level layout.
    pub w: CMatrix,
    /// Scalar `n × (k l)` matrix.
    pub alpha: CMatrix,
    pub k: usize,
    pub l: usize,
}

impl FactorizationWitness {
    /// `S(x) = α (x ⊗ w) α^*` in the level layout of `M_n(B)`.
    pub fn apply_s(&self, b: &Algebra, x: &CMatrix) -> CMatrix {
        let a = kron(&self.alpha, &CMatrix::identity(b.side()));
        a.matmul(&kron(x, &self.w)).matmul_adjoint(&a)
    }

    /// `S ∘ R` as a map into `M_n(B)` (amplified layout).
    pub fn compose(&self, b: &Algebra) -> Result<LinMap> {
        let n = self.alpha.rows();
        let images: Vec<CMatrix> = self
            .r
            .basis_images()
            .iter()
            .map(|x| b.level_to_amplified(n, &self.apply_s(b, x)))
            .collect();
        LinMap::from_basis_images(self.r.source().clone(), b.amplified(n), &images)
    }

    /// Largest Choi-entry deviation of `S ∘ R` from `Ψ_n(z)`.
    pub fn error(&self, z: &TensorElement) -> Result<f64> {
        let z = dual_primal_shape(z)?;
        let psi = z.associated_map()?;
        Ok(self.compose(&z.right().algebra)?.max_abs_diff(&psi))
    }

    /// `R` cp and `w ≥ 0`, both within `tol`.
    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        let h = crate::linalg::HermitianMatrix::from_square(&self.w);
        Ok(self.r.is_cp(tol)?
            && self.w.is_hermitian(tol.max(1e-12) * (1.0 + self.w.max_abs()))
            && crate::linalg::psd_check(&h, tol)?.is_psd)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigDeltaMembership {
    pub member: bool,
    pub witness: Option<FactorizationWitness>,
    /// No factorization through `M_k` with `k ≤ k_max` was found even though
    /// `Ψ_n(z)` is cp; this does not prove non-membership.
    pub k_max_limited: bool,
}

/// `k_max` defaults to `dim A · dim B`.
pub fn cone_member_big_delta(z: &TensorElement, tol: f64) -> Result<BigDeltaMembership> {
    cone_member_big_delta_with(z, tol, None)
}

/// Tries explicit factorizations in increasing `k` and returns the smallest
/// one that reproduces `Ψ_n(z)` within `tol` (relative to its size):
/// a scalar factorization (`k = 1`) when `Ψ_n(z)` has rank one in the
/// functional sense, the inclusion `A ⊂ M_{D_A}` followed by `Ψ_n ∘ E`, and
/// `Ψ_n` itself into `M_{n D_B}` followed by the block pinching.
pub fn cone_member_big_delta_with(
    z: &TensorElement,
    tol: f64,
    k_max: Option<usize>,
) -> Result<BigDeltaMembership> {
    let z = dual_primal_shape(z)?;
    let a = z.left().algebra.clone();
    let b = z.right().algebra.clone();
    let k_max = k_max.unwrap_or(a.dim() * b.dim());
    if k_max == 0 {
        return Err(Error::domain("k_max must be at least 1"));
    }
    let psi = z.associated_map()?;
    if !psi.is_cp(tol)? {
        return Ok(BigDeltaMembership {
            member: false,
            witness: None,
            k_max_limited: false,
        });
    }
    let n = z.level();
    let accept = tol.max(1e-9) * (1.0 + psi.max_abs());
    let mut candidates = vec![(1, scalar_candidate(&psi, n)?)];
    candidates.push((a.side(), inclusion_candidate(&psi, n)?));
    candidates.push((n * b.side(), pinching_candidate(&psi, n)?));
    candidates.sort_by_key(|c| c.0);
    for (k, cand) in candidates {
        if k > k_max {
            break;
        }
        let Some(wit) = cand else { continue };
        if wit.compose(&b)?.max_abs_diff(&psi) <= accept && wit.is_positive(tol.max(1e-9))? {
            return Ok(BigDeltaMembership {
                member: true,
                witness: Some(wit),
                k_max_limited: false,
            });
        }
    }
    Ok(BigDeltaMembership {
        member: false,
        witness: None,
        k_max_limited: true,
    })
}

/// Packs a cp `S: M_k → M_n(B)` as `α (x ⊗ w) α^*` with
/// `w = [S(e_{ab})] ∈ M_{kn}(B)` and `α_{i, a l + a n + i} = 1`, `l = kn`.
fn pack_s(r: LinMap, s_images: &[CMatrix], k: usize, n: usize, b: &Algebra) -> FactorizationWitness {
    let d = b.side();
    let l = k * n;
    let mut w = CMatrix::zeros(l * d, l * d);
    for a in 0..k {
        for c in 0..k {
            // S(e_ac) in level layout, n d × n d
            w.set_submatrix(a * n * d, c * n * d, &s_images[a * k + c]);
        }
    }
    let mut alpha = CMatrix::zeros(n, k * l);
    for a in 0..k {
        for i in 0..n {
            alpha[(i, a * l + a * n + i)] = C1;
        }
    }
    FactorizationWitness { r, w, alpha, k, l }
}

/// `Ψ(a) = f(a) Ψ(1)` with `f = tr Ψ(·) / tr Ψ(1)`; `None` if `Ψ(1)` has
/// zero trace.
fn scalar_candidate(psi: &LinMap, n: usize) -> Result<Option<FactorizationWitness>> {
    let a = psi.source().clone();
    let tgt = psi.target();
    let b = Algebra::new(tgt.blocks().iter().map(|m| m / n).collect())?;
    let unit = psi.image_of_unit();
    let tr1 = unit.trace();
    if tr1.norm() <= 1e-300 {
        // cp with Ψ(1) = 0 means Ψ = 0
        let r = LinMap::zero(a, Algebra::full(1));
        let w = CMatrix::zeros(n * b.side(), n * b.side());
        let alpha = CMatrix::from_fn(n, n, |i, j| if i == j { C1 } else { C0 });
        return Ok(Some(FactorizationWitness { r, w, alpha, k: 1, l: n }));
    }
    let images: Vec<CMatrix> = psi
        .basis_images()
        .iter()
        .map(|m| CMatrix::from_fn(1, 1, |_, _| m.trace() / tr1))
        .collect();
    let r = LinMap::from_basis_images(a, Algebra::full(1), &images)?;
    let w = b.amplified_to_level(n, &unit);
    let alpha = CMatrix::from_fn(n, n, |i, j| if i == j { C1 } else { C0 });
    Ok(Some(FactorizationWitness { r, w, alpha, k: 1, l: n }))
}

/// `R` the inclusion `A ⊂ M_{D_A}`, `S = Ψ ∘ E` with `E` the block pinching.
fn inclusion_candidate(psi: &LinMap, n: usize) -> Result<Option<FactorizationWitness>> {
    let a = psi.source().clone();
    let tgt = psi.target();
    let b = Algebra::new(tgt.blocks().iter().map(|m| m / n).collect())?;
    let k = a.side();
    let full = Algebra::full(k);
    let r = LinMap::from_fn(a.clone(), full, Clone::clone)?;
    let mut s_images = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut e = CMatrix::zeros(k, k);
            e[(i, j)] = C1;
            let img = psi.apply(&a.project_pattern(&e))?;
            s_images.push(b.amplified_to_level(n, &img));
        }
    }
    Ok(Some(pack_s(r, &s_images, k, n, &b)))
}

/// `R = Ψ` viewed in `M_{n D_B}`, `S` the pinching onto `M_n(B)`.
fn pinching_candidate(psi: &LinMap, n: usize) -> Result<Option<FactorizationWitness>> {
    let a = psi.source().clone();
    let tgt = psi.target();
    let b = Algebra::new(tgt.blocks().iter().map(|m| m / n).collect())?;
    let k = n * b.side();
    let full = Algebra::full(k);
    let images: Vec<CMatrix> = psi
        .basis_images()
        .iter()
        .map(|m| b.amplified_to_level(n, m))
        .collect();
    let r = LinMap::from_basis_images(a, full, &images)?;
    let mut s_images = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut e = CMatrix::zeros(k, k);
            e[(i, j)] = C1;
            s_images.push(b.project_pattern(&e));
        }
    }
    Ok(Some(pack_s(r, &s_images, k, n, &b)))
}
