//! Instance generators shared by the suites, the acceptance tests and the
//! CLI.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{Algebra, Space};
use crate::choi::LinMap;
use crate::linalg::{CMatrix, C1};
use crate::norms::TensorElement;
use crate::random::{algebra, cp_map, gaussian, gaussian_matrix, psd, tensor, unitary};
use crate::sdp::{Constraint, SdpProblem, Sense};

/// Random strictly feasible SDP: block sizes summing to at most `max_side`
/// over one to three blocks, at most `max_constraints` Gaussian Hermitian
/// constraints (never more than the number of real parameters), with
/// `b = A(X0)` and `C = Z0 + A^*(y0)` for positive definite `X0`, `Z0`.
pub fn feasible_sdp(rng: &mut impl Rng, max_side: usize, max_constraints: usize) -> SdpProblem {
    let total = rng.gen_range(1..=max_side.max(1));
    let nb = rng.gen_range(1..=3usize).min(total);
    let mut blocks = vec![1usize; nb];
    for _ in nb..total {
        let k = rng.gen_range(0..nb);
        blocks[k] += 1;
    }
    let params: usize = blocks.iter().map(|n| n * n).sum();
    let m = rng.gen_range(1..=max_constraints.max(1)).min(params);
    let pd = |rng: &mut _, n: usize| &psd(rng, n, n) + &CMatrix::identity(n);
    let x0: Vec<CMatrix> = blocks.iter().map(|&n| pd(rng, n)).collect();
    let z0: Vec<CMatrix> = blocks.iter().map(|&n| pd(rng, n)).collect();
    let mut p = SdpProblem::new(blocks.clone(), Sense::Minimize);
    for _ in 0..m {
        let mut c = Constraint::new(0.0);
        for (b, &n) in blocks.iter().enumerate() {
            for i in 0..n {
                for j in i..n {
                    let g = gaussian(rng);
                    let v = if i == j { Complex64::new(g.re, 0.0) } else { g };
                    c.add_re(b, i, j, v);
                }
            }
        }
        c.rhs = c.evaluate(&x0);
        p.add_constraint(c);
    }
    let y0: Vec<f64> = (0..m).map(|_| gaussian(rng).re).collect();
    let aty = p.adjoint_constraints(&y0);
    p.objective = z0.iter().zip(&aty).map(|(z, a)| (z + a).hermitian_part()).collect();
    p
}

/// `Σ_k e_k ⊗ τ(u_k ·)` in `ℓ∞^n ⊗ (M_d)^*`, `τ` the normalized trace and
/// `u_k` Haar unitaries.
pub fn unitary_instance(rng: &mut impl Rng, n: usize, d: usize) -> TensorElement {
    let us: Vec<CMatrix> = (0..n).map(|_| unitary(rng, d)).collect();
    unitary_tensor(&us)
}

/// `Σ_k e_k ⊗ τ(u_k ·)` for given `d × d` matrices.
pub fn unitary_tensor(us: &[CMatrix]) -> TensorElement {
    let d = us[0].rows();
    let n = us.len();
    // the functional x ↦ tr(u x)/d has coefficient u_{st}/d on the dual unit (s, t)
    TensorElement::from_fn(
        Space::primal(Algebra::diagonal(n)),
        Space::dual(Algebra::full(d)),
        1,
        |_, _, k, q| us[k][(q / d, q % d)] / d as f64,
    )
    .expect("shapes match")
}

/// `a ⊗ τ(ρ ·)` with `a ≥ 0`, `ρ` a density matrix, `‖a‖ = 1`; its Δ-norm
/// is one.
pub fn rank_one_positive_instance(rng: &mut impl Rng, n: usize, d: usize) -> TensorElement {
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let amax = a.iter().cloned().fold(0.0, f64::max).max(1e-3);
    let rho = psd(rng, d, d);
    let tr = rho.trace().re;
    TensorElement::from_fn(
        Space::primal(Algebra::diagonal(n)),
        Space::dual(Algebra::full(d)),
        1,
        |_, _, k, q| {
            let coef = if k == 0 { 1.0 } else { a[k] / amax };
            rho[(q / d, q % d)] * (coef / tr)
        },
    )
    .expect("shapes match")
}

/// Random algebra with total side in `1..=cap`, at most two blocks.
pub fn small_algebra(rng: &mut impl Rng, cap: usize) -> Algebra {
    algebra(rng, cap, 2)
}

/// `Ψ^{-1}(T)` for a random cp `T: A → M_n(B)`: a member of the δ-cone
/// in `M_n(A^* ⊗ B)`.
pub fn cp_tensor(rng: &mut impl Rng, a: &Algebra, b: &Algebra, n: usize) -> TensorElement {
    let t = cp_map(rng, a, &b.amplified(n), None);
    TensorElement::from_associated_map(&t, Space::primal(b.clone())).expect("target is amplified")
}

/// Gaussian tensor in `M_n(A^* ⊗ B)`.
pub fn dual_primal_tensor(rng: &mut impl Rng, a: &Algebra, b: &Algebra, n: usize) -> TensorElement {
    tensor(rng, &Space::dual(a.clone()), &Space::primal(b.clone()), n)
}

/// Gaussian tensor in `M_n(A ⊗ B^*)`.
pub fn primal_dual_tensor(rng: &mut impl Rng, a: &Algebra, b: &Algebra, n: usize) -> TensorElement {
    tensor(rng, &Space::primal(a.clone()), &Space::dual(b.clone()), n)
}

/// `(P − Q) + i (R − S)` for random cp `P, Q, R, S`.
pub fn decomposable_map(rng: &mut impl Rng, a: &Algebra, b: &Algebra) -> LinMap {
    let i = Complex64::new(0.0, 1.0);
    let p = cp_map(rng, a, b, None);
    let q = cp_map(rng, a, b, None);
    let r = cp_map(rng, a, b, None);
    let s = cp_map(rng, a, b, None);
    let re = p.sub(&q).expect("same shape");
    let im = r.sub(&s).expect("same shape");
    re.combine(C1, &im, i).expect("same shape")
}

/// Isometry `α ∈ M_{n,m}`, `m ≤ n`, from a Haar unitary.
pub fn isometry(rng: &mut impl Rng, n: usize, m: usize) -> CMatrix {
    let u = unitary(rng, n);
    u.submatrix(0, 0, n, m)
}

/// Gaussian `m × n` matrix scaled to operator norm one.
pub fn contraction(rng: &mut impl Rng, m: usize, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, m, n);
    let s = crate::linalg::op_norm(&g).expect("finite");
    g.scale_real(1.0 / s.max(1e-12))
}
