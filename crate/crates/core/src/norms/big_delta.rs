//! Δ-norm on `A ⊗ B^*`.
//!
//! The norm of `z ∈ M_n(A ⊗ B^*)` is the supremum of `‖[⟨T_{kl}, z_{ij}⟩]‖`
//! over `T ∈ M_m(D(A, B))` in the dec-ball. At level one this is a single
//! SDP. At level `n ≥ 2` the supremum is taken at `m = n` by alternating
//! between the map (an SDP over the dec-ball) and the unit vectors (a top
//! singular pair), which gives a lower bound; the upper bound comes from
//! explicit positive completions `[[u, z], [z^*, u']]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::delta::dual_primal_shape;
use super::lmi::LmiBuilder;
use super::{check_solution, dec_ball_sup, NormOptions, SolverStats, TensorElement};
use crate::algebra::{Algebra, LevelElement, Space};
use crate::choi::LinMap;
use crate::error::Result;
use crate::linalg::{op_norm, svd, CMatrix, C0};
use crate::random::{stream_rng, unit_vector};
use crate::sdp::solve;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBracket {
    pub lower: f64,
    pub upper: f64,
    /// `false` when an alternation hit its iteration cap.
    pub converged: bool,
    pub primal_upper: Option<PrimalUpper>,
    pub solver: Option<SolverStats>,
}

impl DeltaBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Upper bounds from explicit positive completions of `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimalUpper {
    pub value: f64,
    /// Best completion with corners `1 ⊗ Λ`, `Λ ∈ M_n(B^*)^+`.
    pub unit_left: Option<f64>,
    /// Best completion with corners `a ⊗ τ`, `a ∈ M_n(A)^+`, `τ` the
    /// normalized trace.
    pub trace_right: Option<f64>,
    /// The coefficient-expansion completion, always available.
    pub expansion: f64,
}

/// `z` rewritten in the `A ⊗ B^*` shape.
pub(crate) fn primal_dual_shape(z: &TensorElement) -> Result<TensorElement> {
    Ok(dual_primal_shape(z)?.flip())
}

pub fn big_delta_norm(z: &TensorElement) -> Result<DeltaBracket> {
    big_delta_norm_with(z, &NormOptions::default())
}

pub fn big_delta_norm_with(z: &TensorElement, opts: &NormOptions) -> Result<DeltaBracket> {
    let z = primal_dual_shape(z)?;
    if z.is_zero() {
        return Ok(DeltaBracket {
            lower: 0.0,
            upper: 0.0,
            converged: true,
            primal_upper: None,
            solver: None,
        });
    }
    if z.level() == 1 {
        let a = &z.left().algebra;
        let b = &z.right().algebra;
        let weights = level_weights(&z, 1, &[Complex64::new(1.0, 0.0)], &[Complex64::new(1.0, 0.0)]);
        let sup = dec_ball_sup(a, b, &weights, opts)?;
        return Ok(DeltaBracket {
            lower: sup.primal,
            upper: sup.dual,
            converged: true,
            primal_upper: None,
            solver: Some(sup.stats),
        });
    }
    let (lower, converged, stats) = alternating_lower(&z, opts)?;
    let pu = big_delta_primal_upper_with(&z, opts)?;
    Ok(DeltaBracket {
        lower,
        upper: pu.value.max(lower),
        converged,
        primal_upper: Some(pu),
        solver: Some(stats),
    })
}

/// Weights `W^{bc}` on the Choi blocks of `T: A → M_m(B)` such that
/// `Re Σ W C_T = Re ⟨ξ, [⟨T_{kl}, z_{ij}⟩] η⟩`, with `ξ, η` indexed `i m + k`.
fn level_weights(z: &TensorElement, m: usize, xi: &[Complex64], eta: &[Complex64]) -> Vec<Vec<CMatrix>> {
    let a = &z.left().algebra;
    let b = &z.right().algebra;
    let n = z.level();
    let mut w: Vec<Vec<CMatrix>> = a
        .blocks()
        .iter()
        .map(|&nb| {
            b.blocks()
                .iter()
                .map(|&mc| CMatrix::zeros(nb * m * mc, nb * m * mc))
                .collect()
        })
        .collect();
    for ua in a.units() {
        let p = a.unit_index(ua.block, ua.row, ua.col);
        for ub in b.units() {
            let q = b.unit_index(ub.block, ub.row, ub.col);
            let mc = b.block_size(ub.block);
            let big = m * mc;
            let (s, t, u, v) = (ua.row, ua.col, ub.row, ub.col);
            let blk = &mut w[ua.block][ub.block];
            for i in 0..n {
                for j in 0..n {
                    let c = z.coeff(i, j, p, q);
                    if c == C0 {
                        continue;
                    }
                    for k in 0..m {
                        let xk = xi[i * m + k].conj();
                        for l in 0..m {
                            blk[(s * big + k * mc + v, t * big + l * mc + u)] += c * xk * eta[j * m + l];
                        }
                    }
                }
            }
        }
    }
    w
}

/// `G[(i,k),(j,l)] = ⟨T_{kl}, z_{ij}⟩` for `T: A → M_m(B)`.
fn level_pairing(z: &TensorElement, m: usize, t: &LinMap) -> CMatrix {
    let a = &z.left().algebra;
    let b = &z.right().algebra;
    let n = z.level();
    let mut g = CMatrix::zeros(n * m, n * m);
    for ua in a.units() {
        let p = a.unit_index(ua.block, ua.row, ua.col);
        for ub in b.units() {
            let q = b.unit_index(ub.block, ub.row, ub.col);
            let mc = b.block_size(ub.block);
            let big = m * mc;
            let (s, tt, u, v) = (ua.row, ua.col, ub.row, ub.col);
            let ch = t.choi_block(ua.block, ub.block);
            for i in 0..n {
                for j in 0..n {
                    let c = z.coeff(i, j, p, q);
                    if c == C0 {
                        continue;
                    }
                    for k in 0..m {
                        for l in 0..m {
                            g[(i * m + k, j * m + l)] += c * ch[(s * big + k * mc + v, tt * big + l * mc + u)];
                        }
                    }
                }
            }
        }
    }
    g
}

fn alternating_lower(z: &TensorElement, opts: &NormOptions) -> Result<(f64, bool, SolverStats)> {
    let a = z.left().algebra.clone();
    let m = z.level();
    let target = z.right().algebra.amplified(m);
    let dim = z.level() * m;
    let mut best = 0.0f64;
    let mut best_converged = false;
    let mut stats: Option<SolverStats> = None;
    for r in 0..opts.restarts.max(1) {
        let mut rng = stream_rng(opts.seed, 0xd17a + r as u64);
        let mut xi = unit_vector(&mut rng, dim);
        let mut eta = unit_vector(&mut rng, dim);
        let mut last = 0.0f64;
        let mut converged = false;
        for _ in 0..opts.max_alternations {
            let weights = level_weights(z, m, &xi, &eta);
            let sup = dec_ball_sup(&a, &target, &weights, opts)?;
            stats = Some(match stats {
                Some(s) => s.merge(sup.stats),
                None => sup.stats,
            });
            let g = level_pairing(z, m, &sup.map);
            let (u, s, v) = svd(&g)?;
            let val = s[0];
            xi = u.col_vec(0);
            eta = v.col_vec(0);
            if val - last <= opts.alternation_tol * val.max(1.0) {
                last = last.max(val);
                converged = true;
                break;
            }
            last = val;
        }
        if last > best {
            best = last;
            best_converged = converged;
        }
    }
    Ok((best, best_converged, stats.expect("at least one program solved")))
}

pub fn big_delta_primal_upper(z: &TensorElement) -> Result<PrimalUpper> {
    big_delta_primal_upper_with(z, &NormOptions::default())
}

/// Best of the completion bounds. Each candidate `(u, u')` is checked by the
/// Choi criterion on the block `[[u, z], [z^*, u']]` after a small diagonal
/// inflation, and only then counted.
pub fn big_delta_primal_upper_with(z: &TensorElement, opts: &NormOptions) -> Result<PrimalUpper> {
    let z = primal_dual_shape(z)?;
    if z.is_zero() {
        return Ok(PrimalUpper {
            value: 0.0,
            unit_left: Some(0.0),
            trace_right: Some(0.0),
            expansion: 0.0,
        });
    }
    let expansion = expansion_upper(&z)?;
    let unit_left = unit_left_upper(&z, opts).ok().flatten();
    let trace_right = trace_right_upper(&z, opts).ok().flatten();
    let value = [unit_left, trace_right]
        .into_iter()
        .flatten()
        .fold(expansion, f64::min);
    Ok(PrimalUpper {
        value,
        unit_left,
        trace_right,
        expansion,
    })
}

/// `‖α‖ ‖β‖ ‖v‖ ‖w‖` for `z = α (v ⊗ w) β^*`.
pub fn factorization_upper(alpha: &CMatrix, v: &LevelElement, w: &LevelElement, beta: &CMatrix) -> Result<f64> {
    Ok(op_norm(alpha)? * op_norm(beta)? * v.level_norm()? * w.level_norm()?)
}

/// `z = α (v ⊗ w) β^*` with `v`, `w` diagonal in the basis elements, each of
/// norm one; the balanced bound is `sqrt(PQ) ‖B‖` with
/// `B_{j,(r,p,q)} = z[r][j][p][q]`.
pub(crate) fn expansion_upper(z: &TensorElement) -> Result<f64> {
    let (pd, qd) = (z.left().algebra.dim(), z.right().algebra.dim());
    let bm = expansion_matrix(z);
    Ok(((pd * qd) as f64).sqrt() * op_norm(&bm)?)
}

pub(crate) fn expansion_matrix(z: &TensorElement) -> CMatrix {
    let (pd, qd) = (z.left().algebra.dim(), z.right().algebra.dim());
    let n = z.level();
    CMatrix::from_fn(n, n * pd * qd, |j, col| {
        let r = col / (pd * qd);
        let p = (col / qd) % pd;
        let q = col % qd;
        z.coeff(r, j, p, q)
    })
}

/// Smallest Choi eigenvalue of the flipped block `[[u, z], [z^*, u']]`.
fn completion_margin(z: &TensorElement, u1: &TensorElement, u2: &TensorElement) -> Result<f64> {
    let block = TensorElement::block2(u1, z, &z.adjoint(), u2)?;
    block.flip().associated_map()?.min_choi_eigenvalue()
}

fn unit_left_upper(z: &TensorElement, opts: &NormOptions) -> Result<Option<f64>> {
    let a = &z.left().algebra;
    let b = &z.right().algebra;
    let n = z.level();
    let konst = constant_part(z)?;
    let nab = a.num_blocks();
    let mut blocks = Vec::new();
    for &mb in b.blocks() {
        for &nc in a.blocks() {
            blocks.push(mb * 2 * n * nc);
        }
    }
    let norm_base = blocks.len();
    blocks.extend([n, n]);
    let mut lmi = LmiBuilder::new(blocks);
    let t = lmi.scalar(1.0);
    lmi.place_scalar(t, norm_base, 0..n, 1.0);
    lmi.place_scalar(t, norm_base + 1, 0..n, 1.0);
    let mut vars = Vec::new();
    for (beta, &mb) in b.blocks().iter().enumerate() {
        let h = [lmi.hermitian(mb * n), lmi.hermitian(mb * n)];
        for (k, &var) in h.iter().enumerate() {
            for (c, &nc) in a.blocks().iter().enumerate() {
                let w = 2 * n * nc;
                for x in 0..nc {
                    lmi.place(
                        var,
                        beta * nab + c,
                        |i, j| {
                            let (s, kk) = (i / n, i % n);
                            let (tt, ll) = (j / n, j % n);
                            Some((s * w + (k * n + kk) * nc + x, tt * w + (k * n + ll) * nc + x))
                        },
                        1.0,
                    );
                }
            }
            lmi.place(var, norm_base + k, |i, j| (i / n == j / n).then_some((i % n, j % n)), -1.0);
        }
        for c in 0..nab {
            lmi.constant(beta * nab + c, 0, konst.choi_block(beta, c));
        }
        vars.push(h);
    }
    let sol = solve(&lmi.problem, &opts.solver)?;
    check_solution(&sol)?;
    let lam = |k: usize, eps: f64| -> Result<LevelElement> {
        let choi = vars
            .iter()
            .map(|h| {
                let m = h[k].value(&sol.y);
                let d = m.rows();
                vec![&m + &CMatrix::identity(d).scale_real(eps)]
            })
            .collect();
        LevelElement::from_associated_map(&LinMap::from_choi(b.clone(), Algebra::full(n), choi)?)
    };
    let one = LevelElement::unit(Space::primal(a.clone()), 1);
    let corners = |eps: f64| -> Result<(TensorElement, TensorElement, f64)> {
        let (l1, l2) = (lam(0, eps)?, lam(1, eps)?);
        let bound = l1
            .associated_map()?
            .cp_norm()?
            .max(l2.associated_map()?.cp_norm()?);
        Ok((TensorElement::elementary(&one, &l1), TensorElement::elementary(&one, &l2), bound))
    };
    inflate_and_check(z, corners)
}

fn trace_right_upper(z: &TensorElement, opts: &NormOptions) -> Result<Option<f64>> {
    let a = &z.left().algebra;
    let b = &z.right().algebra;
    let n = z.level();
    let db = b.side() as f64;
    let konst = constant_part(z)?;
    let nab = a.num_blocks();
    let mut blocks = Vec::new();
    for &mb in b.blocks() {
        for &nc in a.blocks() {
            blocks.push(mb * 2 * n * nc);
        }
    }
    let norm_base = blocks.len();
    for _ in 0..2 {
        blocks.extend(a.blocks().iter().map(|&nc| n * nc));
    }
    let mut lmi = LmiBuilder::new(blocks);
    let t = lmi.scalar(1.0);
    for k in 0..2 {
        for (c, &nc) in a.blocks().iter().enumerate() {
            lmi.place_scalar(t, norm_base + k * nab + c, 0..n * nc, 1.0);
        }
    }
    let mut vars = Vec::new();
    for (c, &nc) in a.blocks().iter().enumerate() {
        let g = [lmi.hermitian(n * nc), lmi.hermitian(n * nc)];
        for (k, &var) in g.iter().enumerate() {
            let w = 2 * n * nc;
            for (beta, &mb) in b.blocks().iter().enumerate() {
                for s in 0..mb {
                    lmi.place(
                        var,
                        beta * nab + c,
                        |i, j| Some((s * w + k * n * nc + i, s * w + k * n * nc + j)),
                        1.0 / db,
                    );
                }
            }
            lmi.place(var, norm_base + k * nab + c, |i, j| Some((i, j)), -1.0);
        }
        vars.push(g);
    }
    for beta in 0..b.num_blocks() {
        for c in 0..nab {
            lmi.constant(beta * nab + c, 0, konst.choi_block(beta, c));
        }
    }
    let sol = solve(&lmi.problem, &opts.solver)?;
    check_solution(&sol)?;
    let tau = LevelElement::unit(Space::dual(b.clone()), 1);
    let elem = |k: usize, eps: f64| -> Result<LevelElement> {
        let blocks: Vec<CMatrix> = vars
            .iter()
            .map(|g| {
                let m = g[k].value(&sol.y);
                let d = m.rows();
                &m + &CMatrix::identity(d).scale_real(eps)
            })
            .collect();
        let lvl = a.amplified_to_level(n, &CMatrix::direct_sum(&blocks));
        LevelElement::new(Space::primal(a.clone()), n, a.project_pattern(&lvl))
    };
    let corners = |eps: f64| -> Result<(TensorElement, TensorElement, f64)> {
        let (e1, e2) = (elem(0, eps)?, elem(1, eps)?);
        let bound = op_norm(e1.matrix())?.max(op_norm(e2.matrix())?);
        Ok((TensorElement::elementary(&e1, &tau), TensorElement::elementary(&e2, &tau), bound))
    };
    inflate_and_check(z, |eps| corners(eps * db))
}

/// Choi blocks of the flipped `[[0, z], [z^*, 0]]`.
fn constant_part(z: &TensorElement) -> Result<LinMap> {
    let zero = TensorElement::zero(z.left().clone(), z.right().clone(), z.level());
    TensorElement::block2(&zero, z, &z.adjoint(), &zero)?
        .flip()
        .associated_map()
}

/// Raises the corners until the completion is certified positive; returns
/// the resulting bound, or `None` if certification fails.
fn inflate_and_check(
    z: &TensorElement,
    corners: impl Fn(f64) -> Result<(TensorElement, TensorElement, f64)>,
) -> Result<Option<f64>> {
    let (u1, u2, _) = corners(0.0)?;
    let margin = completion_margin(z, &u1, &u2)?;
    let scale = 1.0 + z.max_abs();
    let mut eps = (-margin).max(0.0) * 1.001 + 1e-12 * scale;
    for _ in 0..4 {
        let (u1, u2, bound) = corners(eps)?;
        if completion_margin(z, &u1, &u2)? >= 0.0 {
            return Ok(Some(bound));
        }
        eps *= 10.0;
    }
    Ok(None)
}

