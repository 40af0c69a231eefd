//! Completely bounded norm, computed independently of the dec program.
//!
//! The SDP maximizes `Re Σ C_T[I,J] X[I,J]` over
//! `Ξ_{bc} = [[1 ⊗ ρ0_c, X_{bc}], [X_{bc}^*, 1 ⊗ ρ1_c]] ⪰ 0` with `ρ0, ρ1`
//! block-diagonal density matrices on the target. This is the standard
//! program for the diamond norm of the trace-dual map, restricted to the
//! block pattern (the pinching onto source and target blocks leaves the
//! optimum unchanged).

use serde::{Deserialize, Serialize};

use super::{check_solution, NormOptions, SolverStats};
use crate::choi::LinMap;
use crate::error::Result;
use crate::linalg::{svd, CMatrix, C0};
use crate::random::{stream_rng, unit_vector};
use crate::sdp::{solve, Constraint, Sense, SdpProblem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbNorm {
    pub value: f64,
    /// `‖T_d(x)‖`-type lower bound from power iteration on the amplification
    /// at `d` = source side.
    pub lower_bound: f64,
    pub solver: Option<SolverStats>,
}

/// The SDP solved by [`cb_norm`], for diagnostics.
pub fn cb_norm_problem(t: &LinMap) -> SdpProblem {
    let a = t.source();
    let b = t.target();
    let nb = b.num_blocks();
    let mut blocks = Vec::new();
    for &sb in a.blocks() {
        for &mc in b.blocks() {
            blocks.push(2 * sb * mc);
        }
    }
    let rho_base = blocks.len();
    for _ in 0..2 {
        blocks.extend_from_slice(b.blocks());
    }
    let mut p = SdpProblem::new(blocks, Sense::Maximize);
    for (ba, &sb) in a.blocks().iter().enumerate() {
        for (c, &mc) in b.blocks().iter().enumerate() {
            let n = sb * mc;
            let blk = ba * nb + c;
            let ct = t.choi_block(ba, c);
            for i in 0..n {
                for j in 0..n {
                    if ct[(i, j)] != C0 {
                        p.add_objective_re(blk, i, n + j, ct[(i, j)]);
                    }
                }
            }
            // diagonal halves equal 1 ⊗ ρ_k
            for k in 0..2 {
                let rho = rho_base + k * nb + c;
                for i in 0..n {
                    for j in i..n {
                        let (s, pp) = (i / mc, i % mc);
                        let (tt, q) = (j / mc, j % mc);
                        let parts: &[bool] = if i == j { &[true] } else { &[true, false] };
                        for &real in parts {
                            let mut con = Constraint::new(0.0);
                            let add = |con: &mut Constraint, blk: usize, r: usize, cc: usize, w: f64| {
                                if real {
                                    con.add_real_part(blk, r, cc, w);
                                } else {
                                    con.add_imag_part(blk, r, cc, w);
                                }
                            };
                            add(&mut con, blk, k * n + i, k * n + j, 1.0);
                            if s == tt {
                                add(&mut con, rho, pp, q, -1.0);
                            }
                            p.add_constraint(con);
                        }
                    }
                }
            }
        }
    }
    for k in 0..2 {
        let mut con = Constraint::new(1.0);
        for (c, &mc) in b.blocks().iter().enumerate() {
            for i in 0..mc {
                con.add_real_part(rho_base + k * nb + c, i, i, 1.0);
            }
        }
        p.add_constraint(con);
    }
    p
}

/// `‖T_n‖_cb` with `T_n = id_{M_n} ⊗ T`.
pub fn cb_norm(t: &LinMap, level: usize) -> Result<CbNorm> {
    cb_norm_with(t, level, &NormOptions::default())
}

pub fn cb_norm_with(t: &LinMap, level: usize, opts: &NormOptions) -> Result<CbNorm> {
    let amp;
    let t = if level == 1 {
        t
    } else {
        amp = t.amplify(level)?;
        &amp
    };
    if t.is_zero() {
        return Ok(CbNorm {
            value: 0.0,
            lower_bound: 0.0,
            solver: None,
        });
    }
    let p = cb_norm_problem(t);
    let sol = solve(&p, &opts.solver)?;
    let stats = check_solution(&sol)?;
    let lower_bound = cb_power_lower_bound(t, opts)?;
    Ok(CbNorm {
        value: sol.value(),
        lower_bound,
        solver: Some(stats),
    })
}

/// `T_k(x)` for `x ∈ M_k(A)` in the level layout.
pub fn apply_amplified(t: &LinMap, k: usize, x: &CMatrix) -> Result<CMatrix> {
    let da = t.source().side();
    let db = t.target().side();
    let mut out = CMatrix::zeros(k * db, k * db);
    for i in 0..k {
        for j in 0..k {
            let slot = x.submatrix(i * da, j * da, da, da);
            out.set_submatrix(i * db, j * db, &t.apply(&slot)?);
        }
    }
    Ok(out)
}

/// Alternating ascent on `|⟨ξ, T_d(x) η⟩|` over `‖x‖ ≤ 1` and unit `ξ, η`,
/// `d` the source side. Each returned value is attained by an explicit
/// contraction, so it is a lower bound for `‖T‖_cb`.
pub fn cb_power_lower_bound(t: &LinMap, opts: &NormOptions) -> Result<f64> {
    let a = t.source();
    let b = t.target();
    let k = a.side();
    let db = b.side();
    let mut best = 0.0f64;
    for r in 0..opts.restarts.max(1) {
        let mut rng = stream_rng(opts.seed, 0xcb00 + r as u64);
        let mut xi = unit_vector(&mut rng, k * db);
        let mut eta = unit_vector(&mut rng, k * db);
        let mut last = 0.0;
        for _ in 0..opts.max_alternations {
            // x-step: blockwise polar part of G_b^T
            let mut blocks_x = Vec::with_capacity(a.num_blocks());
            for (ba, &nb) in a.blocks().iter().enumerate() {
                let w = k * nb;
                let mut g = CMatrix::zeros(w, w);
                for (c, &mc) in b.blocks().iter().enumerate() {
                    let off = b.offset(c);
                    let ch = t.choi_block(ba, c);
                    for i in 0..k {
                        for j in 0..k {
                            for s in 0..nb {
                                for tt in 0..nb {
                                    let mut acc = C0;
                                    for p in 0..mc {
                                        let xp = xi[i * db + off + p].conj();
                                        if xp == C0 {
                                            continue;
                                        }
                                        for q in 0..mc {
                                            acc += xp * ch[(s * mc + p, tt * mc + q)] * eta[j * db + off + q];
                                        }
                                    }
                                    g[(i * nb + s, j * nb + tt)] += acc;
                                }
                            }
                        }
                    }
                }
                // maximize Re tr(G^T x): x = V U^* for G^T = U Σ V^*
                let (u, _, v) = svd(&g.transpose())?;
                blocks_x.push(v.matmul_adjoint(&u));
            }
            let x = a.amplified_to_level(k, &CMatrix::direct_sum(&blocks_x));
            let y = apply_amplified(t, k, &x)?;
            let (u, s, v) = svd(&y)?;
            let val = s.first().copied().unwrap_or(0.0);
            xi = u.col_vec(0);
            eta = v.col_vec(0);
            if val <= last * (1.0 + 1e-12) + 1e-15 {
                last = last.max(val);
                break;
            }
            last = val;
        }
        best = best.max(last);
    }
    Ok(best)
}
