//! Suprema of the pairing `Re ⟨T, z⟩`, `z ∈ A ⊗ B^*`, over two balls of
//! maps: the dec-ball of `D(A, B)` and the cb-ball of `CB(A, M_{D_B})`.
//!
//! The cb-ball is written in the averaged form
//! `[[S1, T], [T^*, S2]] cp`, `S_k(1) ⪯ σ_k`, `σ_1 + σ_2 ≤ 2`, with the
//! target taken as the full matrix algebra on the side of `B`. It is a
//! separate program from the dec-ball one (different target, different
//! normalization), so agreement of the two values is a real check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C0;
use crate::norms::{big_delta_norm_with, check_solution, NormOptions, TensorElement};
use crate::sdp::{solve, Constraint, SdpProblem, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveCheck {
    pub delta_ball_value: f64,
    pub cb_ball_value: f64,
}

/// Both suprema for a level-one `z` with a primal left and a dual right leg.
pub fn cross_check_projective(z: &TensorElement, opts: &NormOptions) -> Result<ProjectiveCheck> {
    if z.left().dual || !z.right().dual || z.level() != 1 {
        return Err(Error::domain("cross check needs a level-one tensor in A ⊗ B*"));
    }
    if z.is_zero() {
        return Ok(ProjectiveCheck {
            delta_ball_value: 0.0,
            cb_ball_value: 0.0,
        });
    }
    let delta_ball_value = big_delta_norm_with(z, opts)?.midpoint();
    let cb_ball_value = cb_ball_sup(z, opts)?;
    Ok(ProjectiveCheck {
        delta_ball_value,
        cb_ball_value,
    })
}

/// `sup Re ⟨T, z⟩` over `T: A → M_D` with `‖T‖_cb ≤ 1`, `D` the side of `B`.
pub fn cb_ball_sup(z: &TensorElement, opts: &NormOptions) -> Result<f64> {
    let a = &z.left().algebra;
    let b = &z.right().algebra;
    let d = b.side();
    let mut blocks: Vec<usize> = a.blocks().iter().map(|&nb| 2 * nb * d).collect();
    let slack = blocks.len();
    blocks.extend([d, d, 1, 1, 1]);
    let (sigma, rest) = (slack + 2, slack + 4);
    let mut p = SdpProblem::new(blocks, Sense::Maximize);

    // ⟨T, e_st ⊗ F⟩ = tr(F T(e_st)), F = e_uv in block c of B
    for ua in a.units() {
        let pa = a.unit_index(ua.block, ua.row, ua.col);
        let nb = a.block_size(ua.block);
        let n = nb * d;
        for ub in b.units() {
            let q = b.unit_index(ub.block, ub.row, ub.col);
            let w = z.coeff(0, 0, pa, q);
            if w == C0 {
                continue;
            }
            let off = b.offset(ub.block);
            let (i, j) = (ua.row * d + off + ub.col, ua.col * d + off + ub.row);
            p.add_objective_re(ua.block, i, n + j, w);
        }
    }
    for k in 0..2 {
        for r in 0..d {
            for c in r..d {
                let parts: &[bool] = if r == c { &[true] } else { &[true, false] };
                for &real in parts {
                    let mut con = Constraint::new(0.0);
                    let mut add = |blk: usize, i: usize, j: usize, w: f64| {
                        if real {
                            con.add_real_part(blk, i, j, w);
                        } else {
                            con.add_imag_part(blk, i, j, w);
                        }
                    };
                    add(slack + k, r, c, 1.0);
                    for (ba, &nb) in a.blocks().iter().enumerate() {
                        let n = nb * d;
                        for s in 0..nb {
                            add(ba, k * n + s * d + r, k * n + s * d + c, 1.0);
                        }
                    }
                    if r == c {
                        add(sigma + k, 0, 0, -1.0);
                    }
                    p.add_constraint(con);
                }
            }
        }
    }
    let mut con = Constraint::new(2.0);
    con.add_real_part(sigma, 0, 0, 1.0)
        .add_real_part(sigma + 1, 0, 0, 1.0)
        .add_real_part(rest, 0, 0, 1.0);
    p.add_constraint(con);
    let sol = solve(&p, &opts.solver)?;
    check_solution(&sol)?;
    Ok(sol.value())
}
