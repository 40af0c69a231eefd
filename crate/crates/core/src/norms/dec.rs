//! Decomposable norm `‖T‖_dec = inf max(‖S1‖, ‖S2‖)` over cp `S1, S2` with
//! `[[S1, T], [T^*, S2]]` cp, and the supremum of a linear functional over
//! the dec-ball.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lmi::{HermVar, LmiBuilder};
use super::{check_solution, NormOptions, SolverStats};
use crate::algebra::Algebra;
use crate::choi::{block2x2, LinMap};
use crate::error::Result;
use crate::linalg::{op_norm, CMatrix};
use crate::sdp::{solve, Constraint, Sense, SdpProblem};

/// A pair `(S1, S2)` certifying `‖T‖_dec ≤ value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecWitness {
    pub s1: LinMap,
    pub s2: LinMap,
    /// `max(‖S1(1)‖, ‖S2(1)‖)`.
    pub value: f64,
}

impl DecWitness {
    pub fn new(s1: LinMap, s2: LinMap) -> Result<Self> {
        let value = op_norm(&s1.image_of_unit())?.max(op_norm(&s2.image_of_unit())?);
        Ok(Self { s1, s2, value })
    }

    /// Smallest Choi eigenvalue of `[[S1, T], [T^*, S2]]`.
    pub fn block_margin(&self, t: &LinMap) -> Result<f64> {
        block2x2(&self.s1, t, &self.s2)?.min_choi_eigenvalue()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecNorm {
    pub value: f64,
    pub witness: Option<DecWitness>,
    pub solver: Option<SolverStats>,
}

struct DecProgram {
    problem: SdpProblem,
    vars: Vec<Vec<[HermVar; 2]>>,
}

/// LMI form: minimize `t` subject to, for every block pair `(b, c)`,
/// `[[C_{S1}, C_T], [C_T^*, C_{S2}]] ⪰ 0`, and `t I − S_k(1)_c ⪰ 0`.
fn dec_program(t: &LinMap) -> DecProgram {
    let a = t.source();
    let b = t.target();
    let (na, nb) = (a.num_blocks(), b.num_blocks());
    let mut blocks = Vec::new();
    for &sb in a.blocks() {
        for &mc in b.blocks() {
            blocks.push(2 * sb * mc);
        }
    }
    let norm_base = blocks.len();
    for _ in 0..2 {
        blocks.extend_from_slice(b.blocks());
    }
    let mut lmi = LmiBuilder::new(blocks);
    let tv = lmi.scalar(1.0);
    for k in 0..2 {
        for (c, &mc) in b.blocks().iter().enumerate() {
            lmi.place_scalar(tv, norm_base + k * nb + c, 0..mc, 1.0);
        }
    }
    let mut vars = Vec::with_capacity(na);
    for (ba, &sb) in a.blocks().iter().enumerate() {
        let mut row = Vec::with_capacity(nb);
        for (c, &mc) in b.blocks().iter().enumerate() {
            let n = sb * mc;
            let blk = ba * nb + c;
            let s = [lmi.hermitian(n), lmi.hermitian(n)];
            for (k, &var) in s.iter().enumerate() {
                lmi.place(var, blk, |i, j| Some((k * n + i, k * n + j)), 1.0);
                // −Σ_s S[(s,p),(s,q)] in the norm block
                lmi.place(
                    var,
                    norm_base + k * nb + c,
                    |i, j| (i / mc == j / mc).then_some((i % mc, j % mc)),
                    -1.0,
                );
            }
            let ct = t.choi_block(ba, c);
            let off = CMatrix::block2(&CMatrix::zeros(n, n), ct, &ct.adjoint(), &CMatrix::zeros(n, n));
            lmi.constant(blk, 0, &off);
            row.push(s);
        }
        vars.push(row);
    }
    DecProgram {
        problem: lmi.problem,
        vars,
    }
}

/// The SDP solved by [`dec_norm`], for diagnostics.
pub fn dec_norm_problem(t: &LinMap) -> SdpProblem {
    dec_program(t).problem
}

/// `‖T_n‖_dec` with `T_n = id_{M_n} ⊗ T`.
pub fn dec_norm(t: &LinMap, level: usize) -> Result<DecNorm> {
    dec_norm_with(t, level, &NormOptions::default())
}

pub fn dec_norm_with(t: &LinMap, level: usize, opts: &NormOptions) -> Result<DecNorm> {
    let amp;
    let t = if level == 1 {
        t
    } else {
        amp = t.amplify(level)?;
        &amp
    };
    if t.is_zero() {
        let zero = LinMap::zero(t.source().clone(), t.target().clone());
        return Ok(DecNorm {
            value: 0.0,
            witness: Some(DecWitness::new(zero.clone(), zero)?),
            solver: None,
        });
    }
    let prog = dec_program(t);
    let sol = solve(&prog.problem, &opts.solver)?;
    let stats = check_solution(&sol)?;
    let s: Vec<[Vec<CMatrix>; 2]> = prog
        .vars
        .iter()
        .map(|row| {
            [
                row.iter().map(|v| v[0].value(&sol.y)).collect(),
                row.iter().map(|v| v[1].value(&sol.y)).collect(),
            ]
        })
        .collect();
    let build = |k: usize| {
        let choi = s.iter().map(|pair| pair[k].clone()).collect();
        LinMap::from_choi(t.source().clone(), t.target().clone(), choi)
    };
    let witness = DecWitness::new(build(0)?, build(1)?)?;
    Ok(DecNorm {
        value: sol.value(),
        witness: Some(witness),
        solver: Some(stats),
    })
}

/// `decompose`: the witness pair of the dec-norm optimum.
pub fn decompose(t: &LinMap) -> Result<DecWitness> {
    decompose_with(t, &NormOptions::default())
}

pub fn decompose_with(t: &LinMap, opts: &NormOptions) -> Result<DecWitness> {
    Ok(dec_norm_with(t, 1, opts)?
        .witness
        .expect("dec_norm always returns a witness"))
}

/// Result of maximizing `Re Σ W^{bc}[I, J] C_T^{bc}[I, J]` over the dec-ball.
#[derive(Clone, Debug)]
pub struct DecBallSup {
    pub value: f64,
    /// Lower and upper values reported by the solver.
    pub primal: f64,
    pub dual: f64,
    /// The maximizing map.
    pub map: LinMap,
    pub stats: SolverStats,
}

/// Maximizes `Re Σ_{bc} Σ_{IJ} W^{bc}[I,J] C_T^{bc}[I,J]` over `T: A → B`
/// with `‖T‖_dec ≤ 1`.
///
/// Variables: `Y_{bc} = [[S1, T], [T^*, S2]] ⪰ 0` and slacks `P_{kc} ⪰ 0`
/// with `P_{kc} + S_k(1)_c = I`.
pub fn dec_ball_sup(
    source: &Algebra,
    target: &Algebra,
    weights: &[Vec<CMatrix>],
    opts: &NormOptions,
) -> Result<DecBallSup> {
    let (na, nb) = (source.num_blocks(), target.num_blocks());
    let mut blocks = Vec::new();
    for &sb in source.blocks() {
        for &mc in target.blocks() {
            blocks.push(2 * sb * mc);
        }
    }
    let slack_base = blocks.len();
    for _ in 0..2 {
        blocks.extend_from_slice(target.blocks());
    }
    let mut p = SdpProblem::new(blocks, Sense::Maximize);
    for (ba, &sb) in source.blocks().iter().enumerate() {
        for (c, &mc) in target.blocks().iter().enumerate() {
            let n = sb * mc;
            let w = &weights[ba][c];
            for i in 0..n {
                for j in 0..n {
                    let v = w[(i, j)];
                    if v != Complex64::new(0.0, 0.0) {
                        p.add_objective_re(ba * nb + c, i, n + j, v);
                    }
                }
            }
        }
    }
    for k in 0..2 {
        for (c, &mc) in target.blocks().iter().enumerate() {
            let slack = slack_base + k * nb + c;
            for pp in 0..mc {
                for q in pp..mc {
                    let parts: &[bool] = if pp == q { &[true] } else { &[true, false] };
                    for &real in parts {
                        let rhs = if pp == q { 1.0 } else { 0.0 };
                        let mut con = Constraint::new(rhs);
                        let mut add = |blk: usize, i: usize, j: usize| {
                            if real {
                                con.add_real_part(blk, i, j, 1.0);
                            } else {
                                con.add_imag_part(blk, i, j, 1.0);
                            }
                        };
                        add(slack, pp, q);
                        for (ba, &sb) in source.blocks().iter().enumerate() {
                            let n = sb * mc;
                            for s in 0..sb {
                                add(ba * nb + c, k * n + s * mc + pp, k * n + s * mc + q);
                            }
                        }
                        p.add_constraint(con);
                    }
                }
            }
        }
    }
    let sol = solve(&p, &opts.solver)?;
    let stats = check_solution(&sol)?;
    let mut choi = Vec::with_capacity(na);
    for (ba, &sb) in source.blocks().iter().enumerate() {
        let mut row = Vec::with_capacity(nb);
        for (c, &mc) in target.blocks().iter().enumerate() {
            let n = sb * mc;
            row.push(sol.variable_values[ba * nb + c].submatrix(0, n, n, n));
        }
        choi.push(row);
    }
    let map = LinMap::from_choi(source.clone(), target.clone(), choi)?;
    Ok(DecBallSup {
        value: sol.value(),
        primal: sol.primal_value.min(sol.dual_value),
        dual: sol.primal_value.max(sol.dual_value),
        map,
        stats,
    })
}
