//! Infeasible primal-dual path-following with Nesterov-Todd scaling and a
//! Mehrotra predictor-corrector.
//!
//! Per block the NT scaling is built from `X = L L^*` and the eigensystem
//! `L^* Z L = P diag(k) P^*`: with `G = L P diag(k)^{-1/4}` both `G^{-1} X G^{-*}`
//! and `G^* Z G` equal `Λ = diag(k^{1/2})`, and `W = G G^*`. Search directions
//! solve `M Δy = r_p − A(R_c) + A(W R_d W)` with `M_ij = ⟨A_i, W A_j W⟩`, then
//! `ΔZ = R_d − A^*(Δy)` and `ΔX = R_c − W ΔZ W`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{
    blocks_frobenius, norm2, relative_gap, Constraint, Entry, SdpProblem, SdpSolution, Sense,
    SolverOptions, Status,
};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, cholesky_real, eigh, eigvalsh, solve_cholesky_real, CMatrix, RealMatrix};

const STEP_FRACTION: f64 = 0.98;

struct Presolved {
    kept: Vec<usize>,
    dropped: Vec<usize>,
    infeasible: bool,
}

fn presolve(rows: &[Constraint]) -> Presolved {
    let mut seen: HashMap<Vec<(usize, usize, usize, u64, u64)>, usize> = HashMap::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut infeasible = false;
    for (i, c) in rows.iter().enumerate() {
        if c.terms.is_empty() {
            if c.rhs != 0.0 {
                infeasible = true;
            }
            dropped.push(i);
            continue;
        }
        let key: Vec<_> = c
            .terms
            .iter()
            .flat_map(|t| {
                t.entries.iter().map(move |e| {
                    // +0.0 normalizes -0.0 so equal values hash equally
                    (
                        t.block,
                        e.row,
                        e.col,
                        (e.value.re + 0.0).to_bits(),
                        (e.value.im + 0.0).to_bits(),
                    )
                })
            })
            .collect();
        match seen.get(&key) {
            Some(&j) => {
                if rows[j].rhs != c.rhs {
                    infeasible = true;
                }
                dropped.push(i);
            }
            None => {
                seen.insert(key, i);
                kept.push(i);
            }
        }
    }
    Presolved {
        kept,
        dropped,
        infeasible,
    }
}

/// Constraint data regrouped by block for the Schur complement.
struct Layout {
    /// Per block: (row index among kept rows, entries in that block).
    by_block: Vec<Vec<(usize, Vec<Entry>)>>,
    /// Per block: build `W A_j W` densely instead of pairing sparse entries.
    dense: Vec<bool>,
}

impl Layout {
    fn new(blocks: &[usize], rows: &[Constraint]) -> Self {
        let mut by_block: Vec<Vec<(usize, Vec<Entry>)>> = vec![Vec::new(); blocks.len()];
        for (i, c) in rows.iter().enumerate() {
            for t in &c.terms {
                by_block[t.block].push((i, t.entries.clone()));
            }
        }
        let dense = by_block
            .iter()
            .zip(blocks)
            .map(|(list, &n)| {
                let nnz: f64 = list.iter().map(|(_, e)| e.len() as f64).sum();
                let sparse_cost = nnz * nnz;
                let n = n as f64;
                let dense_cost = list.len() as f64 * (2.0 * n * n * n) + list.len() as f64 * nnz;
                dense_cost < sparse_cost
            })
            .collect();
        Self { by_block, dense }
    }
}

struct Scaling {
    g: CMatrix,
    lambda: Vec<f64>,
    w: CMatrix,
}

/// A square root `L` with `x = L L^*`. Late iterates can carry a pivot
/// that is negative at rounding level, so a failed Cholesky falls back to the
/// eigendecomposition with the spectrum clamped to a tiny positive floor.
fn scaling_factor(x: &CMatrix) -> Option<CMatrix> {
    if let Some(l) = cholesky_lower(x) {
        return Some(l);
    }
    let eig = eigh(x).ok()?;
    let top = eig.max();
    if !(top > 0.0 && top.is_finite()) {
        return None;
    }
    let floor = top * 1e-30;
    let mut l = eig.vectors.clone();
    for (j, &v) in eig.values.iter().enumerate() {
        let s = v.max(floor).sqrt();
        for i in 0..l.rows() {
            l[(i, j)] *= s;
        }
    }
    Some(l)
}

fn nt_scaling(x: &CMatrix, z: &CMatrix, iter: usize) -> Result<Scaling> {
    let l = scaling_factor(x)
        .ok_or_else(|| Error::solver(iter, f64::NAN, "primal iterate lost positive definiteness"))?;
    let k = l.adjoint_matmul(&z.matmul(&l));
    let eig = eigh(&k)?;
    let kmax = eig.max().max(f64::MIN_POSITIVE);
    let floor = kmax * 1e-30;
    let mut g = l.matmul(&eig.vectors);
    let mut lambda = Vec::with_capacity(eig.values.len());
    for (j, &kj) in eig.values.iter().enumerate() {
        let kj = kj.max(floor);
        let s = kj.powf(-0.25);
        for i in 0..g.rows() {
            g[(i, j)] *= s;
        }
        lambda.push(kj.sqrt());
    }
    let w = g.matmul_adjoint(&g);
    Ok(Scaling { g, lambda, w })
}

fn apply_a(rows: &[Constraint], x: &[CMatrix]) -> Vec<f64> {
    rows.iter().map(|c| c.evaluate(x)).collect()
}

fn apply_at(blocks: &[usize], rows: &[Constraint], y: &[f64]) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
    for (c, &yi) in rows.iter().zip(y) {
        if yi != 0.0 {
            c.accumulate(yi, &mut out);
        }
    }
    out
}

fn schur_matrix(layout: &Layout, scalings: &[Scaling], m: usize) -> RealMatrix {
    let mut mm = RealMatrix::zeros(m, m);
    for (b, list) in layout.by_block.iter().enumerate() {
        let w = &scalings[b].w;
        if layout.dense[b] {
            let n = w.rows();
            for (jj, (j, ej)) in list.iter().enumerate() {
                // T = A_j W, then B = W T
                let mut t = CMatrix::zeros(n, n);
                for f in ej {
                    let wrow = w.row(f.col);
                    let trow = &mut t.data_mut()[f.row * n..(f.row + 1) * n];
                    for (tv, wv) in trow.iter_mut().zip(wrow) {
                        *tv += f.value * wv;
                    }
                }
                let bj = w.matmul(&t);
                for (i, ei) in list[..=jj].iter() {
                    let s: f64 = ei.iter().map(|e| (e.value * bj[(e.col, e.row)]).re).sum();
                    mm[(*i, *j)] += s;
                    if i != j {
                        mm[(*j, *i)] += s;
                    }
                }
            }
        } else {
            for (ii, (i, ei)) in list.iter().enumerate() {
                for (j, ej) in list[..=ii].iter() {
                    let mut s = 0.0;
                    for e in ei {
                        for f in ej {
                            s += (e.value * f.value * w[(e.col, f.row)] * w[(f.col, e.row)]).re;
                        }
                    }
                    mm[(*i, *j)] += s;
                    if i != j {
                        mm[(*j, *i)] += s;
                    }
                }
            }
        }
    }
    mm
}

fn factor_schur(mm: &RealMatrix, iter: usize) -> Result<RealMatrix> {
    match cholesky_real(mm) {
        Ok(l) => Ok(l),
        Err(_) => {
            let n = mm.rows();
            let scale = (0..n).map(|i| mm[(i, i)].abs()).fold(1.0, f64::max);
            let mut reg = mm.clone();
            for i in 0..n {
                reg[(i, i)] += 1e-12 * scale;
            }
            cholesky_real(&reg).map_err(|_| {
                Error::solver(iter, f64::NAN, "Newton system is numerically singular")
            })
        }
    }
}

/// Largest step in (0, 1] keeping `Λ + α Δ` positive definite, times the
/// step fraction.
fn step_length(lambda: &[f64], delta: &CMatrix) -> Result<f64> {
    let n = lambda.len();
    let s = CMatrix::from_fn(n, n, |i, j| delta[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let vals = eigvalsh(&s)?;
    let emin = vals.first().copied().unwrap_or(0.0);
    if emin >= 0.0 {
        Ok(1.0)
    } else {
        Ok((STEP_FRACTION * (-1.0 / emin)).min(1.0))
    }
}

/// Cholesky solve of `M dy = rhs` plus one step of iterative refinement.
fn solve_refined((mm, chol): &(RealMatrix, RealMatrix), rhs: &[f64]) -> Vec<f64> {
    let mut dy = solve_cholesky_real(chol, rhs);
    let m = rhs.len();
    let res: Vec<f64> = (0..m)
        .map(|i| rhs[i] - (0..m).map(|j| mm[(i, j)] * dy[j]).sum::<f64>())
        .collect();
    let corr = solve_cholesky_real(chol, &res);
    for (d, c) in dy.iter_mut().zip(corr) {
        *d += c;
    }
    dy
}

struct Direction {
    dy: Vec<f64>,
    dx: Vec<CMatrix>,
    dz: Vec<CMatrix>,
    dx_s: Vec<CMatrix>,
    dz_s: Vec<CMatrix>,
}

#[allow(clippy::too_many_arguments)]
fn direction(
    blocks: &[usize],
    rows: &[Constraint],
    scalings: &[Scaling],
    schur: &(RealMatrix, RealMatrix),
    rp: &[f64],
    rd: &[CMatrix],
    rc: &[CMatrix],
    d_scaled: &[CMatrix],
) -> Direction {
    let w_rd_w: Vec<CMatrix> = scalings
        .iter()
        .zip(rd)
        .map(|(s, r)| s.w.matmul(&r.matmul(&s.w)))
        .collect();
    let a_rc = apply_a(rows, rc);
    let a_wrdw = apply_a(rows, &w_rd_w);
    let rhs: Vec<f64> = (0..rows.len()).map(|i| rp[i] - a_rc[i] + a_wrdw[i]).collect();
    let dy = if rows.is_empty() {
        Vec::new()
    } else {
        solve_refined(schur, &rhs)
    };
    let aty = apply_at(blocks, rows, &dy);
    let dz: Vec<CMatrix> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
    let dx: Vec<CMatrix> = scalings
        .iter()
        .zip(rc.iter().zip(&dz))
        .map(|(s, (r, dzb))| (r - &s.w.matmul(&dzb.matmul(&s.w))).hermitian_part())
        .collect();
    let dz_s: Vec<CMatrix> = scalings
        .iter()
        .zip(&dz)
        .map(|(s, dzb)| s.g.adjoint_matmul(&dzb.matmul(&s.g)).hermitian_part())
        .collect();
    let dx_s: Vec<CMatrix> = d_scaled.iter().zip(&dz_s).map(|(d, z)| d - z).collect();
    Direction {
        dy,
        dx,
        dz,
        dx_s,
        dz_s,
    }
}

/// Solves `p` to the tolerances in `opts`.
///
/// Returns `Ok` with a non-optimal status for max-iteration, infeasibility
/// and unboundedness outcomes; `Err` only for invalid input. When the
/// iteration stalls, diverges or breaks down numerically, the best iterate
/// seen so far is returned with status `MaxIter` (or `Optimal` if it met the
/// tolerances).
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    let mut canon: Vec<Constraint> = p.constraints.clone();
    for c in &mut canon {
        c.canonicalize();
    }
    let pre = presolve(&canon);
    let blocks = p.blocks.clone();
    let ntot: usize = blocks.iter().sum();
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    let finish = |x: Vec<CMatrix>, y_int: &[f64], z: Vec<CMatrix>, status, iterations, pinf, dinf, gap| {
        let mut y = vec![0.0; p.constraints.len()];
        for (k, &orig) in pre.kept.iter().enumerate() {
            y[orig] = sign * y_int.get(k).copied().unwrap_or(0.0);
        }
        let primal_value = p.objective_value(&x);
        let dual_value: f64 = p.constraints.iter().zip(&y).map(|(c, yi)| c.rhs * yi).sum();
        SdpSolution {
            primal_value,
            dual_value,
            gap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            variable_values: x,
            y,
            z,
            status,
            iterations,
            dropped_rows: pre.dropped.clone(),
        }
    };

    if pre.infeasible {
        let x = blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        let z = blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        return Ok(finish(x, &[], z, Status::Infeasible, 0, f64::INFINITY, f64::INFINITY, f64::INFINITY));
    }

    let rows: Vec<Constraint> = pre.kept.iter().map(|&i| canon[i].clone()).collect();
    let m = rows.len();
    let b: Vec<f64> = rows.iter().map(|c| c.rhs).collect();
    let c: Vec<CMatrix> = p.objective.iter().map(|o| o.scale_real(sign)).collect();
    let layout = Layout::new(&blocks, &rows);
    let bnorm = norm2(&b);
    let cnorm = blocks_frobenius(&c);

    let xi = 1.0 + b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut x: Vec<CMatrix> = blocks.iter().map(|&n| CMatrix::identity(n).scale_real(xi)).collect();
    let mut z: Vec<CMatrix> = x.clone();
    let mut y = vec![0.0; m];
    let blowup = 1e12 * (1.0 + xi + cnorm + bnorm);

    let mut iter = 0;
    let mut stalled = 0;
    let mut best: Option<Iterate> = None;
    loop {
        let ax = apply_a(&rows, &x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = apply_at(&blocks, &rows, &y);
        let rd: Vec<CMatrix> = (0..blocks.len()).map(|k| &(&c[k] - &z[k]) - &aty[k]).collect();
        let pobj: f64 = c.iter().zip(&x).map(|(cb, xb)| cb.inner_re(xb)).sum();
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let xz: f64 = x.iter().zip(&z).map(|(xb, zb)| xb.inner_re(zb)).sum();
        let pinf = norm2(&rp) / (1.0 + bnorm);
        let dinf = blocks_frobenius(&rd) / (1.0 + cnorm);
        let gap = relative_gap(pobj, dobj, xz);
        let merit = gap.max(pinf).max(dinf);
        if xz >= 0.0 && best.as_ref().map_or(true, |b| merit < b.merit) {
            best = Some(Iterate {
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                iter,
                pinf,
                dinf,
                gap,
                merit,
            });
        }
        let met = |gap: f64, pinf: f64, dinf: f64| {
            gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol
        };
        if met(gap, pinf, dinf) {
            return Ok(finish(x, &y, z, Status::Optimal, iter, pinf, dinf, gap));
        }
        let best_merit = best.as_ref().map_or(f64::INFINITY, |b| b.merit);
        // rounding errors dominate once the iterates drift away from the best
        let diverged = xz < 0.0 || (best_merit < 1e-4 && merit > 1e3 * best_merit);
        if iter >= opts.max_iter || stalled >= 5 || diverged {
            break;
        }
        let zmax = z.iter().map(CMatrix::max_abs).fold(0.0, f64::max);
        let xmax = x.iter().map(CMatrix::max_abs).fold(0.0, f64::max);
        let ymax = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if (zmax > blowup || ymax > blowup) && pinf > 1e-6 {
            return Ok(finish(x, &y, z, Status::Infeasible, iter, pinf, dinf, gap));
        } else if xmax > blowup && dinf > 1e-6 {
            return Ok(finish(x, &y, z, Status::Unbounded, iter, pinf, dinf, gap));
        }

        let st = StepInput {
            blocks: &blocks,
            rows: &rows,
            layout: &layout,
            rp: &rp,
            rd: &rd,
            xz,
            ntot,
            iter,
        };
        match step(&st, &mut x, &mut y, &mut z) {
            Ok(tiny) => {
                stalled = if tiny { stalled + 1 } else { 0 };
            }
            Err(_) => break,
        }
        iter += 1;
    }
    let bst = best.expect("the starting point is recorded");
    let status = if met_final(opts, &bst) { Status::Optimal } else { Status::MaxIter };
    Ok(finish(bst.x, &bst.y, bst.z, status, bst.iter, bst.pinf, bst.dinf, bst.gap))
}

fn met_final(opts: &SolverOptions, b: &Iterate) -> bool {
    b.gap <= opts.gap_tol && b.pinf <= opts.feas_tol && b.dinf <= opts.feas_tol
}

struct Iterate {
    x: Vec<CMatrix>,
    y: Vec<f64>,
    z: Vec<CMatrix>,
    iter: usize,
    pinf: f64,
    dinf: f64,
    gap: f64,
    merit: f64,
}

struct StepInput<'a> {
    blocks: &'a [usize],
    rows: &'a [Constraint],
    layout: &'a Layout,
    rp: &'a [f64],
    rd: &'a [CMatrix],
    xz: f64,
    ntot: usize,
    iter: usize,
}

/// One predictor-corrector step; returns whether both step lengths were
/// negligible.
fn step(st: &StepInput, x: &mut [CMatrix], y: &mut [f64], z: &mut [CMatrix]) -> Result<bool> {
    let StepInput {
        blocks,
        rows,
        layout,
        rp,
        rd,
        ntot,
        iter,
        ..
    } = *st;
    let m = rows.len();
    let scalings = blocks
        .iter()
        .enumerate()
        .map(|(k, _)| nt_scaling(&x[k], &z[k], iter))
        .collect::<Result<Vec<_>>>()?;
    let mu = st.xz / ntot as f64;
    let mm = schur_matrix(layout, &scalings, m);
    let chol = if m > 0 {
        factor_schur(&mm, iter)?
    } else {
        RealMatrix::zeros(0, 0)
    };
    let schur = (mm, chol);

    // predictor: R_c = −X, scaled D = −Λ
    let rc_pred: Vec<CMatrix> = x.iter().map(|xb| xb.scale_real(-1.0)).collect();
    let d_pred: Vec<CMatrix> = scalings
        .iter()
        .map(|s| CMatrix::from_real_diag(&s.lambda.iter().map(|l| -l).collect::<Vec<_>>()))
        .collect();
    let pred = direction(blocks, rows, &scalings, &schur, rp, rd, &rc_pred, &d_pred);
    let mut ap: f64 = 1.0;
    let mut ad: f64 = 1.0;
    for (k, s) in scalings.iter().enumerate() {
        ap = ap.min(step_length(&s.lambda, &pred.dx_s[k])?);
        ad = ad.min(step_length(&s.lambda, &pred.dz_s[k])?);
    }
    let mut xz_aff = 0.0;
    for (k, s) in scalings.iter().enumerate() {
        let lam = CMatrix::from_real_diag(&s.lambda);
        let xa = &lam + &pred.dx_s[k].scale_real(ap);
        let za = &lam + &pred.dz_s[k].scale_real(ad);
        xz_aff += xa.inner_re(&za);
    }
    let mu_aff = xz_aff / ntot as f64;
    let sigma = if mu > 0.0 {
        (mu_aff / mu).clamp(0.0, 1.0).powi(3)
    } else {
        0.0
    };

    // corrector
    let mut rc = Vec::with_capacity(blocks.len());
    let mut d_corr = Vec::with_capacity(blocks.len());
    for (k, s) in scalings.iter().enumerate() {
        let n = s.lambda.len();
        let cross = &pred.dx_s[k].matmul(&pred.dz_s[k]) + &pred.dz_s[k].matmul(&pred.dx_s[k]);
        let d = CMatrix::from_fn(n, n, |i, j| {
            let mut r = -cross[(i, j)];
            if i == j {
                r += 2.0 * sigma * mu - 2.0 * s.lambda[i] * s.lambda[i];
            }
            r / (s.lambda[i] + s.lambda[j])
        });
        rc.push(s.g.matmul(&d.matmul_adjoint(&s.g)).hermitian_part());
        d_corr.push(d);
    }
    let corr = direction(blocks, rows, &scalings, &schur, rp, rd, &rc, &d_corr);
    let mut ap: f64 = 1.0;
    let mut ad: f64 = 1.0;
    for (k, s) in scalings.iter().enumerate() {
        ap = ap.min(step_length(&s.lambda, &corr.dx_s[k])?);
        ad = ad.min(step_length(&s.lambda, &corr.dz_s[k])?);
    }
    let tiny = ap < 1e-10 && ad < 1e-10;
    for k in 0..blocks.len() {
        x[k].axpy(Complex64::new(ap, 0.0), &corr.dx[k]);
        x[k] = x[k].hermitian_part();
        z[k].axpy(Complex64::new(ad, 0.0), &corr.dz[k]);
        z[k] = z[k].hermitian_part();
    }
    for (yi, dyi) in y.iter_mut().zip(&corr.dy) {
        *yi += ad * dyi;
    }
    Ok(tiny)
}
