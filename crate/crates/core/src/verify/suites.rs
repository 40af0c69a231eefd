use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;

use super::gen::{
    contraction, cp_tensor, decomposable_map, dual_primal_tensor, primal_dual_tensor, small_algebra,
    unitary_instance,
};
use super::projective::cross_check_projective;
use super::{Check, Suite, SuiteConfig};
use crate::algebra::{Algebra, LevelElement, Space};
use crate::choi::LinMap;
use crate::error::Result;
use crate::linalg::{min_eigenvalue, op_norm, CMatrix, C1};
use crate::norms::{
    apply_pair, big_delta_norm_with, cb_norm_with, cb_power_lower_bound, cone_member_big_delta,
    cone_member_delta, dec_norm_with, delta_norm_with, inj_norm_with, NormOptions, TensorElement,
};
use crate::random::{cp_map, level_element, linear_map, positive_level_element, Rng64};

pub(super) const ALL: [Suite; 14] = [
    Suite {
        name: "regularity",
        description: "positive a, d of norm below one dominate x in [[a, x], [x*, d]], on both sides of the duality",
        tolerance: 0.0,
        run: regularity,
    },
    Suite {
        name: "cone-arith",
        description: "the δ- and Δ-cones are closed under sums, positive scaling and compression, and are proper",
        tolerance: 1e-8,
        run: cone_arith,
    },
    Suite {
        name: "subcross",
        description: "‖v ⊗ w‖ ≤ ‖v‖ ‖w‖ for the δ- and Δ-norms",
        tolerance: 1e-6,
        run: subcross,
    },
    Suite {
        name: "delta-le-Delta",
        description: "‖z‖_δ ≤ ‖z‖_Δ",
        tolerance: 1e-6,
        run: delta_le_big_delta,
    },
    Suite {
        name: "positive-lemma",
        description: "on the δ-cone, the δ-norm equals the injective norm and dominates the sampled c.c.p. supremum",
        tolerance: 1e-4,
        run: positive_lemma,
    },
    Suite {
        name: "duality1",
        description: "the Δ-norm is dual to the dec-norm: exact level-one program, pairing bound, positivity of the pairing",
        tolerance: 1e-6,
        run: duality1,
    },
    Suite {
        name: "duality2",
        description: "z is in the δ-cone iff Ψ_n(z) is cp; Ψ is an isometric isomorphism (δ-norm against the cb-norm of Ψ_n(z))",
        tolerance: 1e-4,
        run: duality2,
    },
    Suite {
        name: "pisier",
        description: "the sampled supremum, the cb-norm power bound and the injective norm stay below the δ-norm",
        tolerance: 1e-6,
        run: pisier,
    },
    Suite {
        name: "functorial-cp",
        description: "‖(Φ ⊗ id)(z)‖ ≤ ‖Φ‖_cb ‖z‖ for cp Φ, δ and Δ routes",
        tolerance: 1e-6,
        run: functorial_cp,
    },
    Suite {
        name: "functorial-dec",
        description: "‖(Φ ⊗ id)(z)‖ ≤ ‖Φ‖_dec ‖z‖ for decomposable Φ, δ and Δ routes",
        tolerance: 1e-6,
        run: functorial_dec,
    },
    Suite {
        name: "injective-coincide",
        description: "dec-norm and cb-norm agree for maps between finite-dimensional algebras",
        tolerance: 1e-4,
        run: injective_coincide,
    },
    Suite {
        name: "ell2-coincide",
        description: "on ℓ∞^2 ⊗ (M_d)*, the suprema over the dec-ball and the cb-ball agree",
        tolerance: 1e-4,
        run: ell2_coincide,
    },
    Suite {
        name: "unitary",
        description: "‖Σ e_k ⊗ τ(u_k ·)‖_Δ = 1 for unitaries u_k and the normalized trace τ",
        tolerance: 1e-4,
        run: unitary,
    },
    Suite {
        name: "factorization",
        description: "cp associated maps factor as S ∘ R through M_k with k ≤ dim A · dim B",
        tolerance: 1e-6,
        run: factorization,
    },
];

fn opts(cfg: &SuiteConfig, samples: usize) -> NormOptions {
    NormOptions {
        seed: cfg.seed,
        samples,
        restarts: 2,
        ..NormOptions::default()
    }
}

fn record(inst: &mut Value, key: &str, v: impl serde::Serialize) {
    inst[key] = serde_json::to_value(v).expect("serializable");
}

fn level(rng: &mut Rng64, cfg: &SuiteConfig) -> usize {
    rng.gen_range(1..=cfg.level.max(1))
}

fn normalized(z: TensorElement) -> TensorElement {
    let m = z.max_abs();
    if m == 0.0 {
        z
    } else {
        z.scale(Complex64::new(1.0 / m, 0.0))
    }
}

/// `Ψ_n(z) = Ψ^{-1}` of a cp map scaled to `‖Ψ(1)‖ = 1`.
fn unit_cp_tensor(rng: &mut Rng64, a: &Algebra, b: &Algebra, n: usize) -> Result<TensorElement> {
    let z = cp_tensor(rng, a, b, n);
    let s = z.associated_map()?.cp_norm()?;
    Ok(z.scale(Complex64::new(1.0 / s, 0.0)))
}

fn regularity(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let alg = small_algebra(rng, cfg.dims);
    let dual = rng.gen_bool(0.5);
    let space = if dual { Space::dual(alg) } else { Space::primal(alg) };
    let n = level(rng, cfg);
    let x = level_element(rng, &space, n);
    let target = rng.gen_range(0.1..0.95);
    let x = x.scale(Complex64::new(target / x.level_norm()?, 0.0));
    record(inst, "x", &x);
    let (a, d) = x.regularity_witness()?;
    let block = LevelElement::block2(&a, &x, &x.adjoint(), &d)?;
    let min_eig = if dual {
        block.associated_map()?.min_choi_eigenvalue()?
    } else {
        min_eigenvalue(block.matrix())?
    };
    let margin = min_eig.min(1.0 - a.level_norm()?).min(1.0 - d.level_norm()?);
    Ok(vec![Check::new("regularity margin below 1e-8", 1e-8 - margin)])
}

fn cone_arith(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims);
    let b = small_algebra(rng, cfg.dims);
    let n = level(rng, cfg);
    let z1 = unit_cp_tensor(rng, &a, &b, n)?;
    let z2 = unit_cp_tensor(rng, &a, &b, n)?;
    let lam = rng.gen_range(0.0..3.0);
    let m = rng.gen_range(1..=n + 1);
    let alpha = contraction(rng, m, n);
    record(inst, "z1", &z1);
    record(inst, "z2", &z2);
    record(inst, "lambda", lam);
    record(inst, "alpha", &alpha);
    let neg = |z: &TensorElement| -> Result<f64> {
        let map = z.associated_map()?;
        Ok((-map.min_choi_eigenvalue()?).max(0.0) / (1.0 + map.max_abs()))
    };
    let sum = z1.add(&z2)?;
    let mut checks = vec![
        Check::new("delta-cone: sum", neg(&sum)?),
        Check::new("delta-cone: positive multiple", neg(&z1.scale(Complex64::new(lam, 0.0)))?),
        Check::new("delta-cone: compression", neg(&z1.conjugate(&alpha)?)?),
    ];
    let both = cone_member_delta(&z1, 0.0)? && cone_member_delta(&z1.scale(-C1), 0.0)?;
    checks.push(Check::holds("delta-cone: proper", !both || z1.is_zero()));
    let zero = TensorElement::zero(z1.left().clone(), z1.right().clone(), n);
    checks.push(Check::holds(
        "delta-cone: zero is a member of both signs",
        cone_member_delta(&zero, 0.0)? && cone_member_delta(&zero.scale(-C1), 0.0)?,
    ));
    let big = cone_member_big_delta(&sum, 1e-9)?;
    checks.push(Check::holds("Delta-cone: sum", big.member));
    if let Some(w) = &big.witness {
        checks.push(Check::new("Delta-cone: sum witness error", w.error(&sum)?));
    }
    Ok(checks)
}

fn subcross(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims);
    let b = small_algebra(rng, cfg.dims);
    let k = level(rng, cfg);
    let l = rng.gen_range(1..=(cfg.level.max(1) / k).max(1));
    let v = level_element(rng, &Space::primal(a), k);
    let w = level_element(rng, &Space::dual(b), l);
    let v = v.scale(Complex64::new(1.0 / v.level_norm()?, 0.0));
    let w = w.scale(Complex64::new(1.0 / w.level_norm()?, 0.0));
    record(inst, "v", &v);
    record(inst, "w", &w);
    let z = TensorElement::elementary(&v, &w);
    let o = opts(cfg, 16);
    let big = big_delta_norm_with(&z, &o)?;
    let small = delta_norm_with(&z, &o)?;
    Ok(vec![
        Check::le("Delta: ‖v ⊗ w‖ − ‖v‖‖w‖", big.lower, 1.0),
        Check::le("delta: ‖v ⊗ w‖ − ‖v‖‖w‖", small.value, 1.0),
    ])
}

fn delta_le_big_delta(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims);
    let b = small_algebra(rng, cfg.dims);
    let n = level(rng, cfg);
    let z = normalized(primal_dual_tensor(rng, &a, &b, n));
    record(inst, "z", &z);
    let o = opts(cfg, 16);
    let small = delta_norm_with(&z, &o)?;
    let big = big_delta_norm_with(&z, &o)?;
    let mut checks = vec![Check::le("delta − Delta upper", small.value, big.upper)];
    if n == 1 {
        checks.push(Check::le("delta − Delta lower (level 1)", small.value, big.lower));
    }
    Ok(checks)
}

fn positive_lemma(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims.min(3));
    let b = small_algebra(rng, cfg.dims.min(3));
    let n = level(rng, cfg);
    let z = unit_cp_tensor(rng, &a, &b, n)?;
    record(inst, "z", &z);
    let o = opts(cfg, 256);
    let small = delta_norm_with(&z, &o)?;
    let inj = inj_norm_with(&z, &o)?;
    Ok(vec![
        Check::eq("|delta − injective|", small.value, inj.value),
        Check::le("sampled − delta", small.sampled_lower, small.value),
    ])
}

fn duality1(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims);
    let b = small_algebra(rng, cfg.dims);
    let n = level(rng, cfg);
    let z = normalized(primal_dual_tensor(rng, &a, &b, n));
    let t = linear_map(rng, &a, &b);
    record(inst, "z", &z);
    record(inst, "T", &t);
    let o = opts(cfg, 0);
    let big = big_delta_norm_with(&z, &o)?;
    let dec = dec_norm_with(&t, 1, &o)?.value;
    let pairing = op_norm(&z.pairing(&t)?)?;
    let scale = 1.0 + dec * big.upper;
    let mut checks = vec![Check::le(
        "‖⟨T, z⟩‖ − ‖T‖_dec ‖z‖_Delta (relative)",
        pairing / scale,
        dec * big.upper / scale,
    )];
    if n == 1 {
        checks.push(Check::le("Delta bracket width (level 1)", big.upper - big.lower, 0.0));
    }
    // positive against positive
    let k = rng.gen_range(1..=2);
    let v = positive_level_element(rng, &Space::primal(a.clone()), k);
    let w = positive_level_element(rng, &Space::dual(b.clone()), 1);
    let s = cp_map(rng, &a, &b, None);
    let p = TensorElement::elementary(&v, &w).pairing(&s)?;
    let herm = p.hermitian_part();
    let scale = 1.0 + herm.max_abs();
    checks.push(Check::new(
        "⟨cp, Delta-positive⟩ negativity",
        (-min_eigenvalue(&herm)?).max(0.0) / scale + (&p - &herm).max_abs() / scale,
    ));
    Ok(checks)
}

fn duality2(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims);
    let b = small_algebra(rng, cfg.dims);
    let n = level(rng, cfg);
    let z = if rng.gen_bool(0.5) {
        unit_cp_tensor(rng, &a, &b, n)?
    } else {
        normalized(dual_primal_tensor(rng, &a, &b, n))
    };
    let z = if rng.gen_bool(0.5) { z.add(&z.adjoint())? } else { z };
    record(inst, "z", &z);
    let member = cone_member_delta(&z, 1e-9)?;
    // (φ ⊗ id)_n(z) for φ given by a = [e_rs] ∈ M_D(A): the Choi matrix of Ψ_n(z)
    let d = a.side();
    let mut e = CMatrix::zeros(d * d, d * d);
    for r in 0..d {
        for s in 0..d {
            if a.block_of(r) == a.block_of(s) {
                e[(r * d + r, s * d + s)] = C1;
            }
        }
    }
    let norm = op_norm(&e)?;
    let e = e.scale_real(1.0 / norm);
    let id: Vec<CMatrix> = LinMap::identity(&b).basis_images();
    let img = apply_pair(&z, &e, d, &id, b.side());
    let h = img.hermitian_part();
    let scale = 1.0 + img.max_abs();
    let positive = (&img - &h).max_abs() <= 1e-9 * scale && min_eigenvalue(&h)? >= -1e-9 * scale;
    let o = opts(cfg, 0);
    let back = TensorElement::from_associated_map(&z.associated_map()?, z.right().clone())?;
    let small = delta_norm_with(&z, &o)?.value;
    let cb = cb_norm_with(&z.associated_map()?, 1, &o)?.value;
    Ok(vec![
        Check::holds("membership ⇔ positivity under (φ ⊗ id)", member == positive),
        Check::new("Ψ round trip", back.max_abs_diff(&z)),
        Check::eq("|delta − cb norm of Ψ_n(z)|", small, cb),
    ])
}

fn pisier(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims.min(3));
    let b = small_algebra(rng, cfg.dims.min(3));
    let n = level(rng, cfg);
    let z = normalized(dual_primal_tensor(rng, &a, &b, n));
    record(inst, "z", &z);
    let o = opts(cfg, 256);
    let small = delta_norm_with(&z, &o)?;
    let map = z.associated_map()?;
    let power = cb_power_lower_bound(&map, &o)?;
    let inj = inj_norm_with(&z, &o)?.value;
    Ok(vec![
        Check::le("sampled − delta", small.sampled_lower, small.value),
        Check::le("cb power bound − delta", power, small.value),
        Check::le("injective − delta", inj, small.value),
    ])
}

fn functorial(
    rng: &mut Rng64,
    cfg: &SuiteConfig,
    inst: &mut Value,
    map: fn(&mut Rng64, &Algebra, &Algebra) -> LinMap,
    bound: fn(&LinMap, &NormOptions) -> Result<f64>,
) -> Result<Vec<Check>> {
    let a1 = small_algebra(rng, cfg.dims.min(3));
    let a2 = small_algebra(rng, cfg.dims.min(3));
    let b = small_algebra(rng, cfg.dims.min(3));
    let n = level(rng, cfg);
    let phi = map(rng, &a1, &a2);
    let phi = phi.scale(Complex64::new(1.0 / phi.max_abs().max(1e-12), 0.0));
    // Δ route: z ∈ A1 ⊗ B^* at level one, Φ on the left
    let zb = normalized(primal_dual_tensor(rng, &a1, &b, 1));
    // δ route: z ∈ B^* ⊗ A1, Φ on the right
    let zd = normalized(dual_primal_tensor(rng, &b, &a1, n));
    record(inst, "phi", &phi);
    record(inst, "z_Delta", &zb);
    record(inst, "z_delta", &zd);
    let o = opts(cfg, 0);
    let c = bound(&phi, &o)?;
    let before = big_delta_norm_with(&zb, &o)?;
    let after = big_delta_norm_with(&zb.apply_left(&phi)?, &o)?;
    let d_before = delta_norm_with(&zd, &o)?.value;
    let d_after = delta_norm_with(&zd.apply_right(&phi)?, &o)?.value;
    Ok(vec![
        Check::le("Delta: ‖(Φ ⊗ id) z‖ − c ‖z‖", after.lower, c * before.upper),
        Check::le("delta: ‖(id ⊗ Φ) z‖ − c ‖z‖", d_after, c * d_before),
    ])
}

fn functorial_cp(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    functorial(
        rng,
        cfg,
        inst,
        |rng, a, b| cp_map(rng, a, b, None),
        |phi, o| Ok(cb_norm_with(phi, 1, o)?.value),
    )
}

fn functorial_dec(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    functorial(rng, cfg, inst, |rng, a, b| decomposable_map(rng, a, b), |phi, o| {
        Ok(dec_norm_with(phi, 1, o)?.value)
    })
}

fn injective_coincide(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims);
    let b = small_algebra(rng, cfg.dims);
    let t = linear_map(rng, &a, &b);
    let t = t.scale(Complex64::new(1.0 / t.max_abs(), 0.0));
    record(inst, "T", &t);
    let o = opts(cfg, 0);
    let dec = dec_norm_with(&t, 1, &o)?.value;
    let cb = cb_norm_with(&t, 1, &o)?;
    Ok(vec![
        Check::eq("|dec − cb|", dec, cb.value),
        Check::le("cb power bound − cb", cb.lower_bound, cb.value),
    ])
}

fn ell2_coincide(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let d = rng.gen_range(1..=cfg.dims.max(1));
    let z = if rng.gen_bool(0.5) {
        unitary_instance(rng, 2, d)
    } else {
        normalized(primal_dual_tensor(rng, &Algebra::diagonal(2), &Algebra::full(d), 1))
    };
    record(inst, "z", &z);
    let c = cross_check_projective(&z, &opts(cfg, 0))?;
    Ok(vec![Check::eq(
        "|dec-ball sup − cb-ball sup|",
        c.delta_ball_value,
        c.cb_ball_value,
    )])
}

fn unitary(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let hi = cfg.dims.max(2);
    let n = rng.gen_range(2..=hi);
    let d = rng.gen_range(2..=hi);
    let z = unitary_instance(rng, n, d);
    record(inst, "z", &z);
    let big = big_delta_norm_with(&z, &opts(cfg, 0))?;
    Ok(vec![
        Check::eq("|Delta lower − 1|", big.lower, 1.0),
        Check::eq("|Delta upper − 1|", big.upper, 1.0),
    ])
}

fn factorization(rng: &mut Rng64, cfg: &SuiteConfig, inst: &mut Value) -> Result<Vec<Check>> {
    let a = small_algebra(rng, cfg.dims.min(3));
    let b = small_algebra(rng, cfg.dims.min(3));
    let n = level(rng, cfg);
    let z = unit_cp_tensor(rng, &a, &b, n)?;
    record(inst, "z", &z);
    let m = cone_member_big_delta(&z, 1e-9)?;
    let mut checks = vec![Check::holds("cp tensor has a factorization", m.member)];
    if let Some(w) = &m.witness {
        checks.push(Check::holds("k ≤ dim A · dim B", w.k <= a.dim() * b.dim()));
        checks.push(Check::new("‖S ∘ R − Ψ_n(z)‖", w.error(&z)?));
        checks.push(Check::holds("R cp, w positive", w.is_positive(1e-9)?));
    }
    // a self-adjoint non-member: the transpose part makes Ψ_n(z) non-cp
    let t = LinMap::transpose(&a);
    let neg = TensorElement::from_associated_map(
        &t.compose(&LinMap::identity(&a))?,
        Space::primal(a.clone()),
    )?;
    if a.blocks().iter().any(|&s| s > 1) {
        let m = cone_member_big_delta(&neg, 1e-9)?;
        checks.push(Check::holds("transpose tensor is not a member", !m.member && !m.k_max_limited));
    }
    Ok(checks)
}
