use decnorm::choi::{block2x2, LinMap};
use decnorm::linalg::{op_norm, psd_check, CMatrix, HermitianMatrix, C0};
use decnorm::norms::{apply_amplified, dec_norm_problem};
use decnorm::random::stream_rng;
use decnorm::sdp::{check_certificate, solve, Constraint, SdpProblem, SdpSolution, Sense, SolverOptions, Status};
use decnorm::verify::gen::feasible_sdp;
use num_complex::Complex64;
use proptest::prelude::*;
use serde_json::Value;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn assert_optimal(p: &SdpProblem, s: &SdpSolution) {
    assert_eq!(s.status, Status::Optimal);
    let c = check_certificate(p, s);
    assert!(c.primal_feas <= 1e-8, "{c:?}");
    assert!(c.dual_feas <= 1e-8, "{c:?}");
    assert!(c.gap <= 1e-8, "{c:?}");
}

#[test]
fn min_trace_with_fixed_corner() {
    let mut p = SdpProblem::new(vec![2], Sense::Minimize);
    p.objective[0] = CMatrix::identity(2);
    let mut c = Constraint::new(1.0);
    c.add_real_part(0, 0, 0, 1.0);
    p.add_constraint(c);
    let s = solve(&p, &opts()).unwrap();
    assert_optimal(&p, &s);
    assert!((s.primal_value - 1.0).abs() < 1e-7);
    assert!((s.dual_value - 1.0).abs() < 1e-7);
}

#[test]
fn top_eigenvalue_program() {
    let mut p = SdpProblem::new(vec![2], Sense::Maximize);
    p.objective[0] = CMatrix::from_real_diag(&[1.0, -1.0]);
    let mut c = Constraint::new(1.0);
    c.add_real_part(0, 0, 0, 1.0).add_real_part(0, 1, 1, 1.0);
    p.add_constraint(c);
    let s = solve(&p, &opts()).unwrap();
    assert_optimal(&p, &s);
    assert!((s.value() - 1.0).abs() < 1e-7);
}

#[test]
fn complex_objective_needs_complex_variable() {
    // max Re⟨[[0, i], [-i, 0]], X⟩ over density matrices is the top eigenvalue 1;
    // a real X would give 0
    let mut p = SdpProblem::new(vec![2], Sense::Maximize);
    let i = Complex64::new(0.0, 1.0);
    p.objective[0] = CMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => i,
        (1, 0) => -i,
        _ => C0,
    });
    let mut c = Constraint::new(1.0);
    c.add_real_part(0, 0, 0, 1.0).add_real_part(0, 1, 1, 1.0);
    p.add_constraint(c);
    let s = solve(&p, &opts()).unwrap();
    assert_optimal(&p, &s);
    assert!((s.value() - 1.0).abs() < 1e-7);
}

fn load_certificate() -> Value {
    let text = include_str!("fixtures/transpose_dec_certificate.json");
    serde_json::from_str(text).unwrap()
}

/// The committed certificate pins the dec-norm of the transpose to exactly 2,
/// checked here with eigenvalues and operator norms only.
#[test]
fn transpose_certificate_is_valid() {
    let fx = load_certificate();
    let t: LinMap = serde_json::from_value(fx["map"].clone()).unwrap();
    assert_eq!(t, LinMap::transpose(t.source()));

    let s1: LinMap = serde_json::from_value(fx["upper"]["s1"].clone()).unwrap();
    let s2: LinMap = serde_json::from_value(fx["upper"]["s2"].clone()).unwrap();
    let block = block2x2(&s1, &t, &s2).unwrap();
    for row in block.choi() {
        for c in row {
            let h = HermitianMatrix::new(c).unwrap();
            assert!(psd_check(&h, 0.0).unwrap().is_psd);
        }
    }
    let upper = op_norm(&s1.image_of_unit()).unwrap().max(op_norm(&s2.image_of_unit()).unwrap());
    assert_eq!(upper, fx["upper"]["value"].as_f64().unwrap());

    let x: CMatrix = serde_json::from_value(fx["lower"]["x"].clone()).unwrap();
    let tx = apply_amplified(&t, 2, &x).unwrap();
    let lower = op_norm(&tx).unwrap() / op_norm(&x).unwrap();
    assert!((lower - fx["lower"]["value"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn transpose_dec_program_matches_certificate() {
    let fx = load_certificate();
    let t: LinMap = serde_json::from_value(fx["map"].clone()).unwrap();
    let p = dec_norm_problem(&t);
    let s = solve(&p, &opts()).unwrap();
    assert_optimal(&p, &s);
    let value = s.value();
    assert!((value - 2.0).abs() < 1e-5, "{value}");
}

#[test]
fn certificate_of_hand_built_point() {
    let mut p = SdpProblem::new(vec![2], Sense::Minimize);
    p.objective[0] = CMatrix::identity(2);
    let mut c = Constraint::new(1.0);
    c.add_real_part(0, 0, 0, 1.0);
    p.add_constraint(c);
    let sol = SdpSolution {
        primal_value: 1.0,
        dual_value: 1.0,
        gap: 0.0,
        primal_infeasibility: 0.0,
        dual_infeasibility: 0.0,
        variable_values: vec![CMatrix::from_real_diag(&[1.0, 0.0])],
        y: vec![1.0],
        z: vec![CMatrix::from_real_diag(&[0.0, 1.0])],
        status: Status::Optimal,
        iterations: 0,
        dropped_rows: vec![],
    };
    let cert = check_certificate(&p, &sol);
    assert!(cert.primal_feas <= 1e-12);
    assert!(cert.dual_feas <= 1e-12);
    assert!(cert.gap <= 1e-12);

    let mut off = sol.clone();
    off.variable_values[0] = &off.variable_values[0] + &CMatrix::identity(2).scale_real(1e-3);
    let cert = check_certificate(&p, &off);
    assert!(cert.primal_feas.max(cert.gap) >= 1e-4, "{cert:?}");
}

#[test]
fn presolve_drops_duplicate_and_zero_rows() {
    let mut p = SdpProblem::new(vec![2], Sense::Minimize);
    p.objective[0] = CMatrix::identity(2);
    let mut c = Constraint::new(1.0);
    c.add_real_part(0, 0, 0, 1.0);
    p.add_constraint(c.clone());
    p.add_constraint(c);
    p.add_constraint(Constraint::new(0.0));
    let s = solve(&p, &opts()).unwrap();
    assert_eq!(s.dropped_rows, vec![1, 2]);
    assert!((s.value() - 1.0).abs() < 1e-7);

    let mut q = p.clone();
    q.constraints[1].rhs = 2.0;
    assert_eq!(solve(&q, &opts()).unwrap().status, Status::Infeasible);
}

#[test]
fn problems_round_trip_through_json() {
    let mut rng = stream_rng(3, 0);
    let p = feasible_sdp(&mut rng, 6, 5);
    let text = serde_json::to_string(&p).unwrap();
    let back: SdpProblem = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

fn dense_constraint(blocks: &[usize], mats: &[CMatrix], rhs: f64) -> Constraint {
    let mut c = Constraint::new(rhs);
    for (b, (m, &n)) in mats.iter().zip(blocks).enumerate() {
        for i in 0..n {
            for j in i..n {
                if m[(i, j)] != C0 {
                    c.add_hermitian_entry(b, i, j, m[(i, j)]);
                }
            }
        }
    }
    c
}

fn coefficient_matrices(p: &SdpProblem) -> Vec<Vec<CMatrix>> {
    p.constraints
        .iter()
        .map(|c| {
            let mut out: Vec<CMatrix> = p.blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
            c.accumulate(1.0, &mut out);
            out
        })
        .collect()
}

/// The same program over real symmetric `2n × 2n` variables, data mapped by
/// `a + ib ↦ [[a, −b], [b, a]] / 2`.
fn real_embedded(p: &SdpProblem) -> SdpProblem {
    let emb = |m: &CMatrix| {
        let r = m.real_embedding();
        CMatrix::from_fn(r.rows(), r.cols(), |i, j| Complex64::new(r[(i, j)] / 2.0, 0.0))
    };
    let blocks: Vec<usize> = p.blocks.iter().map(|n| 2 * n).collect();
    let mut q = SdpProblem::new(blocks.clone(), p.sense);
    q.objective = p.objective.iter().map(emb).collect();
    for (c, mats) in p.constraints.iter().zip(coefficient_matrices(p)) {
        let e: Vec<CMatrix> = mats.iter().map(emb).collect();
        q.add_constraint(dense_constraint(&blocks, &e, c.rhs));
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_feasible_programs_solve(seed in 0u64..10_000) {
        let mut rng = stream_rng(seed, 0);
        let p = feasible_sdp(&mut rng, 10, 12);
        let s = solve(&p, &opts()).unwrap();
        prop_assert!(s.gap <= 1e-7);
        // weak duality for a minimization
        prop_assert!(s.primal_value >= s.dual_value - 1e-9 * (1.0 + s.primal_value.abs()));
        let c = check_certificate(&p, &s);
        prop_assert!(c.primal_feas <= 1e-8 && c.dual_feas <= 1e-8 && c.gap <= 1e-8);
    }

    #[test]
    fn objective_scaling_is_equivariant(seed in 0u64..10_000, lambda in 0.1f64..10.0) {
        let mut rng = stream_rng(seed, 1);
        let p = feasible_sdp(&mut rng, 8, 8);
        let mut q = p.clone();
        q.objective = q.objective.iter().map(|c| c.scale_real(lambda)).collect();
        let a = solve(&p, &opts()).unwrap().primal_value;
        let b = solve(&q, &opts()).unwrap().primal_value;
        prop_assert!((b - lambda * a).abs() <= 1e-7 * (1.0 + (lambda * a).abs()), "{} vs {}", b, lambda * a);
    }

    #[test]
    fn real_embedding_gives_the_same_optimum(seed in 0u64..10_000) {
        let mut rng = stream_rng(seed, 2);
        let p = feasible_sdp(&mut rng, 5, 6);
        let q = real_embedded(&p);
        let a = solve(&p, &opts()).unwrap();
        let b = solve(&q, &opts()).unwrap();
        prop_assert!(a.is_optimal() && b.is_optimal());
        prop_assert!((a.value() - b.value()).abs() <= 1e-6 * (1.0 + a.value().abs()));
    }
}
