//! Acceptance criteria 1 to 8. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::Value;

use decnorm::algebra::{Algebra, Space};
use decnorm::choi::{block2x2, LinMap};
use decnorm::linalg::CMatrix;
use decnorm::norms::{big_delta_norm, cb_norm, cone_member_big_delta, dec_norm, delta_norm, inj_norm};
use decnorm::random::{cp_map, stream_rng, tensor};
use decnorm::sdp::{check_certificate, solve, SolverOptions, Status};
use decnorm::verify::gen::{cp_tensor, feasible_sdp, small_algebra, unitary_instance};
use decnorm::verify::{run_suite, SuiteConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Largest singular value through nalgebra, independent of the crate's own
/// eigensolver.
fn spectral_norm(m: &CMatrix) -> f64 {
    let d = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    d.singular_values().max()
}

fn min_eig(m: &CMatrix) -> f64 {
    let d = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    d.symmetric_eigenvalues().min()
}

fn unitary() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(2024, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let n = rng.gen_range(2..=4);
        let d = rng.gen_range(2..=4);
        let z = unitary_instance(&mut rng, n, d);
        let b = match big_delta_norm(&z) {
            Ok(b) => b,
            Err(e) => return outcome(false, format!("n={n} d={d}: {e}")),
        };
        worst = worst.max((b.lower - 1.0).abs()).max((b.upper - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-4 && secs <= 60.0,
        format!("25 instances, max |bracket − 1| = {worst:.2e} (tol 1e-4), {secs:.1} s (limit 60 s)"),
    )
}

fn delta_equals_injective() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(2024, 2);
    let (mut gap, mut sampled_excess) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..50 {
        let a = small_algebra(&mut rng, 3);
        let b = small_algebra(&mut rng, 3);
        let n = rng.gen_range(1..=2);
        let z = cp_tensor(&mut rng, &a, &b, n);
        let (d, inj) = match (delta_norm(&z), inj_norm(&z)) {
            (Ok(d), Ok(i)) => (d, i),
            (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
        };
        gap = gap.max((d.value - inj.value).abs() / d.value.max(1.0));
        sampled_excess = sampled_excess.max(d.sampled_lower - d.value);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        gap <= 1e-4 && sampled_excess <= 1e-6 && secs <= 120.0,
        format!(
            "50 δ-cone members, max |δ − inj| = {gap:.2e} (tol 1e-4), max sampled − δ = {sampled_excess:.2e} (tol 1e-6), {secs:.1} s (limit 120 s)"
        ),
    )
}

fn duality_isometry() -> Outcome {
    let mut rng = stream_rng(2024, 3);
    let (mut by_construction, mut dec_cb) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=3);
        let level = rng.gen_range(1..=2);
        let z = tensor(&mut rng, &Space::dual(Algebra::diagonal(n)), &Space::primal(Algebra::full(d)), level);
        let psi = z.associated_map().expect("dual left leg");
        let r = (|| Ok::<_, decnorm::Error>((delta_norm(&z)?.value, dec_norm(&psi, 1)?.value, cb_norm(&psi, 1)?.value)))();
        let (delta, dec, cb) = match r {
            Ok(v) => v,
            Err(e) => return outcome(false, e.to_string()),
        };
        by_construction = by_construction.max((delta - dec).abs());
        dec_cb = dec_cb.max((dec - cb).abs() / dec.max(1.0));
    }
    outcome(
        by_construction <= 1e-9 && dec_cb <= 1e-4,
        format!("50 tensors over (ℓ∞^n)* ⊗ M_d, max |δ − dec Ψ| = {by_construction:.2e}, max |dec − cb| = {dec_cb:.2e} (tol 1e-4)"),
    )
}

fn suite_violations(names: &[&str], trials: usize) -> std::result::Result<(usize, f64, usize), String> {
    let (mut failures, mut worst, mut checks) = (0, 0.0f64, 0);
    for name in names {
        let cfg = SuiteConfig { dims: 3, level: 2, trials, seed: 2024, workers: workers() };
        let r = run_suite(name, &cfg).map_err(|e| e.to_string())?;
        failures += r.failures.len();
        worst = worst.max(r.max_violation);
        checks += r.checks;
    }
    Ok((failures, worst, checks))
}

fn order_and_subcross() -> Outcome {
    match suite_violations(&["delta-le-Delta", "subcross"], 200) {
        Ok((f, worst, checks)) => outcome(
            f == 0 && worst <= 1e-6,
            format!("200 trials per suite, {checks} checks, {f} failures, max violation {worst:.2e} (tol 1e-6)"),
        ),
        Err(e) => outcome(false, e),
    }
}

fn dec_golden() -> Outcome {
    let m2 = Algebra::full(2);
    let mut notes = Vec::new();
    let mut pass = true;

    let id = dec_norm(&LinMap::identity(&m2), 1).map(|d| d.value);
    let id_err = id.as_ref().map_or(f64::INFINITY, |v| (v - 1.0).abs());
    pass &= id_err <= 1e-6;
    notes.push(format!("identity |dec − 1| = {id_err:.2e}"));

    // hand-built bracket: S1 = S2 = tr(·) 1 from above, the unitary swap
    // mapped to Σ e_ij ⊗ e_ij from below
    let fx: Value = serde_json::from_str(include_str!("fixtures/transpose_dec_certificate.json")).unwrap();
    let t: LinMap = serde_json::from_value(fx["map"].clone()).unwrap();
    let s1: LinMap = serde_json::from_value(fx["upper"]["s1"].clone()).unwrap();
    let s2: LinMap = serde_json::from_value(fx["upper"]["s2"].clone()).unwrap();
    let block = block2x2(&s1, &t, &s2).unwrap();
    let block_min = min_eig(block.choi_block(0, 0));
    let upper = spectral_norm(&s1.image_of_unit()).max(spectral_norm(&s2.image_of_unit()));
    let x: CMatrix = serde_json::from_value(fx["lower"]["x"].clone()).unwrap();
    // slotwise transpose of the 2 × 2 grid of 2 × 2 slots
    let tx = CMatrix::from_fn(4, 4, |r, c| x[((r / 2) * 2 + c % 2, (c / 2) * 2 + r % 2)]);
    let lower = spectral_norm(&tx) / spectral_norm(&x);
    let cert_ok = block_min >= -1e-12 && (upper - 2.0).abs() < 1e-12 && (lower - 2.0).abs() < 1e-12;
    pass &= cert_ok;
    notes.push(format!("certificate [{lower:.6}, {upper:.6}]"));

    let tv = dec_norm(&t, 1).map(|d| d.value);
    let t_err = tv.as_ref().map_or(f64::INFINITY, |v| (v - 2.0).abs());
    pass &= t_err <= 1e-4;
    notes.push(format!("transpose |dec − 2| = {t_err:.2e}"));

    let mut rng = stream_rng(2024, 5);
    let mut cp_err = 0.0f64;
    for _ in 0..10 {
        let a = small_algebra(&mut rng, 3);
        let b = small_algebra(&mut rng, 3);
        let m = cp_map(&mut rng, &a, &b, None);
        let expect = spectral_norm(&m.image_of_unit());
        let got = dec_norm(&m, 1).map_or(f64::INFINITY, |d| d.value);
        cp_err = cp_err.max((got - expect).abs() / expect.max(1.0));
    }
    pass &= cp_err <= 1e-6;
    notes.push(format!("10 cp maps max |dec − ‖T(1)‖| = {cp_err:.2e}"));
    outcome(pass, notes.join(", "))
}

fn factorization() -> Outcome {
    let mut rng = stream_rng(2024, 6);
    let (mut worst, mut max_ratio, mut misses) = (0.0f64, 0.0f64, 0);
    for _ in 0..25 {
        let a = small_algebra(&mut rng, 3);
        let b = small_algebra(&mut rng, 3);
        let n = rng.gen_range(1..=2);
        let z = cp_tensor(&mut rng, &a, &b, n);
        let m = match cone_member_big_delta(&z, 1e-9) {
            Ok(m) => m,
            Err(e) => return outcome(false, e.to_string()),
        };
        let Some(w) = m.witness.filter(|_| m.member) else {
            misses += 1;
            continue;
        };
        max_ratio = max_ratio.max(w.k as f64 / (a.dim() * b.dim()) as f64);
        let psi = z.associated_map().unwrap();
        let err = w.compose(&b).map_or(f64::INFINITY, |sr| sr.max_abs_diff(&psi));
        worst = worst.max(err / psi.max_abs().max(1.0));
    }
    outcome(
        misses == 0 && max_ratio <= 1.0 && worst <= 1e-6,
        format!("25 cp tensors, {misses} without witness, max k/(dim A·dim B) = {max_ratio:.2}, max ‖S∘R − Ψ(z)‖ = {worst:.2e} (tol 1e-6)"),
    )
}

fn functoriality() -> Outcome {
    match suite_violations(&["functorial-cp", "functorial-dec"], 100) {
        Ok((f, worst, checks)) => outcome(
            f == 0 && worst <= 1e-6,
            format!("100 trials per suite, {checks} checks, {f} failures, max violation {worst:.2e} (tol 1e-6)"),
        ),
        Err(e) => outcome(false, e),
    }
}

fn solver_health() -> Outcome {
    let opts = SolverOptions::default();
    let (mut converged, mut worst_cert) = (0usize, 0.0f64);
    let total = 500;
    for trial in 0..total {
        let mut rng = stream_rng(2024, 1000 + trial as u64);
        let p = feasible_sdp(&mut rng, 30, 60);
        let Ok(s) = solve(&p, &opts) else { continue };
        if s.status == Status::Optimal {
            let c = check_certificate(&p, &s);
            worst_cert = worst_cert.max(c.primal_feas).max(c.dual_feas);
            if c.gap <= 1e-7 && s.iterations <= 100 {
                converged += 1;
            }
        }
    }
    let rate = converged as f64 / total as f64;
    outcome(
        rate >= 0.99 && worst_cert <= 1e-8,
        format!("{converged}/{total} reach gap ≤ 1e-7 (need 99%), worst certificate residual {worst_cert:.2e} (tol 1e-8)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("unitary tensors have Δ-norm 1", unitary),
        ("δ = injective on the δ-cone", delta_equals_injective),
        ("δ-norm through the associated map, dec = cb", duality_isometry),
        ("δ ≤ Δ and subcross", order_and_subcross),
        ("dec-norm golden values", dec_golden),
        ("cp tensors factor through M_k", factorization),
        ("functoriality under cp and decomposable maps", functoriality),
        ("solver health on feasible SDPs", solver_health),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "{} criterion {}: {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
