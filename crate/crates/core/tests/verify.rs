use decnorm::algebra::{Algebra, Space};
use decnorm::norms::{NormOptions, TensorElement};
use decnorm::random::stream_rng;
use decnorm::verify::gen::{rank_one_positive_instance, unitary_instance};
use decnorm::verify::{cross_check_projective, run_suite, run_trial, suite_info, SuiteConfig, SuiteReport, SUITES};

fn cfg(dims: usize, trials: usize, seed: u64) -> SuiteConfig {
    SuiteConfig {
        dims,
        trials,
        seed,
        ..SuiteConfig::default()
    }
}

fn json(r: &SuiteReport) -> String {
    serde_json::to_string(&r.without_timing()).unwrap()
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let err = run_suite("no-such-suite", &SuiteConfig::default()).unwrap_err();
    assert!(err.to_string().contains("unknown suite"));
    assert!(suite_info("unitary").is_ok());
    assert_eq!(SUITES.len(), 14);
}

#[test]
fn reports_are_deterministic() {
    for name in ["cone-arith", "unitary", "duality2"] {
        let c = cfg(3, 6, 42);
        let a = run_suite(name, &c).unwrap();
        let b = run_suite(name, &c).unwrap();
        assert_eq!(json(&a), json(&b), "{name}");
        let par = run_suite(name, &SuiteConfig { workers: 3, ..c.clone() }).unwrap();
        assert_eq!(a.without_timing().failures, par.without_timing().failures);
        assert_eq!(a.quantities, par.quantities, "{name}");
        let other = run_suite(name, &SuiteConfig { seed: 43, ..c }).unwrap();
        assert_ne!(a.quantities, other.quantities, "{name}: seed should matter");
    }
}

#[test]
fn single_trials_match_the_suite() {
    let c = cfg(3, 4, 5);
    let report = run_suite("subcross", &c).unwrap();
    let mut worst = 0.0f64;
    for t in 0..c.trials {
        let o = run_trial("subcross", &c, t).unwrap();
        assert!(o.error.is_none());
        for ch in &o.checks {
            worst = worst.max(ch.violation);
        }
    }
    assert_eq!(worst, report.max_violation);
}

#[test]
fn cone_arith_is_exact_on_scalars() {
    let r = run_suite("cone-arith", &SuiteConfig { level: 1, ..cfg(1, 20, 0) }).unwrap();
    assert!(r.passed(), "{}", r.table());
    assert!(r.max_violation <= 1e-12, "{}", r.max_violation);
}

#[test]
fn unitary_suite_example() {
    let r = run_suite("unitary", &cfg(4, 25, 7)).unwrap();
    assert!(r.passed(), "{}", r.table());
    assert!(r.max_violation <= 1e-4);
}

#[test]
fn positive_lemma_suite_example() {
    let r = run_suite("positive-lemma", &cfg(3, 50, 1)).unwrap();
    assert!(r.passed(), "{}", r.table());
    assert!(r.max_violation <= 1e-4);
}

#[test]
fn passing_matches_the_declared_tolerance() {
    for name in ["regularity", "cone-arith", "ell2-coincide", "factorization"] {
        let r = run_suite(name, &cfg(3, 8, 11)).unwrap();
        let (_, tol) = suite_info(name).unwrap();
        assert_eq!(r.tolerance, tol);
        assert_eq!(r.failures.is_empty(), r.max_violation <= tol, "{name}");
        assert!(r.table().contains(name));
    }
}

#[test]
fn reports_round_trip_and_write_infinite_violation_as_null() {
    let r = run_suite("regularity", &cfg(2, 3, 0)).unwrap();
    let back: SuiteReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);

    let mut broken = r.clone();
    broken.max_violation = f64::INFINITY;
    let v: serde_json::Value = serde_json::to_value(&broken).unwrap();
    assert!(v["max_violation"].is_null());
    let back: SuiteReport = serde_json::from_value(v).unwrap();
    assert_eq!(back.max_violation, f64::INFINITY);
}

#[test]
fn projective_cross_check_examples() {
    let opts = NormOptions::default();
    let mut rng = stream_rng(3, 0);
    let z = unitary_instance(&mut rng, 3, 2);
    let c = cross_check_projective(&z, &opts).unwrap();
    assert!((c.delta_ball_value - 1.0).abs() < 1e-4, "{c:?}");
    assert!((c.cb_ball_value - 1.0).abs() < 1e-4, "{c:?}");

    let z = rank_one_positive_instance(&mut rng, 3, 2);
    let c = cross_check_projective(&z, &opts).unwrap();
    assert!((c.delta_ball_value - 1.0).abs() < 1e-4, "{c:?}");
    assert!((c.cb_ball_value - 1.0).abs() < 1e-4, "{c:?}");

    let zero = TensorElement::zero(Space::primal(Algebra::diagonal(2)), Space::dual(Algebra::full(2)), 1);
    let c = cross_check_projective(&zero, &opts).unwrap();
    assert_eq!((c.delta_ball_value, c.cb_ball_value), (0.0, 0.0));
}
