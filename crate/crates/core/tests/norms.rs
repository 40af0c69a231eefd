use decnorm::algebra::{Algebra, LevelElement, Space};
use decnorm::choi::{block2x2, LinMap};
use decnorm::linalg::{op_norm, CMatrix, C1};
use decnorm::norms::{
    big_delta_norm, big_delta_primal_upper, cb_norm, cone_member_big_delta, cone_member_delta, dec_norm, decompose,
    delta_norm, delta_sampled_lower, elementary_nonempty_witness, inj_norm, nonempty_witness, TensorElement,
};
use decnorm::random::{cp_map, linear_map, positive_level_element, psd, stream_rng};
use decnorm::verify::gen::{
    cp_tensor, dual_primal_tensor, isometry, primal_dual_tensor, small_algebra, unitary_instance,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn map_tensor(t: &LinMap) -> TensorElement {
    TensorElement::from_associated_map(t, Space::primal(t.target().clone())).unwrap()
}

fn state(rng: &mut impl rand::Rng, d: usize) -> LevelElement {
    let rho = psd(rng, d, d);
    let tr = rho.trace().re;
    LevelElement::new(Space::dual(Algebra::full(d)), 1, rho.scale_real(1.0 / tr)).unwrap()
}

fn with_norm_one(x: LevelElement) -> LevelElement {
    let s = x.level_norm().unwrap();
    x.scale(c(1.0 / s))
}

#[test]
fn associated_map_examples() {
    let m2 = Algebra::full(2);
    assert_eq!(TensorElement::identity(&m2).associated_map().unwrap(), LinMap::identity(&m2));

    // f ⊗ b gives a ↦ f(a) b
    let mut rng = stream_rng(1, 0);
    let f = state(&mut rng, 2);
    let b = decnorm::random::level_element(&mut rng, &Space::primal(Algebra::full(3)), 1);
    let psi = TensorElement::elementary(&f, &b).associated_map().unwrap();
    let x = decnorm::random::element(&mut rng, &m2);
    let fx = f.matrix().matmul(&x).trace();
    assert!(psi.apply(&x).unwrap().max_abs_diff(&b.matrix().scale(fx)) < 1e-12);

    // the identity tensor with its right leg transposed gives the transpose map
    let id = TensorElement::identity(&m2);
    let swapped = TensorElement::from_fn(Space::dual(m2.clone()), Space::primal(m2.clone()), 1, |_, _, p, q| {
        id.coeff(0, 0, p, (q % 2) * 2 + q / 2)
    })
    .unwrap();
    assert_eq!(swapped.associated_map().unwrap(), LinMap::transpose(&m2));
}

#[test]
fn dec_norm_examples() {
    let m2 = Algebra::full(2);
    let id = dec_norm(&LinMap::identity(&m2), 1).unwrap();
    assert!((id.value - 1.0).abs() < 1e-6);
    let tr = dec_norm(&LinMap::transpose(&m2), 1).unwrap();
    assert!((tr.value - 2.0).abs() < 1e-5, "{}", tr.value);

    let mut rng = stream_rng(2, 0);
    let t = cp_map(&mut rng, &Algebra::new(vec![2, 1]).unwrap(), &m2, None);
    let unit_image = op_norm(&t.image_of_unit()).unwrap();
    let d = dec_norm(&t, 1).unwrap();
    assert!((d.value - unit_image).abs() < 1e-6 * (1.0 + unit_image));
    let w = d.witness.unwrap();
    assert!(w.block_margin(&t).unwrap() >= -1e-7 * (1.0 + unit_image));
}

#[test]
fn cb_norm_examples() {
    let m3 = Algebra::full(3);
    assert!((cb_norm(&LinMap::identity(&m3), 1).unwrap().value - 1.0).abs() < 1e-6);
    let tr = cb_norm(&LinMap::transpose(&Algebra::full(2)), 1).unwrap();
    assert!((tr.value - 2.0).abs() < 1e-5);
    assert!((tr.lower_bound - 2.0).abs() < 1e-5, "{}", tr.lower_bound);

    let mut rng = stream_rng(3, 0);
    let t = linear_map(&mut rng, &Algebra::full(2), &Algebra::new(vec![1, 1]).unwrap());
    let base = cb_norm(&t, 1).unwrap();
    assert!(base.lower_bound <= base.value + 1e-6);
    let lam = Complex64::new(-1.5, 2.0);
    let scaled = cb_norm(&t.scale(lam), 1).unwrap().value;
    assert!((scaled - lam.norm() * base.value).abs() < 1e-6 * (1.0 + scaled));
}

#[test]
fn injective_norm_examples() {
    let m2 = Algebra::full(2);
    assert!((inj_norm(&TensorElement::identity(&m2)).unwrap().value - 1.0).abs() < 1e-6);
    let mut rng = stream_rng(4, 0);
    let f = state(&mut rng, 2);
    let b = with_norm_one(decnorm::random::level_element(&mut rng, &Space::primal(Algebra::full(2)), 1));
    let fb = TensorElement::elementary(&f, &b);
    assert!((inj_norm(&fb).unwrap().value - 1.0).abs() < 1e-6);
    let zero = TensorElement::zero(Space::dual(m2.clone()), Space::primal(m2), 1);
    assert_eq!(inj_norm(&zero).unwrap().value, 0.0);
}

#[test]
fn delta_norm_examples() {
    let m2 = Algebra::full(2);
    assert!((delta_norm(&TensorElement::identity(&m2)).unwrap().value - 1.0).abs() < 1e-6);
    let tt = map_tensor(&LinMap::transpose(&m2));
    assert!((delta_norm(&tt).unwrap().value - 2.0).abs() < 1e-4);

    // the flipped shape gives the same value
    assert!((delta_norm(&tt.flip()).unwrap().value - 2.0).abs() < 1e-4);

    let mut rng = stream_rng(5, 0);
    let z = cp_tensor(&mut rng, &Algebra::full(2), &Algebra::new(vec![1, 1]).unwrap(), 2);
    let d = delta_norm(&z).unwrap();
    let inj = inj_norm(&z).unwrap();
    assert!((d.value - inj.value).abs() < 1e-4 * (1.0 + inj.value));
    assert!(d.sampled_lower <= d.value + 1e-6);
}

#[test]
fn big_delta_norm_examples() {
    let mut rng = stream_rng(6, 0);
    for (n, d) in [(2, 2), (3, 2), (2, 3)] {
        let z = unitary_instance(&mut rng, n, d);
        let b = big_delta_norm(&z).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-4, "{b:?}");
        assert!((b.upper - 1.0).abs() < 1e-4, "{b:?}");
    }

    for d in [2, 3] {
        let alg = Algebra::full(d);
        let unit = LevelElement::unit(Space::primal(alg.clone()), 1);
        let tau = LevelElement::new(Space::dual(alg), 1, CMatrix::identity(d).scale_real(1.0 / d as f64)).unwrap();
        let b = big_delta_norm(&TensorElement::elementary(&unit, &tau)).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-4 && (b.upper - 1.0).abs() < 1e-4, "{b:?}");
    }

    let m2 = Algebra::full(2);
    let zero = TensorElement::zero(Space::primal(m2.clone()), Space::dual(m2), 2);
    let b = big_delta_norm(&zero).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
}

#[test]
fn primal_upper_examples() {
    let mut rng = stream_rng(7, 0);
    let v = with_norm_one(positive_level_element(&mut rng, &Space::primal(Algebra::full(2)), 1));
    let w = with_norm_one(positive_level_element(&mut rng, &Space::dual(Algebra::full(2)), 1));
    let u = big_delta_primal_upper(&TensorElement::elementary(&v, &w)).unwrap();
    assert!(u.value <= 1.0 + 1e-6, "{u:?}");

    let z = unitary_instance(&mut rng, 3, 2);
    assert!(big_delta_primal_upper(&z).unwrap().value <= 1.0 + 1e-6);

    let m2 = Algebra::full(2);
    let zero = TensorElement::zero(Space::primal(m2.clone()), Space::dual(m2), 1);
    assert_eq!(big_delta_primal_upper(&zero).unwrap().value, 0.0);
}

#[test]
fn delta_cone_examples() {
    let m2 = Algebra::full(2);
    let id = TensorElement::identity(&m2);
    assert!(cone_member_delta(&id, 1e-9).unwrap());
    assert!(!cone_member_delta(&map_tensor(&LinMap::transpose(&m2)), 1e-9).unwrap());

    let mut rng = stream_rng(8, 0);
    let z = cp_tensor(&mut rng, &m2, &Algebra::full(2), 3);
    assert!(cone_member_delta(&z, 1e-9).unwrap());
    let alpha = decnorm::random::gaussian_matrix(&mut rng, 2, 3);
    assert!(cone_member_delta(&z.conjugate(&alpha).unwrap(), 1e-9).unwrap());
}

#[test]
fn big_delta_cone_examples() {
    let mut rng = stream_rng(9, 0);
    let f = state(&mut rng, 2);
    let b = positive_level_element(&mut rng, &Space::primal(Algebra::full(2)), 1);
    let fb = TensorElement::elementary(&f, &b);
    let m = cone_member_big_delta(&fb, 1e-8).unwrap();
    assert!(m.member);
    let w = m.witness.unwrap();
    assert_eq!(w.k, 1);
    assert!(w.error(&fb).unwrap() < 1e-8);

    let m2 = Algebra::full(2);
    let id = TensorElement::identity(&m2);
    let m = cone_member_big_delta(&id, 1e-8).unwrap();
    assert!(m.member);
    let w = m.witness.unwrap();
    assert!(w.k <= 2, "k = {}", w.k);
    assert!(w.is_positive(1e-8).unwrap() && w.error(&id).unwrap() < 1e-8);

    let tt = map_tensor(&LinMap::transpose(&m2));
    let m = cone_member_big_delta(&tt, 1e-8).unwrap();
    assert!(!m.member && !m.k_max_limited);

    for d in [2, 3] {
        let a = Algebra::full(d);
        let z = cp_tensor(&mut rng, &a, &Algebra::full(2), 1);
        let m = cone_member_big_delta(&z, 1e-8).unwrap();
        assert!(m.member);
        let w = m.witness.unwrap();
        assert!(w.k <= d * d);
        assert!(w.is_positive(1e-8).unwrap());
        assert!(w.error(&z).unwrap() <= 1e-8 * (1.0 + z.max_abs()));
    }
}

#[test]
fn nonempty_witness_examples() {
    let m2 = Algebra::full(2);
    let zero = TensorElement::zero(Space::dual(m2.clone()), Space::primal(m2.clone()), 2);
    let w = nonempty_witness(&zero).unwrap();
    assert!(w.u1.is_zero() && w.u2.is_zero());

    let mut rng = stream_rng(10, 0);
    let v = decnorm::random::level_element(&mut rng, &Space::primal(m2.clone()), 2);
    let x = decnorm::random::level_element(&mut rng, &Space::dual(Algebra::full(3)), 1);
    let (u1, u2) = elementary_nonempty_witness(&v, &x).unwrap();
    let z = TensorElement::elementary(&v, &x);
    let block = TensorElement::block2(&u1, &z, &z.adjoint(), &u2).unwrap();
    assert!(cone_member_delta(&block, 1e-8).unwrap());
}

#[test]
fn decompose_examples() {
    let mut rng = stream_rng(11, 0);
    let a = Algebra::full(2);
    let b = Algebra::new(vec![1, 2]).unwrap();
    let t = cp_map(&mut rng, &a, &b, None);
    let w = decompose(&t).unwrap();
    assert!((w.value - op_norm(&t.image_of_unit()).unwrap()).abs() < 1e-6 * (1.0 + w.value));
    assert!(w.block_margin(&t).unwrap() >= -1e-7);

    let p = cp_map(&mut rng, &a, &b, None);
    let q = cp_map(&mut rng, &a, &b, None);
    let diff = p.sub(&q).unwrap();
    let w = decompose(&diff).unwrap();
    let bound = op_norm(&p.add(&q).unwrap().image_of_unit()).unwrap();
    assert!(w.value <= bound + 1e-6 * (1.0 + bound));
    // the feasible pair used for the bound really is a witness
    let s = p.add(&q).unwrap();
    assert!(block2x2(&s, &diff, &s).unwrap().is_cp(1e-9).unwrap());

    let w = decompose(&LinMap::transpose(&a)).unwrap();
    assert!((w.value - 2.0).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn involution_preserves_dec_norm(seed in 0u64..100_000) {
        let mut rng = stream_rng(seed, 0);
        let a = small_algebra(&mut rng, 3);
        let b = small_algebra(&mut rng, 3);
        let t = linear_map(&mut rng, &a, &b);
        let d = dec_norm(&t, 1).unwrap().value;
        let ds = dec_norm(&t.adjoint_map(), 1).unwrap().value;
        prop_assert!((d - ds).abs() <= 1e-6 * (1.0 + d), "{} vs {}", d, ds);
    }

    #[test]
    fn dec_and_cb_coincide(seed in 0u64..100_000) {
        let mut rng = stream_rng(seed, 1);
        let a = small_algebra(&mut rng, 3);
        let b = small_algebra(&mut rng, 3);
        let t = linear_map(&mut rng, &a, &b);
        let d = dec_norm(&t, 1).unwrap().value;
        let cb = cb_norm(&t, 1).unwrap();
        prop_assert!((d - cb.value).abs() <= 1e-4 * (1.0 + d), "{} vs {}", d, cb.value);
        prop_assert!(cb.lower_bound <= cb.value + 1e-6);
    }

    #[test]
    fn delta_is_subadditive_and_diagonal_max(seed in 0u64..100_000, n in 1usize..3) {
        let mut rng = stream_rng(seed, 2);
        let a = small_algebra(&mut rng, 2);
        let b = small_algebra(&mut rng, 2);
        let z1 = dual_primal_tensor(&mut rng, &a, &b, n);
        let z2 = dual_primal_tensor(&mut rng, &a, &b, n);
        let n1 = delta_norm(&z1).unwrap().value;
        let n2 = delta_norm(&z2).unwrap().value;
        let sum = delta_norm(&z1.add(&z2).unwrap()).unwrap().value;
        prop_assert!(sum <= n1 + n2 + 1e-6 * (1.0 + n1 + n2));
        let diag = delta_norm(&TensorElement::direct_sum(&z1, &z2).unwrap()).unwrap().value;
        prop_assert!(diag <= n1.max(n2) + 1e-6 * (1.0 + n1.max(n2)), "{} vs {} {}", diag, n1, n2);
    }

    #[test]
    fn big_delta_is_subadditive(seed in 0u64..100_000) {
        let mut rng = stream_rng(seed, 3);
        let a = small_algebra(&mut rng, 2);
        let b = small_algebra(&mut rng, 2);
        let z1 = primal_dual_tensor(&mut rng, &a, &b, 1);
        let z2 = primal_dual_tensor(&mut rng, &a, &b, 1);
        let n1 = big_delta_norm(&z1).unwrap().upper;
        let n2 = big_delta_norm(&z2).unwrap().upper;
        let sum = big_delta_norm(&z1.add(&z2).unwrap()).unwrap().lower;
        prop_assert!(sum <= n1 + n2 + 1e-6 * (1.0 + n1 + n2));
    }

    #[test]
    fn delta_below_big_delta_and_pairing_bound(seed in 0u64..100_000, n in 1usize..3) {
        let mut rng = stream_rng(seed, 4);
        let a = small_algebra(&mut rng, 2);
        let b = small_algebra(&mut rng, 2);
        let z = primal_dual_tensor(&mut rng, &a, &b, n);
        let big = big_delta_norm(&z).unwrap();
        let small = delta_norm(&z).unwrap().value;
        prop_assert!(big.lower <= big.upper + 1e-6 * (1.0 + big.upper));
        prop_assert!(small <= big.upper + 1e-6 * (1.0 + big.upper));
        let t = linear_map(&mut rng, &a, &b);
        let dec = dec_norm(&t, 1).unwrap().value;
        let pairing = op_norm(&z.pairing(&t).unwrap()).unwrap();
        prop_assert!(pairing <= dec * big.upper * (1.0 + 1e-6) + 1e-6);
    }

    #[test]
    fn subcross_on_elementary_tensors(seed in 0u64..100_000, k in 1usize..3) {
        let mut rng = stream_rng(seed, 5);
        let a = small_algebra(&mut rng, 2);
        let b = small_algebra(&mut rng, 2);
        let v = decnorm::random::level_element(&mut rng, &Space::primal(a), k);
        let w = decnorm::random::level_element(&mut rng, &Space::dual(b), 1);
        let bound = v.level_norm().unwrap() * w.level_norm().unwrap();
        let z = TensorElement::elementary(&v, &w);
        prop_assert!(big_delta_norm(&z).unwrap().lower <= bound + 1e-6 * (1.0 + bound));
        prop_assert!(big_delta_primal_upper(&z).unwrap().value <= bound + 1e-6 * (1.0 + bound));
    }

    #[test]
    fn positive_chain(seed in 0u64..100_000, n in 1usize..3) {
        let mut rng = stream_rng(seed, 6);
        let a = small_algebra(&mut rng, 2);
        let b = small_algebra(&mut rng, 2);
        let z = cp_tensor(&mut rng, &a, &b, n);
        prop_assert!(cone_member_delta(&z, 1e-9).unwrap());
        let d = delta_norm(&z).unwrap().value;
        let inj = inj_norm(&z).unwrap().value;
        prop_assert!((d - inj).abs() <= 1e-4 * (1.0 + d));
        prop_assert!(delta_sampled_lower(&z, 32, seed).unwrap() <= d + 1e-6 * (1.0 + d));
        // −z is only a member when z vanishes
        prop_assert!(z.is_zero() || !cone_member_delta(&z.scale(-C1), 0.0).unwrap());
    }

    #[test]
    fn nonempty_witness_block_is_positive(seed in 0u64..100_000, n in 1usize..3) {
        let mut rng = stream_rng(seed, 7);
        let a = small_algebra(&mut rng, 3);
        let b = small_algebra(&mut rng, 3);
        let z = dual_primal_tensor(&mut rng, &a, &b, n);
        let w = nonempty_witness(&z).unwrap();
        prop_assert!(cone_member_delta(&w.u1, 1e-9).unwrap());
        prop_assert!(cone_member_delta(&w.u2, 1e-9).unwrap());
        prop_assert!(cone_member_delta(&w.block(&z).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn delta_cone_closed_under_compression(seed in 0u64..100_000, n in 1usize..4, k in 1usize..4) {
        let mut rng = stream_rng(seed, 8);
        let a = small_algebra(&mut rng, 2);
        let b = small_algebra(&mut rng, 2);
        let z = cp_tensor(&mut rng, &a, &b, n);
        let alpha = if k <= n { isometry(&mut rng, n, k).adjoint() } else { decnorm::random::gaussian_matrix(&mut rng, k, n) };
        prop_assert!(cone_member_delta(&z.conjugate(&alpha).unwrap(), 1e-8).unwrap());
    }
}
