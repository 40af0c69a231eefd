use decnorm::linalg::{
    cholesky_lower, eig_hermitian, eigh, kron, op_norm, psd_check, trace_norm, CMatrix, HermitianMatrix, C0,
    C1,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn swap4() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            s[(i * 2 + j, j * 2 + i)] = C1;
        }
    }
    s
}

/// Characteristic polynomial coefficients by Faddeev-LeVerrier, highest degree first.
fn char_poly(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![C1];
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&m);
        let c_prev = coeffs[k - 1];
        for i in 0..n {
            next[(i, i)] += c_prev;
        }
        m = next;
        let am = a.matmul(&m);
        coeffs.push(-am.trace() / k as f64);
    }
    coeffs
}

#[test]
fn swap_eigenvalues_match_characteristic_polynomial() {
    let s = swap4();
    // (x+1)(x-1)^3 = x^4 - 2x^3 + 2x - 1
    let cp = char_poly(&s);
    let expected = [1.0, -2.0, 0.0, 2.0, -1.0];
    for (c, e) in cp.iter().zip(expected) {
        assert!((c - Complex64::new(e, 0.0)).norm() < 1e-12, "{cp:?}");
    }
    let eig = eig_hermitian(&HermitianMatrix::from_square(&s)).unwrap();
    let want = [-1.0, 1.0, 1.0, 1.0];
    for (l, w) in eig.values.iter().zip(want) {
        assert!((l - w).abs() < 1e-12);
    }
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn square(n: usize) -> impl Strategy<Value = CMatrix> {
    complex_entries(n * n).prop_map(move |d| CMatrix::from_vec(n, n, d).unwrap())
}

fn rect(r: usize, c: usize) -> impl Strategy<Value = CMatrix> {
    complex_entries(r * c).prop_map(move |d| CMatrix::from_vec(r, c, d).unwrap())
}

fn int_rect(r: usize, c: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-9i32..10, -9i32..10), r * c).prop_map(move |v| {
        let d = v.into_iter().map(|(a, b)| Complex64::new(a as f64, b as f64)).collect();
        CMatrix::from_vec(r, c, d).unwrap()
    })
}

fn hermitian() -> impl Strategy<Value = HermitianMatrix> {
    (1usize..=12)
        .prop_flat_map(square)
        .prop_map(|m| HermitianMatrix::new(&m).unwrap())
}

/// Unitary from Gram-Schmidt on a random square matrix.
fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    square(n).prop_map(move |m| {
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..n {
            let mut v = m.col_vec(j);
            v[j] += Complex64::new(3.0, 0.0);
            for q in &cols {
                let d: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= d * a;
                }
            }
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
        CMatrix::from_fn(n, n, |i, j| cols[j][i])
    })
}

/// Also checks the degenerate spectra produced by repeated eigenvalues.
fn degenerate_hermitian() -> impl Strategy<Value = HermitianMatrix> {
    (2usize..=8)
        .prop_flat_map(|n| (unitary(n), prop::collection::vec(0i32..3, n)))
        .prop_map(|(u, ev)| {
            let d = CMatrix::from_real_diag(&ev.iter().map(|&x| x as f64).collect::<Vec<_>>());
            HermitianMatrix::new(&u.matmul(&d).matmul_adjoint(&u)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(m in hermitian()) {
        let e = eig_hermitian(&m).unwrap();
        let d = m.dim();
        prop_assert!(e.reconstruct().max_abs_diff(m.as_matrix()) <= 1e-8);
        let uu = e.vectors.matmul_adjoint(&e.vectors);
        prop_assert!(uu.max_abs_diff(&CMatrix::identity(d)) <= 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_reconstructs_degenerate(m in degenerate_hermitian()) {
        let e = eig_hermitian(&m).unwrap();
        let d = m.dim();
        prop_assert!(e.reconstruct().max_abs_diff(m.as_matrix()) <= 1e-8);
        let uu = e.vectors.matmul_adjoint(&e.vectors);
        prop_assert!(uu.max_abs_diff(&CMatrix::identity(d)) <= 1e-9);
    }

    #[test]
    fn op_norm_unitarily_invariant(
        (m, u, v) in (1usize..=6).prop_flat_map(|n| (square(n), unitary(n), unitary(n)))
    ) {
        let a = op_norm(&m).unwrap();
        let b = op_norm(&u.matmul(&m).matmul(&v)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn op_norm_submultiplicative(
        (a, b) in (1usize..=6).prop_flat_map(|n| (square(n), square(n)))
    ) {
        let ab = op_norm(&a.matmul(&b)).unwrap();
        prop_assert!(ab <= op_norm(&a).unwrap() * op_norm(&b).unwrap() + 1e-9);
    }

    // Integer entries keep every product exact, so equality is bitwise.
    #[test]
    fn kron_associative(a in int_rect(2, 3), b in int_rect(3, 2), c in int_rect(2, 2)) {
        let l = kron(&kron(&a, &b), &c);
        let r = kron(&a, &kron(&b, &c));
        prop_assert!(l == r);
    }

    #[test]
    fn kron_mixed_product(
        (a, b, c, d) in prop_oneof![Just(2usize), Just(3usize)]
            .prop_flat_map(|n| (square(n), square(n), square(n), square(n)))
    ) {
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn trace_norm_dominates_trace(m in (1usize..=8).prop_flat_map(square)) {
        prop_assert!(trace_norm(&m).unwrap() >= m.trace().norm() - 1e-12);
    }

    #[test]
    fn psd_check_agrees_with_gram_construction(m in (1usize..=6).prop_flat_map(|n| rect(n, 2))) {
        let g = m.matmul_adjoint(&m);
        let chk = psd_check(&HermitianMatrix::new(&g).unwrap(), 1e-10).unwrap();
        prop_assert!(chk.is_psd);
        let neg = HermitianMatrix::new(&g.scale_real(-1.0)).unwrap();
        let chk = psd_check(&neg, 1e-10).unwrap();
        prop_assert_eq!(chk.is_psd, g.max_abs() < 1e-10);
    }
}

#[test]
fn adjoint_is_involutive() {
    let m = CMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64, j as f64 - 0.5));
    assert_eq!(m.adjoint().adjoint(), m);
    assert_eq!(CMatrix::zeros(0, 3).adjoint().shape(), (3, 0));
    assert_eq!(C0, Complex64::new(0.0, 0.0));
}

/// Nearly diagonal input on which a plain QR pass mixes the two eigenvectors.
#[test]
fn eigh_on_nearly_diagonal_matrix() {
    let k = CMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(0.001207141895850338, 6.842277657836021e-49),
            Complex64::new(-7.694641770514517e-18, -8.058343822000735e-18),
            Complex64::new(-7.694641770514519e-18, 8.058343822000733e-18),
            Complex64::new(0.010341138828749855, 0.0),
        ],
    )
    .unwrap();
    let e = eigh(&k).unwrap();
    assert!((e.values[0] - 0.001207141895850338).abs() < 1e-15);
    assert!((e.values[1] - 0.010341138828749855).abs() < 1e-15);
    let rec = e.vectors.matmul(&CMatrix::from_real_diag(&e.values).matmul_adjoint(&e.vectors));
    assert!((&rec - &k.hermitian_part()).max_abs() < 1e-15);
}

#[test]
fn cholesky_rejects_indefinite_complex_matrix() {
    let x = CMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(0.4973441078250689, 0.0),
            Complex64::new(-0.02802934895982845, -0.029078815967724398),
            Complex64::new(-0.02802934895982845, 0.029078815967724398),
            Complex64::new(0.0031003512324604137, 0.0),
        ],
    )
    .unwrap();
    assert!(cholesky_lower(&x).is_none());
    let pd = &x + &CMatrix::identity(2).scale_real(1e-3);
    let l = cholesky_lower(&pd).unwrap();
    assert!((&l.matmul_adjoint(&l) - &pd).max_abs() < 1e-15);
}
