//! Seeded random instances. Every generator takes an explicit RNG; streams
//! are derived from `(seed, stream)` so that trial `k` of a run does not
//! depend on how many numbers trial `k - 1` consumed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Algebra, LevelElement, Space};
use crate::choi::LinMap;
use crate::linalg::{op_norm, vnorm, CMatrix};
use crate::norms::TensorElement;

pub type Rng64 = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        let nv = vnorm(&v);
        if nv > 1e-8 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// Unitary from Gram-Schmidt on a Gaussian matrix, with column phases fixed
/// so that the distribution is Haar.
pub fn unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    'retry: loop {
        let g = gaussian_matrix(rng, d, d);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        for j in 0..d {
            let mut v = g.col_vec(j);
            for q in &cols {
                let dot = crate::linalg::vdot(q, &v);
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= dot * a;
                }
            }
            let nv = vnorm(&v);
            if nv < 1e-8 {
                continue 'retry;
            }
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
        return CMatrix::from_fn(d, d, |i, j| cols[j][i]);
    }
}

/// `G G^*` with `G` Gaussian of shape `d x rank`.
pub fn psd(rng: &mut impl Rng, d: usize, rank: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, rank);
    g.matmul_adjoint(&g).hermitian_part()
}

/// Gaussian element of an algebra.
pub fn element(rng: &mut impl Rng, alg: &Algebra) -> CMatrix {
    let blocks: Vec<CMatrix> = alg
        .blocks()
        .iter()
        .map(|&n| gaussian_matrix(rng, n, n))
        .collect();
    alg.from_blocks(&blocks).expect("shapes match")
}

/// Gaussian element of `M_n(V)`.
pub fn level_element(rng: &mut impl Rng, space: &Space, n: usize) -> LevelElement {
    let d = space.algebra.side();
    let m = space.algebra.project_pattern(&gaussian_matrix(rng, n * d, n * d));
    LevelElement::new(space.clone(), n, m).expect("pattern projected")
}

/// Positive element of `M_n(V)` (a cp associated map on the dual side).
pub fn positive_level_element(rng: &mut impl Rng, space: &Space, n: usize) -> LevelElement {
    if space.dual {
        let map = cp_map(rng, &space.algebra, &Algebra::full(n), None);
        LevelElement::from_associated_map(&map).expect("associated map has the right shape")
    } else {
        let blocks: Vec<CMatrix> = space
            .algebra
            .blocks()
            .iter()
            .map(|&nb| psd(rng, n * nb, n * nb))
            .collect();
        let amp = CMatrix::direct_sum(&blocks);
        let m = space.algebra.amplified_to_level(n, &amp);
        LevelElement::new(space.clone(), n, m).expect("pattern respected")
    }
}

/// Map with Gaussian Choi blocks.
pub fn linear_map(rng: &mut impl Rng, source: &Algebra, target: &Algebra) -> LinMap {
    let choi = source
        .blocks()
        .iter()
        .map(|&nb| {
            target
                .blocks()
                .iter()
                .map(|&mc| gaussian_matrix(rng, nb * mc, nb * mc))
                .collect()
        })
        .collect();
    LinMap::from_choi(source.clone(), target.clone(), choi).expect("shapes match")
}

/// cp map with Choi blocks `W W^*`; `rank` defaults to full.
pub fn cp_map(rng: &mut impl Rng, source: &Algebra, target: &Algebra, rank: Option<usize>) -> LinMap {
    let choi = source
        .blocks()
        .iter()
        .map(|&nb| {
            target
                .blocks()
                .iter()
                .map(|&mc| psd(rng, nb * mc, rank.unwrap_or(nb * mc)))
                .collect()
        })
        .collect();
    LinMap::from_choi(source.clone(), target.clone(), choi).expect("shapes match")
}

/// cp map scaled so that `‖T(1)‖ ≤ 1`, with the bound attained.
pub fn ccp_map(rng: &mut impl Rng, source: &Algebra, target: &Algebra) -> LinMap {
    let t = cp_map(rng, source, target, None);
    let n = op_norm(&t.image_of_unit()).expect("finite");
    t.scale(Complex64::new(1.0 / n, 0.0))
}

/// Gaussian tensor in `M_n(V ⊗ W)`.
pub fn tensor(rng: &mut impl Rng, left: &Space, right: &Space, n: usize) -> TensorElement {
    let len = n * n * left.algebra.dim() * right.algebra.dim();
    let coeffs = (0..len).map(|_| gaussian(rng)).collect();
    TensorElement::from_flat(left.clone(), right.clone(), n, coeffs).expect("length matches")
}

/// Algebra with total side at most `max_side` and at most `max_blocks`
/// blocks.
pub fn algebra(rng: &mut impl Rng, max_side: usize, max_blocks: usize) -> Algebra {
    let side = rng.gen_range(1..=max_side.max(1));
    let k = rng.gen_range(1..=max_blocks.max(1)).min(side);
    let mut blocks = vec![1; k];
    for _ in k..side {
        let b = rng.gen_range(0..k);
        blocks[b] += 1;
    }
    Algebra::new(blocks).expect("positive sizes")
}
