use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Algebra, LevelElement, Space};
use crate::choi::LinMap;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C0, C1};

/// `z ∈ M_n(V ⊗ W)` as coefficients `z[i][j][p][q]` against the matrix-unit
/// bases of the two legs. On a dual leg the basis element `p = (b, s, t)` is
/// the functional with matrix `e_{st}`, i.e. `a ↦ a_{ts}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    left: Space,
    right: Space,
    level: usize,
    coeffs: Vec<Complex64>,
}

impl TensorElement {
    pub fn from_flat(left: Space, right: Space, level: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::domain("level must be at least 1"));
        }
        let want = level * level * left.algebra.dim() * right.algebra.dim();
        if coeffs.len() != want {
            return Err(Error::domain(format!(
                "expected {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            left,
            right,
            level,
            coeffs,
        })
    }

    pub fn new(left: Space, right: Space, level: usize, coeffs: Vec<Vec<Vec<Vec<Complex64>>>>) -> Result<Self> {
        let (p, q) = (left.algebra.dim(), right.algebra.dim());
        let shape_ok = coeffs.len() == level
            && coeffs.iter().all(|row| {
                row.len() == level
                    && row
                        .iter()
                        .all(|c| c.len() == p && c.iter().all(|v| v.len() == q))
            });
        if !shape_ok {
            return Err(Error::domain(format!(
                "coefficient array must have shape {level}x{level}x{p}x{q}"
            )));
        }
        let flat = coeffs.into_iter().flatten().flatten().flatten().collect();
        Self::from_flat(left, right, level, flat)
    }

    pub fn zero(left: Space, right: Space, level: usize) -> Self {
        let len = level * level * left.algebra.dim() * right.algebra.dim();
        Self::from_flat(left, right, level, vec![C0; len]).expect("length matches")
    }

    pub fn from_fn(
        left: Space,
        right: Space,
        level: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Result<Self> {
        let (pd, qd) = (left.algebra.dim(), right.algebra.dim());
        let mut coeffs = Vec::with_capacity(level * level * pd * qd);
        for i in 0..level {
            for j in 0..level {
                for p in 0..pd {
                    for q in 0..qd {
                        coeffs.push(f(i, j, p, q));
                    }
                }
            }
        }
        Self::from_flat(left, right, level, coeffs)
    }

    /// `Σ_{pq} (e_{pq})^* ⊗ e_{pq}` in `A^* ⊗ A`, whose associated map is the
    /// identity.
    pub fn identity(alg: &Algebra) -> Self {
        let mut z = Self::zero(Space::dual(alg.clone()), Space::primal(alg.clone()), 1);
        for u in alg.units() {
            let p = alg.unit_index(u.block, u.col, u.row);
            let q = alg.unit_index(u.block, u.row, u.col);
            z.set(0, 0, p, q, C1);
        }
        z
    }

    /// `v ⊗ w` at level `k l`, entry `((a, c), (b, d)) = v_{ab} ⊗ w_{cd}`.
    pub fn elementary(v: &LevelElement, w: &LevelElement) -> Self {
        let (k, l) = (v.level(), w.level());
        let va = &v.space().algebra;
        let wa = &w.space().algebra;
        let vc: Vec<Vec<Vec<Complex64>>> = (0..k)
            .map(|a| (0..k).map(|b| va.coefficients(&v.slot(a, b))).collect())
            .collect();
        let wc: Vec<Vec<Vec<Complex64>>> = (0..l)
            .map(|c| (0..l).map(|d| wa.coefficients(&w.slot(c, d))).collect())
            .collect();
        Self::from_fn(v.space().clone(), w.space().clone(), k * l, |i, j, p, q| {
            let (a, c) = (i / l, i % l);
            let (b, d) = (j / l, j % l);
            vc[a][b][p] * wc[c][d][q]
        })
        .expect("shapes match")
    }

    pub fn left(&self) -> &Space {
        &self.left
    }

    pub fn right(&self) -> &Space {
        &self.right
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn index(&self, i: usize, j: usize, p: usize, q: usize) -> usize {
        let (pd, qd) = (self.left.algebra.dim(), self.right.algebra.dim());
        ((i * self.level + j) * pd + p) * qd + q
    }

    pub fn coeff(&self, i: usize, j: usize, p: usize, q: usize) -> Complex64 {
        self.coeffs[self.index(i, j, p, q)]
    }

    pub fn set(&mut self, i: usize, j: usize, p: usize, q: usize, v: Complex64) {
        let k = self.index(i, j, p, q);
        self.coeffs[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| *z == C0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.left != other.left || self.right != other.right || self.level != other.level {
            return Err(Error::domain("tensors live in different spaces or levels"));
        }
        Ok(())
    }

    pub fn combine(&self, lambda: Complex64, other: &Self, mu: Complex64) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| lambda * a + mu * b)
            .collect();
        Self::from_flat(self.left.clone(), self.right.clone(), self.level, coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(C1, other, C1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(C1, other, -C1)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|z| z * s).collect(),
            ..self.clone()
        }
    }

    /// Index of the transposed matrix unit.
    fn transposed_units(alg: &Algebra) -> Vec<usize> {
        alg.units()
            .map(|u| alg.unit_index(u.block, u.col, u.row))
            .collect()
    }

    /// `z^*`: coefficients `conj(z[j][i][p^*][q^*])`.
    pub fn adjoint(&self) -> Self {
        let pt = Self::transposed_units(&self.left.algebra);
        let qt = Self::transposed_units(&self.right.algebra);
        Self::from_fn(self.left.clone(), self.right.clone(), self.level, |i, j, p, q| {
            self.coeff(j, i, pt[p], qt[q]).conj()
        })
        .expect("same shape")
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// The same element of `M_n(W ⊗ V)`.
    pub fn flip(&self) -> Self {
        Self::from_fn(self.right.clone(), self.left.clone(), self.level, |i, j, q, p| {
            self.coeff(i, j, p, q)
        })
        .expect("same size")
    }

    /// `diag(z1, z2)` at level `n1 + n2`.
    pub fn direct_sum(z1: &Self, z2: &Self) -> Result<Self> {
        if z1.left != z2.left || z1.right != z2.right {
            return Err(Error::domain("direct sum needs tensors over the same spaces"));
        }
        let n1 = z1.level;
        Self::from_fn(z1.left.clone(), z1.right.clone(), n1 + z2.level, |i, j, p, q| {
            match (i < n1, j < n1) {
                (true, true) => z1.coeff(i, j, p, q),
                (false, false) => z2.coeff(i - n1, j - n1, p, q),
                _ => C0,
            }
        })
    }

    /// `[[a, b], [c, d]]` at level `2n`.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        a.check_same(b)?;
        a.check_same(c)?;
        a.check_same(d)?;
        let n = a.level;
        Self::from_fn(a.left.clone(), a.right.clone(), 2 * n, |i, j, p, q| {
            let part = match (i < n, j < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            part.coeff(i % n, j % n, p, q)
        })
    }

    /// `α z α^*` for `α ∈ M_{m,n}`.
    pub fn conjugate(&self, alpha: &CMatrix) -> Result<Self> {
        if alpha.cols() != self.level || alpha.rows() == 0 {
            return Err(Error::domain(format!(
                "conjugating matrix must be mx{}, got {:?}",
                self.level,
                alpha.shape()
            )));
        }
        let m = alpha.rows();
        let n = self.level;
        let (pd, qd) = (self.left.algebra.dim(), self.right.algebra.dim());
        let block = pd * qd;
        // (α Z)_{i r'} then (· α^*)_{i j}
        let mut tmp = vec![C0; m * n * block];
        for i in 0..m {
            for r in 0..n {
                let a = alpha[(i, r)];
                if a == C0 {
                    continue;
                }
                for rp in 0..n {
                    let src = (r * n + rp) * block;
                    let dst = (i * n + rp) * block;
                    for k in 0..block {
                        tmp[dst + k] += a * self.coeffs[src + k];
                    }
                }
            }
        }
        let mut out = vec![C0; m * m * block];
        for i in 0..m {
            for j in 0..m {
                let dst = (i * m + j) * block;
                for rp in 0..n {
                    let a = alpha[(j, rp)].conj();
                    if a == C0 {
                        continue;
                    }
                    let src = (i * n + rp) * block;
                    for k in 0..block {
                        out[dst + k] += a * tmp[src + k];
                    }
                }
            }
        }
        Self::from_flat(self.left.clone(), self.right.clone(), m, out)
    }

    /// `Ψ_n(z)`: the map `a ↦ [Σ_{pq} z[i][j][p][q] f_p(a) w_q]` from the
    /// base of the (dual) left leg into `M_n` of the right algebra, in the
    /// amplified layout.
    pub fn associated_map(&self) -> Result<LinMap> {
        if !self.left.dual {
            return Err(Error::domain("associated map needs a dual left leg"));
        }
        let a = &self.left.algebra;
        let b = &self.right.algebra;
        let n = self.level;
        let target = b.amplified(n);
        let mut choi = Vec::with_capacity(a.num_blocks());
        for (ba, &nb) in a.blocks().iter().enumerate() {
            let mut row = Vec::with_capacity(b.num_blocks());
            for (c, &mc) in b.blocks().iter().enumerate() {
                let w = n * mc;
                let mut m = CMatrix::zeros(nb * w, nb * w);
                for s in 0..nb {
                    for t in 0..nb {
                        // f_p(e_{st}) = 1 for p = (ba, t, s)
                        let p = a.unit_index(ba, t, s);
                        for i in 0..n {
                            for j in 0..n {
                                for k in 0..mc {
                                    for l in 0..mc {
                                        let q = b.unit_index(c, k, l);
                                        m[(s * w + i * mc + k, t * w + j * mc + l)] =
                                            self.coeff(i, j, p, q);
                                    }
                                }
                            }
                        }
                    }
                }
                row.push(m);
            }
            choi.push(row);
        }
        LinMap::from_choi(a.clone(), target, choi)
    }

    /// Inverse of [`TensorElement::associated_map`]; `right` names the right
    /// leg (its algebra must match the map's target).
    pub fn from_associated_map(map: &LinMap, right: Space) -> Result<Self> {
        let a = map.source().clone();
        let b = right.algebra.clone();
        let tb = map.target();
        if tb.num_blocks() != b.num_blocks() || tb.side() % b.side() != 0 {
            return Err(Error::domain("map target is not an amplification of the right leg"));
        }
        let n = tb.side() / b.side();
        if *tb != b.amplified(n) {
            return Err(Error::domain("map target is not an amplification of the right leg"));
        }
        let mut z = Self::zero(Space::dual(a.clone()), right, n);
        for (ba, &nb) in a.blocks().iter().enumerate() {
            for (c, &mc) in b.blocks().iter().enumerate() {
                let w = n * mc;
                let m = map.choi_block(ba, c);
                for s in 0..nb {
                    for t in 0..nb {
                        let p = a.unit_index(ba, t, s);
                        for i in 0..n {
                            for j in 0..n {
                                for k in 0..mc {
                                    for l in 0..mc {
                                        let q = b.unit_index(c, k, l);
                                        z.set(i, j, p, q, m[(s * w + i * mc + k, t * w + j * mc + l)]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(z)
    }

    /// `[⟨T, z_{ij}⟩]` for `z ∈ M_n(A ⊗ B^*)` and `T: A → B`, with
    /// `⟨T, a ⊗ f⟩ = f(T(a))`.
    pub fn pairing(&self, t: &LinMap) -> Result<CMatrix> {
        if self.left.dual || !self.right.dual {
            return Err(Error::domain("pairing needs a tensor in A ⊗ B*"));
        }
        if *t.source() != self.left.algebra || *t.target() != self.right.algebra {
            return Err(Error::domain("map does not act between the tensor's legs"));
        }
        let a = &self.left.algebra;
        let b = &self.right.algebra;
        let n = self.level;
        let mut out = CMatrix::zeros(n, n);
        for ua in a.units() {
            let p = a.unit_index(ua.block, ua.row, ua.col);
            for ub in b.units() {
                let q = b.unit_index(ub.block, ub.row, ub.col);
                let mc = b.block_size(ub.block);
                // tr(e_{uv} T(e_{st})) = T(e_{st})[v, u]
                let v = t.choi_block(ua.block, ub.block)
                    [(ua.row * mc + ub.col, ua.col * mc + ub.row)];
                if v == C0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] += self.coeff(i, j, p, q) * v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(Φ ⊗ id)(z)` for `Φ` acting on a primal left leg.
    pub fn apply_left(&self, phi: &LinMap) -> Result<Self> {
        if self.left.dual || *phi.source() != self.left.algebra {
            return Err(Error::domain("map must act on the primal left leg"));
        }
        let images: Vec<Vec<Complex64>> = phi
            .basis_images()
            .iter()
            .map(|m| phi.target().coefficients(m))
            .collect();
        let tgt = phi.target().clone();
        let pd = self.left.algebra.dim();
        Self::from_fn(Space::primal(tgt), self.right.clone(), self.level, |i, j, p2, q| {
            (0..pd).map(|p| self.coeff(i, j, p, q) * images[p][p2]).sum()
        })
    }

    /// `(id ⊗ Φ)(z)` for `Φ` acting on a primal right leg.
    pub fn apply_right(&self, phi: &LinMap) -> Result<Self> {
        if self.right.dual || *phi.source() != self.right.algebra {
            return Err(Error::domain("map must act on the primal right leg"));
        }
        Ok(self.flip().apply_left(phi)?.flip())
    }
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    left: Space,
    right: Space,
    level: usize,
    coeffs: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl Serialize for TensorElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (n, pd, qd) = (self.level, self.left.algebra.dim(), self.right.algebra.dim());
        let coeffs = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..pd)
                            .map(|p| (0..qd).map(|q| {
                                let z = self.coeff(i, j, p, q);
                                [z.re, z.im]
                            }).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        TensorRepr {
            left: self.left.clone(),
            right: self.right.clone(),
            level: n,
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TensorRepr::deserialize(d)?;
        let coeffs = r
            .coeffs
            .into_iter()
            .map(|a| {
                a.into_iter()
                    .map(|b| {
                        b.into_iter()
                            .map(|c| c.into_iter().map(|v| Complex64::new(v[0], v[1])).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        TensorElement::new(r.left, r.right, r.level, coeffs).map_err(serde::de::Error::custom)
    }
}
