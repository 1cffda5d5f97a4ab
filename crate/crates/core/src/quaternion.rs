//! The algebra Σ of 2×2 complex matrices `[[s1, −s̄2], [s2, s̄1]]`, isomorphic to the
//! quaternions, and block matrices over it.

use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::{matrix_det, ComplexMatrix, C64, ZERO};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuaternionError {
    #[error("a {rows}x{cols} matrix cannot be split into 2x2 blocks")]
    NotBlockable { rows: usize, cols: usize },
    #[error("matrix is not Σ-structured (defect {0:e})")]
    NotSigma(f64),
}

/// Element of Σ stored by its first column.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SigmaMatrix {
    pub s1: C64,
    pub s2: C64,
}

impl SigmaMatrix {
    pub const fn new(s1: C64, s2: C64) -> Self {
        Self { s1, s2 }
    }

    pub fn identity() -> Self {
        Self::new(C64::new(1.0, 0.0), ZERO)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Reads the first column of the 2×2 block at `(2r, 2c)`; the rest is implied.
    pub fn from_block(m: &ComplexMatrix, r: usize, c: usize) -> Self {
        Self::new(m[(2 * r, 2 * c)], m[(2 * r + 1, 2 * c)])
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        [[self.s1, -self.s2.conj()], [self.s2, self.s1.conj()]]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let e = self.entries();
        ComplexMatrix::from_fn(2, 2, |i, j| e[i][j])
    }

    /// Conjugate transpose, again in Σ.
    pub fn adjoint(&self) -> Self {
        Self::new(self.s1.conj(), -self.s2)
    }

    /// Quaternion length, `√det`.
    pub fn norm(&self) -> f64 {
        sigma_det(self).sqrt()
    }

    /// `None` for the zero element, the only non-invertible one.
    pub fn inverse(&self) -> Option<Self> {
        let d = sigma_det(self);
        (d > 0.0).then(|| self.adjoint().scale(1.0 / d))
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new(self.s1 * a, self.s2 * a)
    }
}

impl Mul for SigmaMatrix {
    type Output = SigmaMatrix;
    fn mul(self, t: SigmaMatrix) -> SigmaMatrix {
        // first column of S·T
        SigmaMatrix::new(self.s1 * t.s1 - self.s2.conj() * t.s2, self.s2 * t.s1 + self.s1.conj() * t.s2)
    }
}

impl Add for SigmaMatrix {
    type Output = SigmaMatrix;
    fn add(self, t: SigmaMatrix) -> SigmaMatrix {
        SigmaMatrix::new(self.s1 + t.s1, self.s2 + t.s2)
    }
}

impl Sub for SigmaMatrix {
    type Output = SigmaMatrix;
    fn sub(self, t: SigmaMatrix) -> SigmaMatrix {
        SigmaMatrix::new(self.s1 - t.s1, self.s2 - t.s2)
    }
}

impl Neg for SigmaMatrix {
    type Output = SigmaMatrix;
    fn neg(self) -> SigmaMatrix {
        SigmaMatrix::new(-self.s1, -self.s2)
    }
}

/// Real quaternion `a + b·i + c·j + d·k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (r.a, r.b, r.c, r.d);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

/// The isomorphism Σ → ℍ; `I₂, iσ₃, iσ₂, iσ₁` go to `1, i, j, k`.
pub fn phi(s: &SigmaMatrix) -> Quaternion {
    Quaternion::new(s.s1.re, s.s1.im, -s.s2.re, s.s2.im)
}

pub fn phi_inverse(q: &Quaternion) -> SigmaMatrix {
    SigmaMatrix::new(C64::new(q.a, q.b), C64::new(-q.c, q.d))
}

pub fn sigma_det(s: &SigmaMatrix) -> f64 {
    s.s1.norm_sqr() + s.s2.norm_sqr()
}

/// True iff `S` and `T` are similar inside Σ.
pub fn same_similarity_orbit(s: &SigmaMatrix, t: &SigmaMatrix, tol: f64) -> bool {
    let inv = |m: &SigmaMatrix| m.s1.im * m.s1.im + m.s2.norm_sqr();
    (s.s1.re - t.s1.re).abs() <= tol && (inv(s) - inv(t)).abs() <= tol
}

/// `p × p` array of Σ blocks, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaBlockMatrix {
    p: usize,
    blocks: Vec<SigmaMatrix>,
}

impl SigmaBlockMatrix {
    pub fn from_blocks(p: usize, blocks: Vec<SigmaMatrix>) -> Self {
        assert_eq!(blocks.len(), p * p, "need p² blocks");
        Self { p, blocks }
    }

    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> SigmaMatrix) -> Self {
        let blocks = (0..p * p).map(|k| f(k / p, k % p)).collect();
        Self { p, blocks }
    }

    pub fn identity(p: usize) -> Self {
        Self::from_fn(p, |i, j| if i == j { SigmaMatrix::identity() } else { SigmaMatrix::zero() })
    }

    /// Accepts a 2p×2p matrix whose blocks pass [`is_sigma`] at `tol`.
    pub fn from_matrix(m: &ComplexMatrix, tol: f64) -> Result<Self, QuaternionError> {
        let defect = sigma_defect(m)?;
        if !m.is_square() || defect > tol {
            return Err(QuaternionError::NotSigma(defect));
        }
        let p = m.rows() / 2;
        Ok(Self::from_fn(p, |i, j| SigmaMatrix::from_block(m, i, j)))
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn block(&self, i: usize, j: usize) -> SigmaMatrix {
        self.blocks[i * self.p + j]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2 * self.p, 2 * self.p);
        for i in 0..self.p {
            for j in 0..self.p {
                m.set_block(2 * i, 2 * j, &self.block(i, j).to_matrix());
            }
        }
        m
    }

    /// Largest block norm, the scale used by determinant thresholds.
    pub fn scale(&self) -> f64 {
        self.blocks.iter().map(SigmaMatrix::norm).fold(0.0, f64::max)
    }
}

/// Determinant of a Σ-block matrix together with a flag for results near zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDeterminant {
    pub value: f64,
    pub near_singular: bool,
}

const PIVOT_REL: f64 = 1e-12;
const NEAR_ZERO_REL: f64 = 1e-8;

/// Determinant of the complex realization by Σ-valued Schur complements.
///
/// Each elimination step contributes `‖S₁₁‖²`, so the result is nonnegative by construction
/// except on the LU fallback, whose tiny negative values are clamped.
pub fn block_det(m: &SigmaBlockMatrix) -> BlockDeterminant {
    let p = m.p;
    let scale = m.scale();
    if p == 0 {
        return BlockDeterminant { value: 1.0, near_singular: false };
    }
    if scale == 0.0 {
        return BlockDeterminant { value: 0.0, near_singular: true };
    }
    let mut w = m.blocks.clone();
    let mut det = 1.0;
    for k in 0..p {
        let (piv_row, piv_norm) = (k..p)
            .map(|i| (i, w[i * p + k].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty range");
        if piv_norm == 0.0 {
            return BlockDeterminant { value: 0.0, near_singular: true };
        }
        if piv_norm <= PIVOT_REL * scale {
            // all candidates tiny but not zero: finish with an ordinary complex LU
            let rest = SigmaBlockMatrix::from_fn(p - k, |i, j| w[(k + i) * p + k + j]);
            let d = matrix_det(&rest.to_matrix()).map(|z| z.re).unwrap_or(0.0);
            det *= d;
            break;
        }
        if piv_row != k {
            // swapping a double row is an even permutation of the complex rows
            for j in 0..p {
                w.swap(k * p + j, piv_row * p + j);
            }
        }
        let pivot = w[k * p + k];
        det *= sigma_det(&pivot);
        let inv = pivot.inverse().expect("nonzero pivot");
        for i in k + 1..p {
            let l = w[i * p + k] * inv;
            for j in k + 1..p {
                w[i * p + j] = w[i * p + j] - l * w[k * p + j];
            }
        }
    }
    let near_singular = det.abs() <= NEAR_ZERO_REL * scale.powi(2 * p as i32);
    BlockDeterminant { value: if near_singular { det.max(0.0) } else { det }, near_singular }
}

/// Σ-Jordan block: `A` on the diagonal, `I₂` on the superdiagonal.
pub fn jordan_block(a: &SigmaMatrix, m: usize) -> SigmaBlockMatrix {
    assert!(m >= 1, "Jordan block order must be positive");
    SigmaBlockMatrix::from_fn(m, |i, j| {
        if i == j {
            *a
        } else if j == i + 1 {
            SigmaMatrix::identity()
        } else {
            SigmaMatrix::zero()
        }
    })
}

/// Largest Frobenius defect `‖B̄ − σ₂Bσ₂‖` over the 2×2 blocks of `m`.
pub fn sigma_defect(m: &ComplexMatrix) -> Result<f64, QuaternionError> {
    if m.rows() % 2 != 0 || m.cols() % 2 != 0 {
        return Err(QuaternionError::NotBlockable { rows: m.rows(), cols: m.cols() });
    }
    let mut worst: f64 = 0.0;
    for r in (0..m.rows()).step_by(2) {
        for c in (0..m.cols()).step_by(2) {
            let (a, b, g, d) = (m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)]);
            // σ₂[[a, b], [g, d]]σ₂ = [[d, −g], [−b, a]]
            let e = (a.conj() - d).norm_sqr()
                + (b.conj() + g).norm_sqr()
                + (g.conj() + b).norm_sqr()
                + (d.conj() - a).norm_sqr();
            worst = worst.max(e.sqrt());
        }
    }
    Ok(worst)
}

/// Membership of every 2×2 block in Σ, up to `tol`. Rectangular input is allowed.
pub fn is_sigma(m: &ComplexMatrix, tol: f64) -> Result<bool, QuaternionError> {
    Ok(sigma_defect(m)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, rank};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sm(s1: C64, s2: C64) -> SigmaMatrix {
        SigmaMatrix::new(s1, s2)
    }

    fn random_sigma(rng: &mut StdRng) -> SigmaMatrix {
        let mut r = || rng.random_range(-1.0..1.0);
        sm(c(r(), r()), c(r(), r()))
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&SigmaMatrix::identity()), Quaternion::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(phi(&sm(c(0.0, 1.0), ZERO)), Quaternion::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(phi(&sm(c(2.0, 3.0), c(4.0, 5.0))), Quaternion::new(2.0, 3.0, -4.0, 5.0));
    }

    #[test]
    fn phi_inverse_examples() {
        assert_eq!(phi_inverse(&Quaternion::new(1.0, 0.0, 0.0, 0.0)), SigmaMatrix::identity());
        let j = phi_inverse(&Quaternion::new(0.0, 0.0, 1.0, 0.0));
        assert_eq!(j, sm(ZERO, c(-1.0, 0.0)));
        assert_eq!(j.entries(), [[ZERO, c(1.0, 0.0)], [c(-1.0, 0.0), ZERO]]);
        assert_eq!(phi_inverse(&Quaternion::new(2.0, 3.0, -4.0, 5.0)), sm(c(2.0, 3.0), c(4.0, 5.0)));
    }

    #[test]
    fn basis_matches_pauli_table() {
        // iσ₁ = [[0, i], [i, 0]] ↦ k
        let k = phi_inverse(&Quaternion::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(k.entries(), [[ZERO, c(0.0, 1.0)], [c(0.0, 1.0), ZERO]]);
    }

    #[test]
    fn sigma_det_examples() {
        assert_eq!(sigma_det(&SigmaMatrix::identity()), 1.0);
        let s = sm(c(0.0, 3.0), c(4.0, 0.0));
        assert_eq!(sigma_det(&s), 25.0);
        let oracle = matrix_det(&s.to_matrix()).unwrap();
        assert!((oracle - c(25.0, 0.0)).norm() < 1e-14);
        assert_eq!(sigma_det(&SigmaMatrix::zero()), 0.0);
    }

    #[test]
    fn block_det_examples() {
        for p in 1..5 {
            assert_eq!(block_det(&SigmaBlockMatrix::identity(p)).value, 1.0);
        }
        let s = sm(c(0.0, 3.0), c(4.0, 0.0));
        let m = SigmaBlockMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => s,
            (1, 1) => SigmaMatrix::identity(),
            _ => SigmaMatrix::zero(),
        });
        let oracle = matrix_det(&m.to_matrix()).unwrap();
        assert!((block_det(&m).value - oracle.re).abs() < 1e-12 && (oracle.re - 25.0).abs() < 1e-12);

        let mut rng = StdRng::seed_from_u64(4);
        let z = SigmaBlockMatrix::from_fn(3, |_, j| if j == 0 { SigmaMatrix::zero() } else { random_sigma(&mut rng) });
        let d = block_det(&z);
        assert_eq!(d.value, 0.0);
        assert!(d.near_singular);
    }

    #[test]
    fn block_det_pivots_past_zero_leading_block() {
        let mut rng = StdRng::seed_from_u64(8);
        let m = SigmaBlockMatrix::from_fn(3, |i, j| if (i, j) == (0, 0) { SigmaMatrix::zero() } else { random_sigma(&mut rng) });
        let oracle = matrix_det(&m.to_matrix()).unwrap();
        assert!((block_det(&m).value - oracle.re).abs() <= 1e-12 * oracle.norm());
        assert!(oracle.im.abs() <= 1e-12 * oracle.norm());
    }

    #[test]
    fn block_det_lu_fallback() {
        // first block column tiny but nonzero: the LU route must still agree with the oracle
        let mut rng = StdRng::seed_from_u64(12);
        let m = SigmaBlockMatrix::from_fn(2, |_, j| {
            let s = random_sigma(&mut rng);
            if j == 0 { s.scale(1e-14) } else { s }
        });
        let oracle = matrix_det(&m.to_matrix()).unwrap().re;
        let got = block_det(&m);
        assert!(got.value >= 0.0);
        assert!((got.value - oracle.max(0.0)).abs() <= 1e-20);
    }

    #[test]
    fn orbit_examples() {
        let s = sm(c(1.0, 2.0), ZERO);
        assert!(same_similarity_orbit(&s, &s, 0.0));
        assert!(same_similarity_orbit(&s, &sm(c(1.0, 0.0), c(2.0, 0.0)), 1e-14));
        assert!(!same_similarity_orbit(&sm(c(1.0, 0.0), ZERO), &sm(c(2.0, 0.0), ZERO), 1e-14));
    }

    #[test]
    fn orbit_matches_conjugation() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..50 {
            let s = random_sigma(&mut rng);
            let g = random_sigma(&mut rng);
            let t = g * s * g.inverse().unwrap();
            assert!(same_similarity_orbit(&s, &t, 1e-12));
        }
    }

    #[test]
    fn jordan_block_examples() {
        let a = sm(c(0.5, 0.2), c(-0.1, 0.3));
        let j1 = jordan_block(&a, 1);
        assert_eq!(j1.order(), 1);
        assert_eq!(j1.block(0, 0), a);
        let j2 = jordan_block(&a, 2);
        assert_eq!(j2.block(0, 0), a);
        assert_eq!(j2.block(0, 1), SigmaMatrix::identity());
        assert_eq!(j2.block(1, 0), SigmaMatrix::zero());
        assert_eq!(j2.block(1, 1), a);

        let a = 1.7;
        let m = jordan_block(&sm(c(a, 0.0), ZERO), 2).to_matrix();
        let n = &m - &ComplexMatrix::identity(4).scale_re(a);
        for z in eigenvalues(&m).unwrap() {
            assert!((z - a).norm() < 1e-6);
        }
        assert_eq!(rank(&n, 1e-8).unwrap(), 2);
        assert!((&n * &n).max_abs() == 0.0);
    }

    #[test]
    fn is_sigma_examples() {
        assert!(is_sigma(&ComplexMatrix::identity(4), 0.0).unwrap());
        let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(!is_sigma(&d, 1e-12).unwrap());
        let mut rng = StdRng::seed_from_u64(3);
        let m = SigmaBlockMatrix::from_fn(3, |_, _| random_sigma(&mut rng)).to_matrix();
        assert!(is_sigma(&m, 0.0).unwrap());
        assert_eq!(
            is_sigma(&ComplexMatrix::identity(3), 1e-12),
            Err(QuaternionError::NotBlockable { rows: 3, cols: 3 })
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sigma() -> impl Strategy<Value = SigmaMatrix> {
            (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, x, y)| sm(c(a, b), c(x, y)))
        }

        fn small_int_sigma() -> impl Strategy<Value = SigmaMatrix> {
            (-3i32..4, -3i32..4, -3i32..4, -3i32..4)
                .prop_map(|(a, b, x, y)| sm(c(a as f64, b as f64), c(x as f64, y as f64)))
        }

        proptest! {
            #[test]
            fn phi_is_multiplicative(s in sigma(), t in sigma()) {
                let lhs = phi(&(s * t));
                let rhs = phi(&s) * phi(&t);
                prop_assert!((lhs.a - rhs.a).abs() + (lhs.b - rhs.b).abs() + (lhs.c - rhs.c).abs() + (lhs.d - rhs.d).abs() < 1e-12);
            }

            #[test]
            fn phi_is_real_linear(s in sigma(), t in sigma(), al in -3.0..3.0f64, be in -3.0..3.0f64) {
                let lhs = phi(&(s.scale(al) + t.scale(be)));
                let rhs = phi(&s).scale(al) + phi(&t).scale(be);
                prop_assert!((lhs.a - rhs.a).abs() + (lhs.b - rhs.b).abs() + (lhs.c - rhs.c).abs() + (lhs.d - rhs.d).abs() < 1e-12);
            }

            #[test]
            fn phi_roundtrip_and_product_realization(s in sigma(), t in sigma()) {
                prop_assert_eq!(phi_inverse(&phi(&s)), s);
                let direct = &s.to_matrix() * &t.to_matrix();
                prop_assert!((&direct - &(s * t).to_matrix()).max_abs() < 1e-13);
            }

            #[test]
            fn det_is_multiplicative(s in sigma(), t in sigma()) {
                let lhs = sigma_det(&(s * t));
                prop_assert!((lhs - sigma_det(&s) * sigma_det(&t)).abs() <= 1e-12 * (1.0 + lhs));
                prop_assert!((sigma_det(&s) - phi(&s).norm_sqr()).abs() < 1e-13);
            }

            #[test]
            fn orbit_is_equivalence(s in small_int_sigma(), t in small_int_sigma(), u in small_int_sigma()) {
                prop_assert!(same_similarity_orbit(&s, &s, 0.0));
                prop_assert_eq!(same_similarity_orbit(&s, &t, 0.0), same_similarity_orbit(&t, &s, 0.0));
                if same_similarity_orbit(&s, &t, 0.0) && same_similarity_orbit(&t, &u, 0.0) {
                    prop_assert!(same_similarity_orbit(&s, &u, 0.0));
                }
            }

            #[test]
            fn block_det_matches_oracle(p in 1usize..5, seed in any::<u64>()) {
                let mut rng = StdRng::seed_from_u64(seed);
                let m = SigmaBlockMatrix::from_fn(p, |_, _| random_sigma(&mut rng));
                let d = block_det(&m);
                let oracle = matrix_det(&m.to_matrix()).unwrap();
                prop_assert!(d.value >= 0.0);
                prop_assert!((d.value - oracle.re).abs() <= 1e-10 * oracle.norm().max(1e-300) + 1e-14);
            }
        }
    }
}
