//! Dense complex matrices and the matrix functions the soliton formulas consume.
//!
//! Everything here works on small matrices (order 2p with p rarely above a handful),
//! so the algorithms favour exactness and simplicity over asymptotic speed.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("spectrum conflict: A and -A share an eigenvalue numerically")]
    SpectrumConflict,
    #[error("point {0} lies on the branch cut")]
    OnBranchCut(C64),
    #[error("spectrum touches the branch cut")]
    SpectrumTouchesCut,
    #[error("eigendecomposition did not converge")]
    Eigen,
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting NaN and infinite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(LinalgError::NonFinite(k / cols.max(1), k % cols.max(1)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nc) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Self::new(nr, nc, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(d: &[C64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn row(&self, i: usize) -> Self {
        self.block(i, 0, 1, self.cols)
    }

    pub fn col(&self, j: usize) -> Self {
        self.block(0, j, self.rows, 1)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let (r, c) = (other.rows, other.cols);
        Self::from_fn(self.rows * r, self.cols * c, |i, j| self[(i / r, j / c)] * other[(i % r, j % c)])
    }

    /// Column-major stacking into a vector, the convention of `vec(AXB) = (Bᵀ ⊗ A) vec X`.
    pub fn vec(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn from_vec(rows: usize, cols: usize, v: &[C64]) -> Self {
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<C64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    fn require_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    scale: f64,
}

/// Relative pivot size below which a matrix counts as singular.
const PIVOT_TOL: f64 = 1e-14;

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        let n = a.require_square()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[(k, k)];
            if piv == ZERO {
                continue;
            }
            for i in k + 1..n {
                let l = lu[(i, k)] / piv;
                lu[(i, k)] = l;
                if l != ZERO {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, sign, scale: a.max_abs() })
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.rows;
        (0..n).map(|i| self.lu[(i, i)]).product::<C64>() * self.sign
    }

    /// Smallest pivot magnitude relative to the largest entry of the factored matrix.
    pub fn min_pivot_ratio(&self) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let n = self.lu.rows;
        (0..n).map(|i| self.lu[(i, i)].norm()).fold(f64::INFINITY, f64::min) / self.scale
    }

    pub fn is_singular(&self) -> bool {
        self.lu.rows > 0 && self.min_pivot_ratio() <= PIVOT_TOL * self.lu.rows as f64
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.lu.rows;
        if b.rows != n {
            return Err(LinalgError::Dimension(format!("rhs has {} rows, expected {n}", b.rows)));
        }
        if self.is_singular() {
            return Err(LinalgError::Singular);
        }
        let mut x = ComplexMatrix::from_fn(n, b.cols, |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

pub fn matrix_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = a.require_square()?;
    Lu::new(a)?.solve(&ComplexMatrix::identity(n))
}

pub fn matrix_det(a: &ComplexMatrix) -> Result<C64, LinalgError> {
    Ok(Lu::new(a)?.det())
}

/// Solves `A X = B`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Lu::new(a)?.solve(b)
}

/// `e^{sA}` by scaling and squaring with the degree-13 Padé approximant.
pub fn matrix_exp(a: &ComplexMatrix, s: f64) -> Result<ComplexMatrix, LinalgError> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;
    let n = a.require_square()?;
    let x = a.scale_re(s);
    let norm = x.norm_one();
    if !norm.is_finite() {
        return Err(LinalgError::NonFinite(0, 0));
    }
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let x = x.scale_re(0.5f64.powi(squarings));
    let id = ComplexMatrix::identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let lin = |c: [f64; 4]| {
        let mut m = x6.scale_re(c[0]);
        m += &x4.scale_re(c[1]);
        m += &x2.scale_re(c[2]);
        m += &id.scale_re(c[3]);
        m
    };
    let mut inner_u = x6.scale_re(B[13]);
    inner_u += &x4.scale_re(B[11]);
    inner_u += &x2.scale_re(B[9]);
    let u = &x * &(&(&x6 * &inner_u) + &lin([B[7], B[5], B[3], B[1]]));
    let mut inner_v = x6.scale_re(B[12]);
    inner_v += &x4.scale_re(B[10]);
    inner_v += &x2.scale_re(B[8]);
    let v = &(&x6 * &inner_v) + &lin([B[6], B[4], B[2], B[0]]);
    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Unique `P` with `A P + P A = M`, by a vectorized Kronecker solve.
pub fn solve_sylvester(a: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = a.require_square()?;
    if m.rows != n || m.cols != n {
        return Err(LinalgError::Dimension(format!("rhs is {}x{}, expected {n}x{n}", m.rows, m.cols)));
    }
    let id = ComplexMatrix::identity(n);
    let k = &id.kron(a) + &a.transpose().kron(&id);
    let lu = Lu::new(&k)?;
    if lu.is_singular() || lu.min_pivot_ratio() < 1e-13 {
        return Err(LinalgError::SpectrumConflict);
    }
    let rhs = ComplexMatrix::from_vec(n * n, 1, &m.vec());
    let x = lu.solve(&rhs)?;
    Ok(ComplexMatrix::from_vec(n, n, x.as_slice()))
}

/// Eigenvalues and (unit-norm) eigenvectors, the latter as columns.
pub fn eig(a: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix), LinalgError> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let e = a.to_faer().eigen().map_err(|_| LinalgError::Eigen)?;
    let s = e.S();
    let u = e.U();
    let values = (0..n).map(|i| s[i]).collect();
    Ok((values, ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>, LinalgError> {
    a.require_square()?;
    if a.rows == 0 {
        return Ok(Vec::new());
    }
    a.to_faer().eigenvalues().map_err(|_| LinalgError::Eigen)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    if a.rows == 0 || a.cols == 0 {
        return Ok(Vec::new());
    }
    let mut sv = a.to_faer().singular_values().map_err(|_| LinalgError::Eigen)?;
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Numerical rank: singular values above `rel_tol · σ_max`.
pub fn rank(a: &ComplexMatrix, rel_tol: f64) -> Result<usize, LinalgError> {
    let sv = singular_values(a)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * smax).count())
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    let sv = singular_values(a)?;
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        _ => Ok(f64::INFINITY),
    }
}

/// Least-squares solution of an overdetermined system `A x ≈ b`, via QR.
pub fn lstsq(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    use faer::linalg::solvers::SolveLstsq;
    if a.rows < a.cols || b.rows != a.rows {
        return Err(LinalgError::Dimension("least squares needs a tall system".into()));
    }
    let qr = a.to_faer().qr();
    let x = qr.solve_lstsq(b.to_faer());
    let out = ComplexMatrix::from_fn(a.cols, b.cols, |i, j| x[(i, j)]);
    if out.data.iter().any(|z| !z.is_finite()) {
        return Err(LinalgError::Singular);
    }
    Ok(out)
}

/// The conformal map `k(λ) = √(λ−μ)·√(λ+μ)` from ℂ⁺ onto ℂ⁺.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedSqrtMap {
    pub mu: f64,
    /// Points closer than this to the cut `[−μ, μ]` are refused.
    pub cut_eps: f64,
}

impl BranchedSqrtMap {
    pub fn new(mu: f64) -> Self {
        Self { mu, cut_eps: 1e-10 }
    }

    pub fn distance_to_cut(&self, z: C64) -> f64 {
        let over = (z.re.abs() - self.mu).max(0.0);
        over.hypot(z.im)
    }

    /// `k` without the cut check.
    pub fn eval_unchecked(&self, z: C64) -> C64 {
        (z - self.mu).sqrt() * (z + self.mu).sqrt()
    }
}

pub fn branched_sqrt(map: &BranchedSqrtMap, lambda: C64) -> Result<C64, LinalgError> {
    if map.distance_to_cut(lambda) < map.cut_eps {
        return Err(LinalgError::OnBranchCut(lambda));
    }
    Ok(map.eval_unchecked(lambda))
}

/// How an analytic matrix function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionMethod {
    /// Eigendecomposition when the eigenvector basis is well conditioned, contour otherwise.
    Auto,
    Eigen,
    Contour,
}

/// Eigenvector condition number above which `Auto` switches to the contour integral.
pub const EIGEN_COND_LIMIT: f64 = 1e6;
/// Trapezoid nodes per circle.
pub const CONTOUR_NODES: usize = 256;

/// `f(M)` for `f` analytic off a closed set; `dist` measures distance to that set.
pub fn matrix_function(
    m: &ComplexMatrix,
    f: &dyn Fn(C64) -> C64,
    dist: &dyn Fn(C64) -> f64,
    eps: f64,
    method: FunctionMethod,
) -> Result<ComplexMatrix, LinalgError> {
    let n = m.require_square()?;
    let (values, vectors) = eig(m)?;
    if values.iter().any(|&z| dist(z) < eps) {
        return Err(LinalgError::SpectrumTouchesCut);
    }
    let use_eigen = match method {
        FunctionMethod::Eigen => true,
        FunctionMethod::Contour => false,
        FunctionMethod::Auto => condition_number(&vectors)? < EIGEN_COND_LIMIT,
    };
    if use_eigen {
        let fd: Vec<C64> = values.iter().map(|&z| f(z)).collect();
        let vf = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * fd[j]);
        return Ok(&vf * &matrix_inverse(&vectors)?);
    }
    contour_function(m, &values, f, dist)
}

/// Groups eigenvalues closer than `tol` (single linkage).
fn cluster(values: &[C64], tol: f64) -> Vec<Vec<C64>> {
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for &z in values {
        let hits: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().any(|&w| (w - z).norm() < tol))
            .map(|(k, _)| k)
            .collect();
        let mut merged = vec![z];
        for &k in hits.iter().rev() {
            merged.extend(groups.remove(k));
        }
        groups.push(merged);
    }
    groups
}

fn contour_function(
    m: &ComplexMatrix,
    values: &[C64],
    f: &dyn Fn(C64) -> C64,
    dist: &dyn Fn(C64) -> f64,
) -> Result<ComplexMatrix, LinalgError> {
    let n = m.rows;
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let groups = cluster(values, 1e-3 * scale);
    let mut total = ComplexMatrix::zeros(n, n);
    for (k, g) in groups.iter().enumerate() {
        let center = g.iter().sum::<C64>() / g.len() as f64;
        let spread = g.iter().map(|&z| (z - center).norm()).fold(0.0, f64::max);
        let other = groups
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .flat_map(|(_, h)| h.iter().map(|&z| (z - center).norm()))
            .fold(f64::INFINITY, f64::min);
        let reach = other.min(dist(center));
        let radius = (0.5 * reach).max(2.0 * spread);
        if !radius.is_finite() || radius >= reach || radius <= spread {
            return Err(LinalgError::SpectrumTouchesCut);
        }
        for node in 0..CONTOUR_NODES {
            let theta = 2.0 * std::f64::consts::PI * node as f64 / CONTOUR_NODES as f64;
            let w = C64::from_polar(radius, theta);
            let z = center + w;
            let shifted = &ComplexMatrix::identity(n).scale(z) - m;
            let res = matrix_inverse(&shifted)?;
            total += &res.scale(f(z) * w / CONTOUR_NODES as f64);
        }
    }
    Ok(total)
}

/// `H = f(iA)` with `f(λ) = i[2λk(λ) − μ²]`.
pub fn time_generator(a: &ComplexMatrix, map: &BranchedSqrtMap) -> Result<ComplexMatrix, LinalgError> {
    time_generator_with(a, map, FunctionMethod::Auto)
}

pub fn time_generator_with(
    a: &ComplexMatrix,
    map: &BranchedSqrtMap,
    method: FunctionMethod,
) -> Result<ComplexMatrix, LinalgError> {
    let mu = map.mu;
    let f = |z: C64| I * (2.0 * z * map.eval_unchecked(z) - mu * mu);
    let dist = |z: C64| map.distance_to_cut(z);
    matrix_function(&a.scale(I), &f, &dist, map.cut_eps, method)
}
