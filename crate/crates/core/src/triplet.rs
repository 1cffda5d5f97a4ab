//! Input data: the right triplet `(A, B, C)` over Σ with background amplitude `μ` and phase `θ_r`.

use crate::linalg::{eigenvalues, matrix_inverse, rank, ComplexMatrix, LinalgError, C64};
use crate::quaternion::{sigma_defect, QuaternionError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TripletError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("background amplitude must be positive and finite, got {0}")]
    BadMu(f64),
    #[error("{which} is not Σ-structured (defect {defect:e})")]
    NotSigma { which: &'static str, defect: f64 },
    #[error("A has an eigenvalue with real part {0} <= 0")]
    Spectrum(f64),
    #[error("triplet is not minimal: {0:?}")]
    NotMinimal(MinimalityReport),
    #[error("Sylvester solution P_r is singular")]
    SingularP,
    #[error("no soliton: |γ| = {gamma_abs} exceeds μ = {mu}")]
    NoSoliton { gamma_abs: f64, mu: f64 },
    #[error("phase-inconsistent triplet: |q_l| = {ql_abs} but μ = {mu}")]
    PhaseInconsistent { ql_abs: f64, mu: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quaternion(#[from] QuaternionError),
}

/// Rank decisions use singular values above this fraction of the largest one.
pub const RANK_TOL: f64 = 1e-8;
/// Default relative tolerance of the admissibility test.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;
const SIGMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TripletConfig {
    /// `2p × 2p`
    pub a: ComplexMatrix,
    /// `2p × 2`
    pub b: ComplexMatrix,
    /// `2 × 2p`
    pub c: ComplexMatrix,
    pub mu: f64,
    pub theta_r: f64,
}

impl TripletConfig {
    /// Checks shapes and `μ` only; see [`TripletConfig::validate`] for the rest.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, c: ComplexMatrix, mu: f64, theta_r: f64) -> Result<Self, TripletError> {
        let n = a.rows();
        if !a.is_square() || n == 0 || n % 2 != 0 {
            return Err(TripletError::Shape(format!("A is {}x{}, need a nonempty even square", n, a.cols())));
        }
        if b.rows() != n || b.cols() != 2 {
            return Err(TripletError::Shape(format!("B is {}x{}, need {n}x2", b.rows(), b.cols())));
        }
        if c.rows() != 2 || c.cols() != n {
            return Err(TripletError::Shape(format!("C is {}x{}, need 2x{n}", c.rows(), c.cols())));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(TripletError::BadMu(mu));
        }
        if !theta_r.is_finite() {
            return Err(TripletError::Shape("θ_r must be finite".into()));
        }
        Ok(Self { a, b, c, mu, theta_r })
    }

    /// Block order `p`.
    pub fn p(&self) -> usize {
        self.a.rows() / 2
    }

    pub fn q_r(&self) -> C64 {
        C64::from_polar(self.mu, self.theta_r)
    }

    pub fn bc(&self) -> ComplexMatrix {
        &self.b * &self.c
    }

    /// Σ-structure, spectrum and minimality.
    pub fn validate(&self) -> Result<MinimalityReport, TripletError> {
        for (which, m) in [("A", &self.a), ("B", &self.b), ("C", &self.c)] {
            let defect = sigma_defect(m)?;
            if defect > SIGMA_TOL * (1.0 + m.max_abs()) {
                return Err(TripletError::NotSigma { which, defect });
            }
        }
        let min_re = min_real_part(&self.a)?;
        if min_re <= 0.0 {
            return Err(TripletError::Spectrum(min_re));
        }
        let report = minimality(&self.a, &self.bc())?;
        if !(report.controllable && report.observable) {
            return Err(TripletError::NotMinimal(report));
        }
        Ok(report)
    }
}

pub fn min_real_part(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(eigenvalues(a)?.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

/// True iff every eigenvalue of `A` lies in the open right half-plane.
pub fn check_spectrum(a: &ComplexMatrix) -> Result<bool, LinalgError> {
    Ok(min_real_part(a)? > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct MinimalityReport {
    pub controllable: bool,
    pub observable: bool,
    pub controllability_rank: usize,
    pub observability_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankTest {
    pub rank: usize,
    pub full: bool,
}

/// Rank of `[M, AM, …, A^{n−1}M]`.
pub fn controllability(a: &ComplexMatrix, m: &ComplexMatrix) -> Result<RankTest, LinalgError> {
    let n = a.rows();
    let mut k = ComplexMatrix::zeros(n, n * m.cols());
    let mut power = m.clone();
    for j in 0..n {
        k.set_block(0, j * m.cols(), &power);
        power = a * &power;
    }
    let rank = rank(&k, RANK_TOL)?;
    Ok(RankTest { rank, full: rank == n })
}

/// Rank of `[M; MA; …; MA^{n−1}]`.
pub fn observability(m: &ComplexMatrix, a: &ComplexMatrix) -> Result<RankTest, LinalgError> {
    controllability(&a.adjoint(), &m.adjoint())
}

pub fn minimality(a: &ComplexMatrix, bc: &ComplexMatrix) -> Result<MinimalityReport, LinalgError> {
    let ctrl = controllability(a, bc)?;
    let obs = observability(bc, a)?;
    Ok(MinimalityReport {
        controllable: ctrl.full,
        observable: obs.full,
        controllability_rank: ctrl.rank,
        observability_rank: obs.rank,
    })
}

/// Boundary data implied by a triplet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub gamma: C64,
    pub q_r: C64,
    pub q_l: C64,
    pub theta_l: f64,
}

/// `γ = C_{r,1}P⁻¹B_{r,2}`, `q_l = q_r + 2γ`, and the check `|q_l| = μ`.
pub fn admissibility(cfg: &TripletConfig, p_r: &ComplexMatrix, tol: f64) -> Result<BoundaryValues, TripletError> {
    let p_inv = matrix_inverse(p_r).map_err(|_| TripletError::SingularP)?;
    let gamma = (&(&cfg.c.row(0) * &p_inv) * &cfg.b.col(1))[(0, 0)];
    let mu = cfg.mu;
    if gamma.norm() > mu * (1.0 + tol) {
        return Err(TripletError::NoSoliton { gamma_abs: gamma.norm(), mu });
    }
    let q_r = cfg.q_r();
    let q_l = q_r + 2.0 * gamma;
    if (q_l.norm() - mu).abs() > tol * mu {
        return Err(TripletError::PhaseInconsistent { ql_abs: q_l.norm(), mu });
    }
    Ok(BoundaryValues { gamma, q_r, q_l, theta_l: q_l.arg() })
}

/// `𝒬 = [[0, q], [−q̄, 0]]`.
pub fn script_q(q: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => q,
        (1, 0) => -q.conj(),
        _ => C64::new(0.0, 0.0),
    })
}

pub fn sigma3() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
}

/// Moments `C A^j B`, `j = 0..count`.
pub(crate) fn moments(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, count: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(count);
    let mut ab = b.clone();
    for _ in 0..count {
        out.push(c * &ab);
        ab = a * &ab;
    }
    out
}

/// Per-moment NLS compatibility residuals: the (1,1) entries of
/// `−C A^{j+1} B − ½(C A^j B 𝒬_r + 𝒬_r C A^j B)` for `j < 2p`, each scaled by the size of its terms.
///
/// These vanish exactly when the right kernel `Ω(w) = C e^{−wA} B` satisfies
/// `diag[Ω' − ½(Ω𝒬_r + 𝒬_rΩ)] = 0`, the condition under which the reconstructed potential has the
/// NLS form `Q = 𝒬² + 𝒬_x + μ²I`.
pub fn compatibility_residuals(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, q_r: C64) -> Vec<C64> {
    let n = a.rows();
    let m = moments(a, b, c, n + 1);
    let qm = script_q(q_r);
    (0..n)
        .map(|j| {
            let x = &(-&m[j + 1]) - &(&(&m[j] * &qm) + &(&qm * &m[j])).scale_re(0.5);
            let size = m[j + 1].max_abs() + q_r.norm() * m[j].max_abs();
            x[(0, 0)] / size.max(f64::MIN_POSITIVE)
        })
        .collect()
}

pub fn compatibility_defect(cfg: &TripletConfig) -> f64 {
    compatibility_residuals(&cfg.a, &cfg.b, &cfg.c, cfg.q_r()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
