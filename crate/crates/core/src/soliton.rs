//! Closed-form reflectionless solutions built from a validated triplet.

use crate::linalg::{
    condition_number, lstsq, matrix_exp, matrix_inverse, solve_sylvester, ComplexMatrix, LinalgError, Lu, C64,
    I,
};
use crate::triplet::{
    admissibility, compatibility_defect, min_real_part, moments, script_q, sigma3, BoundaryValues, MinimalityReport,
    TripletConfig, TripletError, ADMISSIBILITY_TOL,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolitonError {
    #[error(transparent)]
    Triplet(#[from] TripletError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("triplet does not define an NLS potential (compatibility defect {defect:e})")]
    Incompatible { defect: f64 },
    #[error("no time generator commuting with A reproduces the kernel evolution (residual {residual:e})")]
    Generator { residual: f64 },
    #[error("singular point at x = {x}, t = {t}")]
    SingularPoint { x: f64, t: f64 },
    #[error("λ = {0} is a pole of the transmission data")]
    Pole(C64),
}

/// Knobs for [`SolitonSolution::build_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Reject triplets whose kernel does not produce an NLS potential.
    pub require_nls_compatibility: bool,
    /// Relative tolerance for admissibility and compatibility.
    pub tol: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { require_nls_compatibility: true, tol: ADMISSIBILITY_TOL }
    }
}

impl BuildOptions {
    /// Evaluate the closed form for any minimal admissible triplet.
    pub fn lenient() -> Self {
        Self { require_nls_compatibility: false, ..Self::default() }
    }
}

/// Relative least-squares residual above which the time generator is rejected.
pub const GENERATOR_TOL: f64 = 1e-7;
/// `|det|` relative to its scale below which a point counts as singular.
pub const SINGULAR_REL: f64 = 1e-8;
const P_COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct SolitonSolution {
    cfg: TripletConfig,
    p_r: ComplexMatrix,
    p_r_inv: ComplexMatrix,
    h: ComplexMatrix,
    boundary: BoundaryValues,
    minimality: MinimalityReport,
    compatibility_defect: f64,
    generator_residual: f64,
}

/// `[e^{2xA}e^{−tH} + P_r]⁻¹` together with its scaled determinant.
struct Bracket {
    inv: ComplexMatrix,
    det_ratio: f64,
}

impl SolitonSolution {
    pub fn build(cfg: TripletConfig) -> Result<Self, SolitonError> {
        Self::build_with(cfg, BuildOptions::default())
    }

    pub fn build_with(cfg: TripletConfig, opts: BuildOptions) -> Result<Self, SolitonError> {
        let minimality = cfg.validate()?;
        let p_r = solve_sylvester(&cfg.a, &cfg.bc())?;
        if condition_number(&p_r)? > P_COND_LIMIT {
            return Err(TripletError::SingularP.into());
        }
        let p_r_inv = matrix_inverse(&p_r).map_err(|_| TripletError::SingularP)?;
        let boundary = admissibility(&cfg, &p_r, opts.tol)?;
        let defect = compatibility_defect(&cfg);
        if opts.require_nls_compatibility && defect > opts.tol {
            return Err(SolitonError::Incompatible { defect });
        }
        let (h, residual) = kernel_generator(&cfg.a, &cfg.b, &cfg.c, cfg.q_r())?;
        if opts.require_nls_compatibility && residual > GENERATOR_TOL {
            return Err(SolitonError::Generator { residual });
        }
        Ok(Self { cfg, p_r, p_r_inv, h, boundary, minimality, compatibility_defect: defect, generator_residual: residual })
    }

    pub fn cfg(&self) -> &TripletConfig {
        &self.cfg
    }

    pub fn p_r(&self) -> &ComplexMatrix {
        &self.p_r
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn mu(&self) -> f64 {
        self.cfg.mu
    }

    pub fn q_r(&self) -> C64 {
        self.boundary.q_r
    }

    pub fn q_l(&self) -> C64 {
        self.boundary.q_l
    }

    pub fn theta_l(&self) -> f64 {
        self.boundary.theta_l
    }

    pub fn gamma(&self) -> C64 {
        self.boundary.gamma
    }

    pub fn minimality(&self) -> MinimalityReport {
        self.minimality
    }

    pub fn compatibility_defect(&self) -> f64 {
        self.compatibility_defect
    }

    pub fn generator_residual(&self) -> f64 {
        self.generator_residual
    }

    /// Smallest real part in the spectrum of `A`, the decay rate scale.
    pub fn decay_rate(&self) -> f64 {
        min_real_part(&self.cfg.a).unwrap_or(f64::NAN)
    }

    /// Negative control for the verifier: scales `P_r` without touching anything else.
    #[doc(hidden)]
    pub fn with_corrupted_p_r(mut self, factor: f64) -> Self {
        self.p_r = self.p_r.scale_re(factor);
        self.p_r_inv = self.p_r_inv.scale_re(1.0 / factor);
        self
    }

    fn exponent(&self, x: f64, t: f64) -> ComplexMatrix {
        &self.cfg.a.scale_re(2.0 * x) - &self.h.scale_re(t)
    }

    /// The rescaled inverse: `(I + G P)⁻¹ G` with `G = e^{−2xA + tH}` for `x ≥ 0`, the direct form otherwise.
    fn bracket(&self, x: f64, t: f64) -> Result<Bracket, SolitonError> {
        let n = self.cfg.a.rows();
        let l = self.exponent(x, t);
        let (core, scale, rhs) = if x >= 0.0 {
            let g = matrix_exp(&l, -1.0)?;
            let gp = &g * &self.p_r;
            let scale = 1.0 + gp.norm_fro();
            (&ComplexMatrix::identity(n) + &gp, scale, g)
        } else {
            let e = matrix_exp(&l, 1.0)?;
            let scale = e.norm_fro() + self.p_r.norm_fro();
            (&e + &self.p_r, scale, ComplexMatrix::identity(n))
        };
        let lu = Lu::new(&core)?;
        let det_ratio = lu.det().norm() / scale.powi(n as i32);
        if det_ratio < SINGULAR_REL || lu.is_singular() {
            return Err(SolitonError::SingularPoint { x, t });
        }
        Ok(Bracket { inv: lu.solve(&rhs)?, det_ratio })
    }

    /// Scaled `|det(e^{2xA}e^{−tH} + P_r)|`; zero exactly on the singular locus.
    pub fn scaled_det(&self, x: f64, t: f64) -> Result<f64, SolitonError> {
        match self.bracket(x, t) {
            Ok(b) => Ok(b.det_ratio),
            Err(SolitonError::SingularPoint { .. }) => {
                let n = self.cfg.a.rows();
                let l = self.exponent(x, t);
                let core = if x >= 0.0 {
                    let gp = &matrix_exp(&l, -1.0)? * &self.p_r;
                    let s = 1.0 + gp.norm_fro();
                    (&ComplexMatrix::identity(n) + &gp).scale_re(1.0 / s)
                } else {
                    let e = matrix_exp(&l, 1.0)?;
                    let s = e.norm_fro() + self.p_r.norm_fro();
                    (&e + &self.p_r).scale_re(1.0 / s)
                };
                Ok(Lu::new(&core)?.det().norm())
            }
            Err(e) => Err(e),
        }
    }

    /// `q(x,t) = q_r + 2 C_{r,1} [e^{2xA}e^{−tH} + P_r]⁻¹ B_{r,2}`.
    pub fn eval_q(&self, x: f64, t: f64) -> Result<C64, SolitonError> {
        let m = self.bracket(x, t)?.inv;
        let corr = (&(&self.cfg.c.row(0) * &m) * &self.cfg.b.col(1))[(0, 0)];
        Ok(self.boundary.q_r + 2.0 * corr)
    }

    /// `Q = −4 C M⁻¹ A E M⁻¹ B`, using `E M⁻¹ = I − P_r M⁻¹`.
    #[allow(non_snake_case)]
    pub fn eval_Q(&self, x: f64, t: f64) -> Result<ComplexMatrix, SolitonError> {
        let m = self.bracket(x, t)?.inv;
        let n = self.cfg.a.rows();
        let em = &ComplexMatrix::identity(n) - &(&self.p_r * &m);
        let inner = &(&(&m * &self.cfg.a) * &em) * &self.cfg.b;
        Ok((&self.cfg.c * &inner).scale_re(-4.0))
    }

    /// `K(x,y;t) = −C M(x,t)⁻¹ e^{−(y−x)A} B`, an overflow-free rearrangement valid because `H` commutes with `A`.
    pub fn kernel_k(&self, x: f64, y: f64, t: f64) -> Result<ComplexMatrix, SolitonError> {
        let m = self.bracket(x, t)?.inv;
        let decay = matrix_exp(&self.cfg.a, x - y)?;
        Ok((&(&(&self.cfg.c * &m) * &decay) * &self.cfg.b).scale_re(-1.0))
    }

    /// `K` in its original form `−C e^{−xA}[I + e^{−xA}e^{tH}P_r e^{−xA}]⁻¹ e^{−yA} e^{tH} B`.
    pub fn kernel_k_direct(&self, x: f64, y: f64, t: f64) -> Result<ComplexMatrix, SolitonError> {
        let n = self.cfg.a.rows();
        let ex = matrix_exp(&self.cfg.a, -x)?;
        let eh = matrix_exp(&self.h, t)?;
        let inner = &ComplexMatrix::identity(n) + &(&(&(&ex * &eh) * &self.p_r) * &ex);
        let lu = Lu::new(&inner)?;
        if lu.is_singular() {
            return Err(SolitonError::SingularPoint { x, t });
        }
        let tail = &(&matrix_exp(&self.cfg.a, -y)? * &eh) * &self.cfg.b;
        Ok((&(&self.cfg.c * &ex) * &lu.solve(&tail)?).scale_re(-1.0))
    }

    /// Right Marchenko kernel `Ω_r(w;t) = C e^{−wA} e^{tH} B`.
    pub fn marchenko_kernel(&self, w: f64, t: f64) -> Result<ComplexMatrix, SolitonError> {
        let e = matrix_exp(&(&self.h.scale_re(t) - &self.cfg.a.scale_re(w)), 1.0)?;
        Ok(&(&self.cfg.c * &e) * &self.cfg.b)
    }

    /// `(A_l(λ), A_l(λ)⁻¹)` from the closed forms.
    pub fn transmission(&self, lambda: C64) -> Result<(ComplexMatrix, ComplexMatrix), SolitonError> {
        let n = self.cfg.a.rows();
        let ia = self.cfg.a.scale(I);
        let shift = ComplexMatrix::identity(n).scale(lambda);
        let plus = Lu::new(&(&shift + &ia))?;
        let minus = Lu::new(&(&shift - &ia))?;
        if plus.is_singular() || minus.is_singular() {
            return Err(SolitonError::Pole(lambda));
        }
        let id2 = ComplexMatrix::identity(2);
        let al = &id2 - &(&(&self.cfg.c * &self.p_r_inv) * &plus.solve(&self.cfg.b)?).scale(I);
        let al_inv = &id2 + &(&self.cfg.c * &minus.solve(&(&self.p_r_inv * &self.cfg.b))?).scale(I);
        Ok((al, al_inv))
    }

    /// Finds points of the singular locus at fixed `t` on `[x_min, x_max]`.
    pub fn singular_locus(&self, t: f64, x_range: (f64, f64), n_samples: usize) -> Result<SingularLocusReport, SolitonError> {
        assert!(n_samples >= 2, "need at least two samples");
        let (lo, hi) = x_range;
        let step = (hi - lo) / (n_samples - 1) as f64;
        let xs: Vec<f64> = (0..n_samples).map(|k| lo + step * k as f64).collect();
        let d: Vec<f64> = xs.iter().map(|&x| self.scaled_det(x, t)).collect::<Result<_, _>>()?;
        let mut singular_points = Vec::new();
        let mut minima = Vec::new();
        for k in 0..n_samples {
            let left = if k == 0 { f64::INFINITY } else { d[k - 1] };
            let right = if k + 1 == n_samples { f64::INFINITY } else { d[k + 1] };
            if d[k] > left || d[k] > right || (d[k] == left && k > 0) {
                continue;
            }
            let a = xs[k.saturating_sub(1)];
            let b = xs[(k + 1).min(n_samples - 1)];
            let (x, v) = golden_min(|x| self.scaled_det(x, t).unwrap_or(f64::INFINITY), a, b);
            if v < SINGULAR_REL {
                singular_points.push(x);
                minima.push(v);
            }
        }
        Ok(SingularLocusReport { t, singular_points, minima, endpoint_values: (d[0], d[n_samples - 1]) })
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x).min(fc).min(fd))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SingularLocusReport {
    pub t: f64,
    pub singular_points: Vec<f64>,
    /// Scaled determinant at each singular point.
    pub minima: Vec<f64>,
    /// Scaled determinant at the two ends of the scanned range.
    pub endpoint_values: (f64, f64),
}

/// The time generator of the right Marchenko kernel.
///
/// It is the matrix commuting with `A` for which `Ω(w;t) = C e^{−wA} e^{tH} B` obeys
/// `Ω_t = −2i(Ω_ww σ₃ − σ₃Ω_ww + Ω_w σ₃𝒬_r − 𝒬_r σ₃Ω_w)`. Matching the first `4p` w-derivatives at
/// `w = t = 0` gives a linear system for `vec H`, solved in the least-squares sense; the relative
/// residual is returned alongside.
pub fn kernel_generator(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    q_r: C64,
) -> Result<(ComplexMatrix, f64), LinalgError> {
    let n = a.rows();
    let count = 2 * n;
    let m = moments(a, b, c, count + 2);
    let s3 = sigma3();
    let qm = script_q(q_r);
    let id = ComplexMatrix::identity(n);
    let a_scale = a.norm_fro().max(f64::MIN_POSITIVE);
    let rows = n * n + 4 * count;
    let mut sys = ComplexMatrix::zeros(rows, n * n);
    let mut rhs = ComplexMatrix::zeros(rows, 1);
    // [H, A] = 0
    let comm = &a.transpose().kron(&id) - &id.kron(a);
    sys.set_block(0, 0, &comm.scale_re(1.0 / a_scale));
    let mut ca = c.clone();
    for j in 0..count {
        let block = b.transpose().kron(&ca);
        let target = (&(&(&m[j + 2] * &s3) - &(&s3 * &m[j + 2])) - &(&(&(&m[j + 1] * &s3) * &qm) - &(&(&qm * &s3) * &m[j + 1])))
            .scale(C64::new(0.0, -2.0));
        let w = 1.0 / (ca.norm_fro() * b.norm_fro()).max(f64::MIN_POSITIVE);
        sys.set_block(n * n + 4 * j, 0, &block.scale_re(w));
        rhs.set_block(n * n + 4 * j, 0, &ComplexMatrix::from_vec(4, 1, &target.vec()).scale_re(w));
        ca = &ca * a;
    }
    let x = lstsq(&sys, &rhs)?;
    let resid = (&(&sys * &x) - &rhs).norm_fro() / rhs.norm_fro().max(f64::MIN_POSITIVE);
    Ok((ComplexMatrix::from_vec(n, n, x.as_slice()), resid))
}

/// Relative defect of the dispersion relation `H² = −16A²(A² + μ²)`.
///
/// Every eigenvalue of the kernel generator is `±4iλk(λ)` at the corresponding `λ ∈ σ(iA)`,
/// the sign (sheet) being fixed by the triplet, so the relation holds without any branch choice.
pub fn dispersion_defect(a: &ComplexMatrix, h: &ComplexMatrix, mu: f64) -> f64 {
    let n = a.rows();
    let a2 = a * a;
    let rhs = (&a2 * &(&a2 + &ComplexMatrix::identity(n).scale_re(mu * mu))).scale_re(-16.0);
    (&(h * h) - &rhs).norm_fro() / rhs.norm_fro().max(f64::MIN_POSITIVE)
}

/// `q̃ = e^{2iμ²t} q`, carrying `iq_t + q_xx + 2|q|²q − 2μ²q = 0` to the focusing NLS `iq̃_t + q̃_xx + 2|q̃|²q̃ = 0`.
pub fn gauge_transform(q: C64, t: f64, mu: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * mu * mu * t) * q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TripletFile;
    use crate::families::{conjugate_pair, real_eigenvalue};
    use crate::linalg::matrix_det;
    use crate::quaternion::{is_sigma, SigmaMatrix};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fixture(text: &str) -> SolitonSolution {
        SolitonSolution::build(TripletFile::parse(text).unwrap().to_triplet().unwrap()).unwrap()
    }

    fn real_eig() -> SolitonSolution {
        fixture(include_str!("../fixtures/real_eigenvalue.json"))
    }

    fn two() -> SolitonSolution {
        fixture(include_str!("../fixtures/two_solitons.json"))
    }

    /// Σ-matrix with positive determinant.
    fn random_sigma(rng: &mut StdRng) -> SigmaMatrix {
        let mut r = || rng.random_range(-1.0..1.0);
        let s = SigmaMatrix::new(c(r(), r()), c(r(), r()));
        if s.norm() < 0.2 { SigmaMatrix::identity() } else { s }
    }

    #[test]
    fn real_eigenvalue_p_and_scalar_formula() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let a = rng.random_range(0.3..2.0);
            let (b, cs) = (random_sigma(&mut rng), random_sigma(&mut rng));
            let cfg = real_eigenvalue(a, b, cs, 1.0, 0.3).unwrap();
            let sol = SolitonSolution::build_with(cfg.clone(), BuildOptions::lenient()).unwrap();
            let half = cfg.bc().scale_re(0.5 / a);
            assert!((&half - sol.p_r()).max_abs() < 1e-12 * (1.0 + half.max_abs()));
            assert!((sol.q_l() - sol.q_r()).norm() < 1e-12);
            let d = b * cs;
            let (d1, d2) = (d.s1, d.s2);
            let (b1, b2, c1, c2) = (b.s1, b.s2, cs.s1, cs.s2);
            for x in [-1.5, -0.2, 0.0, 0.7, 2.0] {
                let e = (-2.0 * a * x).exp();
                let den = (1.0 + e * d1 / (2.0 * a)).norm_sqr() + (e * d2 / (2.0 * a)).norm_sqr();
                if den < 1e-6 {
                    continue;
                }
                let num = -(c1 * b2.conj() + c2.conj() * b1.conj()) * e
                    + e * e / (2.0 * a)
                        * (-c1 * d1.conj() * b2.conj() + c1 * d2.conj() * b1.conj() - c2.conj() * d2 * b2.conj()
                            - c2.conj() * d1 * b1.conj());
                let expect = sol.q_r() + 2.0 * num / den;
                assert!((sol.eval_q(x, 0.0).unwrap() - expect).norm() < 1e-10, "x = {x}");
            }
        }
    }

    #[test]
    fn conjugate_pair_p_and_det() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let a = rng.random_range(0.3..2.0);
            let w = rng.random_range(0.2..2.0);
            let (b, cs) = (random_sigma(&mut rng), random_sigma(&mut rng));
            let cfg = conjugate_pair(a, w, b, cs, 1.0, 0.0).unwrap();
            let p = solve_sylvester(&cfg.a, &cfg.bc()).unwrap();
            let d = b * cs;
            let (dp1, dm1, dp2, dm2) = (d.s1 + d.s1.conj(), d.s1 - d.s1.conj(), d.s2 + d.s2.conj(), d.s2 - d.s2.conj());
            // the displayed entries use the rotation e^{−xA} = e^{−ax}[[cos, sin], [−sin, cos]], i.e. ω of the other sign
            let s = 4.0 * (a * a + w * w);
            let wf = -w;
            let expect = ComplexMatrix::from_rows(&[
                vec![dm1 / (4.0 * a) + a * dp1 / s + wf * dp2 / s, dm2 / (4.0 * a) - a * dp2 / s + wf * dp1 / s],
                vec![dm2 / (4.0 * a) + a * dp2 / s - wf * dp1 / s, -dm1 / (4.0 * a) + a * dp1 / s + wf * dp2 / s],
            ])
            .unwrap();
            assert!((&p - &expect).max_abs() < 1e-12 * expect.max_abs());
            let det = ((dp1 * dp1 + dp2 * dp2) / (16.0 * (a * a + w * w)) - (dm1 * dm1 + dm2 * dm2) / (16.0 * a * a)).re;
            assert!(det > 0.0);
            assert!((matrix_det(&p).unwrap() - det).norm() < 1e-12 * det);
        }
    }

    #[test]
    fn zero_b_is_rejected() {
        let cfg = real_eigenvalue(1.0, SigmaMatrix::zero(), SigmaMatrix::identity(), 1.0, 0.0).unwrap();
        assert!(matches!(
            SolitonSolution::build(cfg),
            Err(SolitonError::Triplet(TripletError::NotMinimal(_)))
        ));
    }

    #[test]
    fn solution_invariants() {
        for sol in [real_eig(), two()] {
            let cfg = sol.cfg();
            let lhs = &(&cfg.a * sol.p_r()) + &(sol.p_r() * &cfg.a);
            assert!((&lhs - &cfg.bc()).max_abs() < 1e-10 * cfg.bc().max_abs());
            assert!(is_sigma(sol.p_r(), 1e-10).unwrap());
            assert!(is_sigma(sol.h(), 1e-9).unwrap());
            assert!(cfg.a.commutator(sol.h()).max_abs() < 1e-8 * (1.0 + sol.h().max_abs()));
            assert!((sol.q_l().norm() - sol.mu()).abs() < 1e-8);
            assert!((sol.q_r().norm() - sol.mu()).abs() < 1e-12);
            assert!(dispersion_defect(&cfg.a, sol.h(), sol.mu()) < 1e-10);
        }
    }

    #[test]
    fn incompatible_triplet_needs_lenient_build() {
        let cfg = real_eigenvalue(1.0, SigmaMatrix::identity(), SigmaMatrix::new(c(0.3, 0.4), c(0.2, -0.1)), 1.0, 0.0).unwrap();
        assert!(matches!(SolitonSolution::build(cfg.clone()), Err(SolitonError::Incompatible { .. })));
        assert!(SolitonSolution::build_with(cfg, BuildOptions::lenient()).is_ok());
    }

    #[test]
    fn q_tends_to_the_boundary_values() {
        let sol = two();
        let rate = 2.0 * sol.decay_rate();
        for t in [0.0, 0.3] {
            let far = 30.0 / rate;
            assert!((sol.eval_q(far, t).unwrap() - sol.q_r()).norm() < 1e-10);
            assert!((sol.eval_q(-far, t).unwrap() - sol.q_l()).norm() < 1e-10);
        }
        // exponential approach at rate 2 min Re σ(A)
        let e1 = (sol.eval_q(-8.0, 0.0).unwrap() - sol.q_l()).norm();
        let e2 = (sol.eval_q(-10.0, 0.0).unwrap() - sol.q_l()).norm();
        assert!(e2 < e1 * (-1.5 * rate).exp() * 10.0);
    }

    #[test]
    fn bracket_branches_agree_with_direct_inverse() {
        let sol = two();
        let cfg = sol.cfg();
        let reach = 20.0 / sol.decay_rate();
        for k in 0..=16 {
            let x = -reach + 2.0 * reach * k as f64 / 16.0;
            let t = 0.2;
            let m = &matrix_exp(&cfg.a, 2.0 * x).unwrap() * &matrix_exp(sol.h(), -t).unwrap();
            let inv = matrix_inverse(&(&m + sol.p_r())).unwrap();
            let direct = sol.q_r() + 2.0 * (&(&cfg.c.row(0) * &inv) * &cfg.b.col(1))[(0, 0)];
            assert!((sol.eval_q(x, t).unwrap() - direct).norm() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn potential_matrix_identities() {
        let sol = two();
        let mu = sol.mu();
        let mut prev = f64::INFINITY;
        for h in [2e-3, 1e-3] {
            let (x, t) = (0.4, 0.1);
            let q = |x: f64| script_q(sol.eval_q(x, t).unwrap());
            let qx = (&q(x + h) - &q(x - h)).scale_re(0.5 / h);
            let q0 = q(x);
            let rhs = &(&(&q0 * &q0) + &qx) + &ComplexMatrix::identity(2).scale_re(mu * mu);
            let err = (&sol.eval_Q(x, t).unwrap() - &rhs).max_abs();
            assert!(err < prev / 3.0);
            prev = err;
        }
        assert!(prev < 1e-5);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let (x, t) = (rng.random_range(-3.0..3.0), rng.random_range(-0.5..0.5));
            let qm = sol.eval_Q(x, t).unwrap();
            assert!(is_sigma(&qm, 1e-9 * (1.0 + qm.max_abs())).unwrap());
            let k = sol.kernel_k(x, x + 0.3, t).unwrap();
            assert!(is_sigma(&k, 1e-9 * (1.0 + k.max_abs())).unwrap());
        }
        let far = 12.0 / sol.decay_rate();
        let decay = (-2.0 * far * sol.decay_rate()).exp();
        assert!(sol.eval_Q(far, 0.0).unwrap().max_abs() < 1e3 * decay);
    }

    #[test]
    fn kernel_diagonal_is_half_the_potential_integral() {
        let sol = real_eig();
        let (x, t) = (-0.3, 0.15);
        let end = x + 40.0 / sol.decay_rate();
        let n = 4000;
        let h = (end - x) / n as f64;
        let mut acc = ComplexMatrix::zeros(2, 2);
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += &sol.eval_Q(x + h * k as f64, t).unwrap().scale_re(w * h / 3.0);
        }
        let k = sol.kernel_k(x, x, t).unwrap();
        assert!((&k - &acc.scale_re(0.5)).max_abs() < 1e-8);
    }

    #[test]
    fn kernel_forms_agree() {
        let sol = two();
        for (x, y, t) in [(0.3, 0.8, 0.1), (-2.0, -1.0, 0.0), (1.5, 4.0, -0.2)] {
            let k1 = sol.kernel_k(x, y, t).unwrap();
            let k2 = sol.kernel_k_direct(x, y, t).unwrap();
            assert!((&k1 - &k2).max_abs() < 1e-9 * (1.0 + k1.max_abs()));
        }
    }

    #[test]
    fn transmission_identities() {
        let sol = two();
        let n = sol.cfg().a.rows();
        let ia = sol.cfg().a.scale(I);
        for lambda in [c(0.3, 0.0), c(-1.7, 0.0), c(2.0, 0.5), c(0.1, 3.0)] {
            let (al, inv) = sol.transmission(lambda).unwrap();
            assert!((&(&al * &inv) - &ComplexMatrix::identity(2)).max_abs() < 1e-9);
            let shift = ComplexMatrix::identity(n).scale(lambda);
            let ratio = matrix_det(&(&shift + &ia)).unwrap() / matrix_det(&(&shift - &ia)).unwrap();
            assert!((matrix_det(&inv).unwrap() - ratio).norm() < 1e-9 * ratio.norm());
        }
        let (big, _) = sol.transmission(c(1e8, 0.0)).unwrap();
        assert!((&big - &ComplexMatrix::identity(2)).max_abs() < 1e-6);
        let pole = I * sol.cfg().a[(0, 0)];
        let single = real_eig();
        assert!(matches!(single.transmission(pole), Err(SolitonError::Pole(_))));
    }

    #[test]
    fn gauge_examples() {
        let q = c(0.3, -0.7);
        assert_eq!(gauge_transform(q, 0.0, 1.3), q);
        assert!((gauge_transform(q, 2.1, 0.8).norm() - q.norm()).abs() < 1e-15);
        assert!((gauge_transform(c(1.0, 0.0), std::f64::consts::FRAC_PI_2, 1.0) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_locus_of_negative_multiple() {
        let a = 1.3;
        let d1 = -0.8;
        let cfg = real_eigenvalue(a, SigmaMatrix::identity(), SigmaMatrix::identity().scale(d1), 1.0, 0.0).unwrap();
        let sol = SolitonSolution::build_with(cfg, BuildOptions::lenient()).unwrap();
        let expect = (-d1 / (2.0 * a)).ln() / (2.0 * a);
        // e^{−tH} is the identity again after half a period of the ±4iaμ spectrum
        for t in [0.0, std::f64::consts::PI / (2.0 * a * sol.mu())] {
            let r = sol.singular_locus(t, (-4.0, 4.0), 801).unwrap();
            assert_eq!(r.singular_points.len(), 1, "t = {t}");
            assert!((r.singular_points[0] - expect).abs() < 1e-6);
            assert!(r.endpoint_values.0 > 0.0 && r.endpoint_values.1 > 0.0);
            assert!(matches!(sol.eval_q(expect, t), Err(SolitonError::SingularPoint { .. })));
        }
        let off = sol.singular_locus(0.1, (-4.0, 4.0), 801).unwrap();
        assert!(off.singular_points.is_empty());
    }

    #[test]
    fn singular_locus_empty_for_generic_data() {
        let r = two().singular_locus(0.0, (-10.0, 10.0), 401).unwrap();
        assert!(r.singular_points.is_empty());
        let cfg = real_eigenvalue(1.0, SigmaMatrix::identity(), SigmaMatrix::new(c(-0.8, 0.0), c(0.05, 0.0)), 1.0, 0.0).unwrap();
        let sol = SolitonSolution::build_with(cfg, BuildOptions::lenient()).unwrap();
        assert!(sol.singular_locus(0.0, (-4.0, 4.0), 801).unwrap().singular_points.is_empty());
    }

    #[test]
    fn corrupted_p_changes_the_potential() {
        let sol = real_eig();
        let bad = sol.clone().with_corrupted_p_r(1.5);
        assert!((sol.eval_q(0.2, 0.0).unwrap() - bad.eval_q(0.2, 0.0).unwrap()).norm() > 1e-3);
    }
}
