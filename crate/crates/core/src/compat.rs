//! Completing a rough triplet guess to one whose kernel yields an NLS potential.
//!
//! For fixed `A` the compatibility residuals are bilinear in `(B, C)` and smooth in `θ_r`, and there
//! are fewer of them than free real parameters, so a minimum-norm Gauss–Newton iteration started at
//! the guess lands on a nearby compatible triplet. The norms of `B` and `C` are pinned to their
//! initial values to exclude the trivial solution.

use crate::linalg::{condition_number, solve, solve_sylvester, ComplexMatrix, C64};
use crate::quaternion::SigmaMatrix;
use crate::triplet::{compatibility_residuals, TripletConfig, TripletError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompletionError {
    #[error(transparent)]
    Triplet(#[from] TripletError),
    #[error("iteration stalled with residual {0:e}")]
    Stalled(f64),
    #[error("completed triplet is degenerate (cond P_r = {0:e})")]
    Degenerate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Reject results whose Sylvester solution is worse conditioned than this.
    pub max_cond_p: f64,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        Self { max_iter: 200, tol: 1e-13, max_cond_p: 1e8 }
    }
}

struct Layout {
    p: usize,
}

impl Layout {
    fn len(&self) -> usize {
        8 * self.p + 1
    }

    fn pack(&self, b: &ComplexMatrix, c: &ComplexMatrix, theta: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        for k in 0..self.p {
            let s = SigmaMatrix::from_block(b, k, 0);
            v.extend([s.s1.re, s.s1.im, s.s2.re, s.s2.im]);
        }
        for k in 0..self.p {
            let s = SigmaMatrix::from_block(c, 0, k);
            v.extend([s.s1.re, s.s1.im, s.s2.re, s.s2.im]);
        }
        v.push(theta);
        v
    }

    fn unpack(&self, v: &[f64]) -> (ComplexMatrix, ComplexMatrix, f64) {
        let n = 2 * self.p;
        let mut b = ComplexMatrix::zeros(n, 2);
        let mut c = ComplexMatrix::zeros(2, n);
        for k in 0..self.p {
            let o = 4 * k;
            let s = SigmaMatrix::new(C64::new(v[o], v[o + 1]), C64::new(v[o + 2], v[o + 3]));
            b.set_block(2 * k, 0, &s.to_matrix());
            let o = 4 * (self.p + k);
            let s = SigmaMatrix::new(C64::new(v[o], v[o + 1]), C64::new(v[o + 2], v[o + 3]));
            c.set_block(0, 2 * k, &s.to_matrix());
        }
        (b, c, v[8 * self.p])
    }
}

fn residual(
    layout: &Layout,
    a: &ComplexMatrix,
    mu: f64,
    norms: (f64, f64),
    v: &[f64],
) -> Vec<f64> {
    let (b, c, theta) = layout.unpack(v);
    let mut r: Vec<f64> = compatibility_residuals(a, &b, &c, C64::from_polar(mu, theta))
        .into_iter()
        .flat_map(|z| [z.re, z.im])
        .collect();
    let nb: f64 = v[..4 * layout.p].iter().map(|x| x * x).sum();
    let nc: f64 = v[4 * layout.p..8 * layout.p].iter().map(|x| x * x).sum();
    r.push(nb / norms.0 - 1.0);
    r.push(nc / norms.1 - 1.0);
    r
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Moves `(B, C, θ_r)` of `guess` to a nearby triplet satisfying the NLS compatibility condition.
/// `A` and `μ` are kept.
pub fn complete_triplet(guess: &TripletConfig, opts: CompletionOptions) -> Result<TripletConfig, CompletionError> {
    let layout = Layout { p: guess.p() };
    let mut v = layout.pack(&guess.b, &guess.c, guess.theta_r);
    let norms = (
        v[..4 * layout.p].iter().map(|x| x * x).sum::<f64>(),
        v[4 * layout.p..8 * layout.p].iter().map(|x| x * x).sum::<f64>(),
    );
    if norms.0 == 0.0 || norms.1 == 0.0 {
        return Err(TripletError::Shape("B and C must be nonzero".into()).into());
    }
    let f = |v: &[f64]| residual(&layout, &guess.a, guess.mu, norms, v);
    let mut r = f(&v);
    let mut damping = 1e-6;
    for _ in 0..opts.max_iter {
        if norm(&r) < opts.tol {
            break;
        }
        // central differences are exact up to rounding for the bilinear part
        let h = 1e-6;
        let cols: Vec<Vec<f64>> = (0..v.len())
            .map(|k| {
                let mut up = v.clone();
                let mut dn = v.clone();
                up[k] += h;
                dn[k] -= h;
                f(&up).iter().zip(f(&dn)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            })
            .collect();
        let m = r.len();
        let jjt = ComplexMatrix::from_fn(m, m, |i, j| {
            let s: f64 = cols.iter().map(|col| col[i] * col[j]).sum();
            C64::new(s + if i == j { damping } else { 0.0 }, 0.0)
        });
        let rhs = ComplexMatrix::from_fn(m, 1, |i, _| C64::new(r[i], 0.0));
        let y = match solve(&jjt, &rhs) {
            Ok(y) => y,
            Err(_) => {
                damping *= 10.0;
                continue;
            }
        };
        let step: Vec<f64> = cols.iter().map(|col| -(0..m).map(|i| col[i] * y[(i, 0)].re).sum::<f64>()).collect();
        let trial: Vec<f64> = v.iter().zip(&step).map(|(a, s)| a + s).collect();
        let rt = f(&trial);
        if norm(&rt) < norm(&r) {
            v = trial;
            r = rt;
            damping = (damping * 0.1).max(1e-15);
        } else {
            damping *= 10.0;
            if damping > 1e8 {
                break;
            }
        }
    }
    if norm(&r) > opts.tol.max(1e-12) {
        return Err(CompletionError::Stalled(norm(&r)));
    }
    let (b, c, theta) = layout.unpack(&v);
    let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
    let cfg = TripletConfig::new(guess.a.clone(), b, c, guess.mu, theta)?;
    cfg.validate()?;
    let p = solve_sylvester(&cfg.a, &cfg.bc()).map_err(TripletError::from)?;
    let cond = condition_number(&p).map_err(TripletError::from)?;
    if cond > opts.max_cond_p {
        return Err(CompletionError::Degenerate(cond));
    }
    Ok(cfg)
}
