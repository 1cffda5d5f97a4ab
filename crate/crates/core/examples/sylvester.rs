//! Matrix exponential and the Sylvester equation `AP + PA = BC` behind every solution.

use quatnls::families::conjugate_pair;
use quatnls::linalg::{condition_number, matrix_exp, solve_sylvester, C64};
use quatnls::quaternion::{sigma_defect, SigmaMatrix};

fn main() {
    let b = SigmaMatrix::new(C64::new(1.0, 0.3), C64::new(-0.2, 0.4));
    let c = SigmaMatrix::new(C64::new(0.6, -0.1), C64::new(0.5, 0.0));
    let cfg = conjugate_pair(0.8, 1.3, b, c, 1.0, 0.0).unwrap();

    let p = solve_sylvester(&cfg.a, &cfg.bc()).unwrap();
    let res = &(&(&cfg.a * &p) + &(&p * &cfg.a)) - &cfg.bc();
    println!("P = {p:?}");
    println!("residual {:.2e}, cond P {:.3}, Σ defect {:.2e}", res.max_abs(), condition_number(&p).unwrap(), sigma_defect(&p).unwrap());

    // P is also the integral of e^{-sA} BC e^{-sA}; check it by trapezoid on [0, 40]
    let n = 4000;
    let h = 40.0 / n as f64;
    let mut acc = quatnls::linalg::ComplexMatrix::zeros(2, 2);
    for k in 0..=n {
        let e = matrix_exp(&cfg.a, -(k as f64) * h).unwrap();
        let w = if k == 0 || k == n { 0.5 * h } else { h };
        acc = &acc + &(&(&e * &cfg.bc()) * &e).scale(C64::new(w, 0.0));
    }
    println!("quadrature vs solve: {:.2e}", (&acc - &p).max_abs());
}
