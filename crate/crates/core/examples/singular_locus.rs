//! Where the solution blows up: a negative multiple `C = d B⁻¹` with `A = aI` is singular on a
//! single line, reached only at times `t = πm/(2aμ)`.

use std::f64::consts::PI;

use quatnls::families::real_eigenvalue;
use quatnls::quaternion::SigmaMatrix;
use quatnls::soliton::{BuildOptions, SolitonSolution};

fn main() {
    let (a, d) = (1.0, -0.8);
    let cfg = real_eigenvalue(a, SigmaMatrix::identity(), SigmaMatrix::identity().scale(d), 1.0, 0.0).unwrap();
    if let Err(e) = SolitonSolution::build(cfg.clone()) {
        println!("strict build: {e}");
    }
    let sol = SolitonSolution::build_with(cfg, BuildOptions::lenient()).unwrap();
    let x_star = (-d / (2.0 * a)).ln() / (2.0 * a);
    println!("predicted x* = {x_star:.12}");
    for t in [0.0, 0.1, PI / (2.0 * a * sol.mu())] {
        let r = sol.singular_locus(t, (-4.0, 4.0), 801).unwrap();
        println!("t = {t:.4}: points {:?}, scaled det at ends {:.3?}", r.singular_points, r.endpoint_values);
    }
}
