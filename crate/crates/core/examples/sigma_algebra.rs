//! Σ-matrices as quaternions, and the nonnegative determinant of a Σ-block matrix.

use quatnls::linalg::{matrix_det, C64};
use quatnls::quaternion::{block_det, phi, sigma_det, SigmaBlockMatrix, SigmaMatrix};

fn main() {
    let s = SigmaMatrix::new(C64::new(0.4, -1.1), C64::new(0.7, 0.2));
    let t = SigmaMatrix::new(C64::new(-0.3, 0.5), C64::new(0.1, -0.9));
    println!("S = {:?}", s.entries());
    println!("phi(S) = {:?}", phi(&s));
    println!("det S = {:.6} (= |phi(S)|^2 = {:.6})", sigma_det(&s), phi(&s).norm_sqr());

    // products commute with the quaternion map
    let lhs = phi(&(s * t));
    let rhs = phi(&s) * phi(&t);
    println!("phi(ST) = {lhs:?}\nphi(S)phi(T) = {rhs:?}");

    let m = SigmaBlockMatrix::from_fn(3, |i, j| if i == j { s } else { t.scale(0.5 + (i + 2 * j) as f64 * 0.1) });
    let bd = block_det(&m);
    let generic = matrix_det(&m.to_matrix()).unwrap();
    println!("block det = {:.12e}, near singular: {}", bd.value, bd.near_singular);
    println!("LU det    = {:.12e} {:+.1e}i", generic.re, generic.im);
}
