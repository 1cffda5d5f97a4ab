//! Builders for the block-structured triplets used throughout the examples and tests.

use crate::linalg::{ComplexMatrix, C64};
use crate::quaternion::SigmaMatrix;
use crate::triplet::{TripletConfig, TripletError};

/// Block-diagonal `2p×2p` matrix with the given Σ-blocks.
pub fn block_diagonal(blocks: &[SigmaMatrix]) -> ComplexMatrix {
    let n = 2 * blocks.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, s) in blocks.iter().enumerate() {
        m.set_block(2 * k, 2 * k, &s.to_matrix());
    }
    m
}

/// Stacks Σ-blocks into a `2p×2` column.
pub fn block_column(blocks: &[SigmaMatrix]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2 * blocks.len(), 2);
    for (k, s) in blocks.iter().enumerate() {
        m.set_block(2 * k, 0, &s.to_matrix());
    }
    m
}

/// Places Σ-blocks side by side in a `2×2p` row.
pub fn block_row(blocks: &[SigmaMatrix]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2 * blocks.len());
    for (k, s) in blocks.iter().enumerate() {
        m.set_block(0, 2 * k, &s.to_matrix());
    }
    m
}

/// `A = aI₂`: a single soliton whose eigenvalue `ia` is purely imaginary.
pub fn real_eigenvalue(a: f64, b: SigmaMatrix, c: SigmaMatrix, mu: f64, theta_r: f64) -> Result<TripletConfig, TripletError> {
    let am = SigmaMatrix::new(C64::new(a, 0.0), C64::new(0.0, 0.0)).to_matrix();
    TripletConfig::new(am, b.to_matrix(), c.to_matrix(), mu, theta_r)
}

/// `A = [[a, ω], [−ω, a]]`: a single soliton with the conjugate pair `ω + ia`, `−ω + ia`.
pub fn conjugate_pair(
    a: f64,
    omega: f64,
    b: SigmaMatrix,
    c: SigmaMatrix,
    mu: f64,
    theta_r: f64,
) -> Result<TripletConfig, TripletError> {
    let am = SigmaMatrix::new(C64::new(a, 0.0), C64::new(-omega, 0.0)).to_matrix();
    TripletConfig::new(am, b.to_matrix(), c.to_matrix(), mu, theta_r)
}
