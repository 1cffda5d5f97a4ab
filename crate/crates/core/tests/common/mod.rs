#![allow(dead_code)]

use std::path::PathBuf;

use quatnls::compat::{complete_triplet, CompletionOptions};
use quatnls::config::TripletFile;
use quatnls::families::{block_column, block_row};
use quatnls::linalg::{ComplexMatrix, C64};
use quatnls::quaternion::{SigmaBlockMatrix, SigmaMatrix};
use quatnls::soliton::SolitonSolution;
use quatnls::triplet::TripletConfig;
use rand::rngs::StdRng;
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> TripletConfig {
    TripletFile::load(fixture_path(name)).unwrap().to_triplet().unwrap()
}

pub fn solution(name: &str) -> SolitonSolution {
    SolitonSolution::build(fixture(name)).unwrap()
}

/// Σ-matrix with entries uniform in the unit square, kept away from zero.
pub fn random_sigma(rng: &mut StdRng) -> SigmaMatrix {
    loop {
        let mut r = || rng.random_range(-1.0..1.0);
        let s = SigmaMatrix::new(c(r(), r()), c(r(), r()));
        if s.norm() > 0.3 {
            return s;
        }
    }
}

/// Block upper-triangular `A` with `Re σ(A) ⊂ [0.3, 1.5]`.
pub fn random_a(rng: &mut StdRng, p: usize) -> ComplexMatrix {
    let diag: Vec<SigmaMatrix> = (0..p)
        .map(|_| {
            let s = random_sigma(rng);
            SigmaMatrix::new(c(rng.random_range(0.3..1.5), s.s1.im), s.s2)
        })
        .collect();
    let upper: Vec<SigmaMatrix> = (0..p * p).map(|_| random_sigma(rng).scale(0.3)).collect();
    SigmaBlockMatrix::from_fn(p, |i, j| {
        if i == j {
            diag[i]
        } else if j > i {
            upper[i * p + j]
        } else {
            SigmaMatrix::zero()
        }
    })
    .to_matrix()
}

pub fn random_triplet(rng: &mut StdRng, p: usize, mu: f64) -> TripletConfig {
    let a = random_a(rng, p);
    let b = block_column(&(0..p).map(|_| random_sigma(rng)).collect::<Vec<_>>());
    let cm = block_row(&(0..p).map(|_| random_sigma(rng)).collect::<Vec<_>>());
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    TripletConfig::new(a, b, cm, mu, theta).unwrap()
}

/// Random triplet moved onto the NLS-compatible set.
pub fn random_compatible(rng: &mut StdRng, p: usize) -> TripletConfig {
    loop {
        let mu = rng.random_range(0.5..1.5);
        let guess = random_triplet(rng, p, mu);
        if let Ok(done) = complete_triplet(&guess, CompletionOptions::default()) {
            if SolitonSolution::build(done.clone()).is_ok() {
                return done;
            }
        }
    }
}
