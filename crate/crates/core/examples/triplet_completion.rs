//! Validating a triplet and moving a random guess onto the set where the solution solves NLS.

use quatnls::compat::{complete_triplet, CompletionOptions};
use quatnls::config::TripletFile;
use quatnls::families::real_eigenvalue;
use quatnls::linalg::C64;
use quatnls::quaternion::SigmaMatrix;
use quatnls::soliton::SolitonSolution;
use quatnls::triplet::compatibility_defect;

fn main() {
    let b = SigmaMatrix::new(C64::new(0.9, 0.2), C64::new(0.3, -0.4));
    let c = SigmaMatrix::new(C64::new(0.5, 0.1), C64::new(-0.6, 0.7));
    let guess = real_eigenvalue(1.0, b, c, 0.9, 0.3).unwrap();
    let report = guess.validate().unwrap();
    println!("minimality: {report:?}");
    println!("compatibility defect of the guess: {:.3e}", compatibility_defect(&guess));
    match SolitonSolution::build(guess.clone()) {
        Ok(_) => println!("guess already builds"),
        Err(e) => println!("strict build refuses the guess: {e}"),
    }

    let done = complete_triplet(&guess, CompletionOptions::default()).unwrap();
    println!("after completion: {:.3e}", compatibility_defect(&done));
    let sol = SolitonSolution::build(done.clone()).unwrap();
    println!("q_r = {:.6}, q_l = {:.6}, theta_l = {:.6}", sol.q_r(), sol.q_l(), sol.theta_l());
    println!("{}", TripletFile::from_triplet(&done).to_json());
}
