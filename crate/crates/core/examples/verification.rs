//! Runs the full check suite on a fixture and a direct-scattering round trip.

use quatnls::config::TripletFile;
use quatnls::soliton::SolitonSolution;
use quatnls::verify::{classify_case, round_trip, run_suite, Level};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/real_eigenvalue.json");
    let sol = SolitonSolution::build(TripletFile::load(path).unwrap().to_triplet().unwrap()).unwrap();

    let report = run_suite(&sol, Level::Full);
    for c in &report.checks {
        println!("{:<32} {:>10.3e}  {}", c.name, c.residual, if c.pass { "ok" } else { "FAIL" });
    }
    println!("overall: {}", if report.pass { "pass" } else { "fail" });

    let rt = round_trip(&sol, 0.0, 6).unwrap();
    println!("transmission error {:.2e}, reflection {:.2e} at lambda = {:?}", rt.transmission_error, rt.reflection_norm, rt.lambdas);
    println!("threshold: {:?}", classify_case(&sol).unwrap());

    let bad = run_suite(&sol.with_corrupted_p_r(1.5), Level::Fast);
    println!("with P scaled by 1.5 the suite {}", if bad.pass { "still passes" } else { "fails" });
}
