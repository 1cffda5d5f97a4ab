//! Builds a single soliton from a fixture and prints |q| across the core at a few times.

use quatnls::config::TripletFile;
use quatnls::soliton::{gauge_transform, SolitonSolution};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/conjugate_pair.json");
    let cfg = TripletFile::load(path).unwrap().to_triplet().unwrap();
    let sol = SolitonSolution::build(cfg).unwrap();
    println!("mu = {}, q_r = {:.4}, q_l = {:.4}", sol.mu(), sol.q_r(), sol.q_l());

    for t in [0.0, 0.25, 0.5] {
        let line: Vec<String> = (-8..=8)
            .map(|k| {
                let q = sol.eval_q(k as f64 * 0.5, t).unwrap();
                format!("{:.3}", q.norm())
            })
            .collect();
        println!("t = {t:.2}: {}", line.join(" "));
    }
    let q = sol.eval_q(0.3, 0.5).unwrap();
    println!("focusing-NLS field at (0.3, 0.5): {:.6}", gauge_transform(q, 0.5, sol.mu()));
}
