//! Compares exact elimination against brute-force enumeration on seeded
//! random networks and prints the worst total-variation distance.
//!
//!     cargo run --example oracle_check -- 100

use lde::oracle::{run_check, RandomParams};

fn main() {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let report = run_check(0..n, RandomParams::default());
    for (seed, err) in &report.errors {
        println!("seed {seed}: error: {err}");
    }
    println!(
        "{} networks, {} posteriors, max TV = {:.3e}",
        n,
        report.comparisons.len(),
        report.max_tv()
    );
    if !report.passed(1e-9) {
        std::process::exit(1);
    }
}
