//! Sums the actual first name out of the same-person network after observing
//! DAVID and DAVIG, printing every leaf mass and how many names it covers.
//!
//!     cargo run --example davis_masses

use lde::io::shipped_linkage_config;
use lde::linkage::{afname_masses, RecordDesc};

fn main() -> lde::Result<()> {
    let cfg = shipped_linkage_config()?;
    let x = RecordDesc::new("DAVID")?;
    let y = RecordDesc::new("DAVIG")?;
    let (factor, leaves) = afname_masses(&x, &y, &cfg)?;
    for leaf in leaves.iter().filter(|l| !l.mass.is_zero()) {
        println!("{leaf}");
    }
    println!(
        "\nresult over {:?}:\n{}",
        factor.scope(),
        factor.root().pretty()
    );
    Ok(())
}
