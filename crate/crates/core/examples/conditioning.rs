//! Conditions the recorded-name CPD on an observed name and prints the tree
//! before and after: table predicates on the observed name fold to numbers.
//!
//!     cargo run --example conditioning -- DAVID

use lde::io::shipped_linkage_config;
use lde::linkage::build_same_network;
use lde::tree::condition;

fn main() -> lde::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "DAVID".into());
    let net = build_same_network(&shipped_linkage_config()?)?;
    let cpd = net.cpd("Fname_x")?;
    println!(
        "P(Fname_x | Afname, Sex, EFx):\n{}",
        cpd.factor.root().pretty()
    );
    let conditioned = condition(&cpd.factor, "Fname_x", &name, net.env())?;
    println!("given Fname_x = {name}:\n{}", conditioned.root().pretty());
    Ok(())
}
