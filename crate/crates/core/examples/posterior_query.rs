//! Posterior over the actual first name given two recorded names. The answer
//! lists a few names explicitly and describes all others as one block.
//!
//!     cargo run --example posterior_query -- DAVID DAVIG

use lde::engine::posterior;
use lde::io::shipped_linkage_network;
use lde::Assignment;

fn main() -> lde::Result<()> {
    let mut args = std::env::args().skip(1);
    let x = args.next().unwrap_or_else(|| "DAVID".into());
    let y = args.next().unwrap_or_else(|| "DAVIG".into());
    let net = shipped_linkage_network()?.network;
    let evidence = Assignment::new()
        .with("Fname_x", x.as_str())
        .with("Fname_y", y.as_str());

    let afname = posterior(&net, &evidence, "Afname")?;
    let mut listed: Vec<_> = afname.explicit.iter().collect();
    listed.sort_by(|a, b| b.1.total_cmp(a.1));
    println!("P(Afname | Fname_x={x}, Fname_y={y})");
    for (name, p) in listed.iter().take(10) {
        println!("  {name:<10} {p:.6e}");
    }
    if let Some(c) = &afname.complement {
        println!(
            "  others [{}]: {:.6e} each, {:.6e} in total",
            c.description, c.per_value, c.total_mass
        );
    }
    println!("  total {:.15}", afname.total());

    let sex = posterior(&net, &evidence, "Sex")?;
    for (v, p) in &sex.explicit {
        println!("P(Sex={v}) = {p:.6}");
    }
    Ok(())
}
