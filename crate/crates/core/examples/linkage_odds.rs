//! Odds that two records name the same person, for a few name pairs.
//!
//!     cargo run --example linkage_odds

use lde::io::shipped_linkage_config;
use lde::linkage::{odds_report, RecordDesc};

fn main() -> lde::Result<()> {
    let cfg = shipped_linkage_config()?;
    let pairs = [
        ("DAVID", "DAVID"),
        ("DAVID", "DAVIG"),
        ("DAVID", "DAVIS"),
        ("MARY", "MARY"),
        ("DAVID", "XQZT"),
    ];
    println!(
        "{:<8} {:<8} {:>14} {:>14} {:>14}",
        "x", "y", "P(.|same)", "P(.|diff)", "odds"
    );
    for (a, b) in pairs {
        let r = odds_report(&RecordDesc::new(a)?, &RecordDesc::new(b)?, &cfg)?;
        println!(
            "{a:<8} {b:<8} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.same_likelihood, r.diff_likelihood, r.odds
        );
    }
    let phone = |n: &str, p: &str| RecordDesc::new(n).map(|r| r.with_phone(p));
    let r = odds_report(
        &phone("DAVID", "5551234")?,
        &phone("DAVIG", "5551234")?,
        &cfg,
    )?;
    println!("DAVID/DAVIG with the same phone: odds {:.6e}", r.odds);
    Ok(())
}
