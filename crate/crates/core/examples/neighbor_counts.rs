//! Single-substitution neighborhoods: a word of length n over 26 letters has
//! 25n neighbors, and two words differing in one place share 24.
//!
//!     cargo run --example neighbor_counts -- DAVE DAVID

use lde::domain::Alphabet;
use lde::predicate::single_edit_neighbors;

fn main() -> lde::Result<()> {
    let alphabet = Alphabet::latin();
    let mut words: Vec<String> = std::env::args().skip(1).collect();
    if words.is_empty() {
        words = vec!["DAVE".into(), "DAVID".into(), "DAVIG".into()];
    }
    let mut sets = Vec::new();
    for w in &words {
        let n = single_edit_neighbors(w, &alphabet)?;
        println!("{w:<12} {:>4} neighbors", n.len());
        sets.push(n);
    }
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let common = sets[i].intersection(&sets[j]).count();
            println!("{} & {}: {common} in common", words[i], words[j]);
        }
    }
    Ok(())
}
