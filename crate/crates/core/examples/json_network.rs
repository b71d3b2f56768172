//! Builds a two-variable network in the JSON file format, queries it, and
//! prints the posterior as JSON.
//!
//!     cargo run --example json_network

use lde::engine::posterior;
use lde::io::{
    parse_network, posterior_json, serialize_network, to_precise_json, LoadOptions, NoFiles,
};
use lde::Assignment;

const NETWORK: &str = r#"{
  "alphabet": "ABC",
  "variables": [
    {"name": "Word", "kind": "large"},
    {"name": "Short", "kind": "small", "values": ["yes", "no"]}
  ],
  "tables": [{"id": "words", "entries": {"A": 0.5, "AB": 0.2}, "pnew": 0.001, "n_unseen": 300}],
  "cpds": [
    {"child": "Word", "tree": {"pred": {"intable": [{"var": "Word"}, "words"]},
                               "yes": {"leaf": {"lookup": {"var": "Word", "table": "words"}}},
                               "no": {"leaf": {"pnew": "words"}}}},
    {"child": "Short", "parents": ["Word"], "tree":
      {"pred": {"inset": [{"var": "Word"}, ["A", "B", "C"]]},
       "yes": {"split": "Short", "branches": [{"values": ["yes"], "node": {"leaf": 0.9}}], "else": {"leaf": 0.1}},
       "no": {"split": "Short", "branches": [{"values": ["yes"], "node": {"leaf": 0.2}}], "else": {"leaf": 0.8}}}}
  ]
}"#;

fn main() -> lde::Result<()> {
    let loaded = parse_network(NETWORK, &NoFiles, LoadOptions { strict: true })?;
    let net = loaded.network;
    println!("{}", serialize_network(&net));
    let post = posterior(&net, &Assignment::new().with("Short", "yes"), "Word")?;
    println!("{}", to_precise_json(&posterior_json(&post)));
    Ok(())
}
