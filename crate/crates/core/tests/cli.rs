use std::path::PathBuf;

use lde::cli::{run, EXIT_INFERENCE, EXIT_OK, EXIT_USAGE};
use lde::engine::posterior;
use lde::io::{load_network, parse_posterior, LoadOptions};
use lde::Assignment;

const GATE: &str = r#"{
  "alphabet": "AB",
  "variables": [
    {"name": "L", "kind": "large"},
    {"name": "S", "kind": "small", "values": ["on", "off"]},
    {"name": "T", "kind": "small", "values": ["u", "v"]}
  ],
  "tables": [{"id": "t", "entries": {"A": 0.5, "AB": 0.25}, "pnew": 0.0625, "n_unseen": 4}],
  "cpds": [
    {"child": "L", "tree": {"pred": {"intable": [{"var": "L"}, "t"]},
                            "yes": {"leaf": {"lookup": {"var": "L", "table": "t"}}},
                            "no": {"leaf": {"pnew": "t"}}}},
    {"child": "S", "parents": ["L"], "tree":
      {"pred": {"equal": [{"var": "L"}, {"lit": "A"}]},
       "yes": {"split": "S", "branches": [{"values": ["on"], "node": {"leaf": 1}}], "else": {"leaf": 0}},
       "no": {"split": "S", "branches": [{"values": ["on"], "node": {"leaf": 0}}], "else": {"leaf": 1}}}},
    {"child": "T", "tree": {"split": "T", "branches": [{"values": ["u"], "node": {"leaf": 0.25}}], "else": {"leaf": 0.75}}}
  ]
}"#;

fn net_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lde-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn lde(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lde").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn odds_verbose_shows_davis_masses() {
    let (code, out, _) = lde(&[
        "odds",
        "--x-fname",
        "DAVID",
        "--y-fname",
        "DAVIG",
        "--verbose",
    ]);
    assert_eq!(code, EXIT_OK);
    // (1/125)^2 * P(DAVIS) and 23 * (1/125)^2 * Pnew under the shipped tables
    assert!(out.contains("= 1.920000000000e-9"), "{out}");
    assert!(out.contains("= 1.472000000000e-10"), "{out}");
    assert!(out.contains("(23 values)"));
}

#[test]
fn odds_json_is_finite() {
    let (code, out, _) = lde(&["odds", "--x-fname", "DAVID", "--y-fname", "DAVIG", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let odds = v["odds"].as_f64().unwrap();
    assert!(odds.is_finite() && odds > 0.0);
}

#[test]
fn odds_with_phones() {
    let base = ["odds", "--x-fname", "DAVID", "--y-fname", "DAVIG", "--json"];
    let with = |px: &str, py: &str| {
        let mut args = base.to_vec();
        args.extend(["--x-phone", px, "--y-phone", py]);
        let (code, out, _) = lde(&args);
        assert_eq!(code, EXIT_OK);
        serde_json::from_str::<serde_json::Value>(&out).unwrap()["odds"]
            .as_f64()
            .unwrap()
    };
    assert!(with("5551234", "5551234") > with("5551234", "5559999"));
}

#[test]
fn zero_evidence_exits_2() {
    let path = net_file("gate.json", GATE);
    let (code, _, err) = lde(&[
        "query",
        "--net",
        path.to_str().unwrap(),
        "--evidence",
        "L=B",
        "S=on",
        "--query",
        "T",
    ]);
    assert_eq!(code, EXIT_INFERENCE);
    assert!(err.contains("evidence has probability zero"), "{err}");
}

#[test]
fn query_json_round_trips() {
    let path = net_file("gate2.json", GATE);
    let (code, out, _) = lde(&[
        "query",
        "--net",
        path.to_str().unwrap(),
        "--evidence",
        "S=off",
        "--query",
        "L",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let parsed = parse_posterior(&out).unwrap();
    let net = load_network(&path, LoadOptions::default()).unwrap().network;
    let direct = posterior(&net, &Assignment::new().with("S", "off"), "L").unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn query_human_output_and_order() {
    let path = net_file("gate3.json", GATE);
    let p = path.to_str().unwrap();
    let (code, out, _) = lde(&["query", "--net", p, "--evidence", "L=A", "--query", "S"]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("P(S | L=A)") && out.contains("on     1.0"),
        "{out}"
    );
    let (code, _, err) = lde(&["query", "--net", p, "--query", "S", "--order", "S"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(lde(&["query", "--net", "x.json"]).0, EXIT_USAGE);
    assert_eq!(lde(&["frobnicate"]).0, EXIT_USAGE);
    let (code, _, err) = lde(&["query", "--net", "/nonexistent/net.json", "--query", "X"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("io error"), "{err}");
    let path = net_file("gate4.json", GATE);
    let (code, _, err) = lde(&[
        "query",
        "--net",
        path.to_str().unwrap(),
        "--evidence",
        "Q=1",
        "--query",
        "S",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown variable"), "{err}");
    assert_eq!(lde(&["--help"]).0, EXIT_OK);
}

#[test]
fn non_normalized_net_warns_or_fails() {
    let path = net_file("loose.json", &GATE.replace("0.75}", "0.7}"));
    let p = path.to_str().unwrap();
    let (code, _, err) = lde(&["query", "--net", p, "--query", "S"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"), "{err}");
    let (code, _, err) = lde(&["query", "--net", p, "--query", "S", "--strict"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not normalized"), "{err}");
}

#[test]
fn check_subcommand() {
    let (code, out, _) = lde(&["check", "--seeds", "10"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.ends_with("ok\n"));
}
