//! The `lde` command line: `query`, `odds` and `check`.
//!
//! Exit status is 0 on success, 1 for usage and input errors (bad flags,
//! unreadable or invalid files) and 2 when inference itself fails (zero
//! evidence, unbounded mass, an oracle mismatch).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::domain::Assignment;
use crate::engine::{posterior_with, Posterior, QueryOptions};
use crate::error::Error;
use crate::io::{
    load_linkage_config, load_network, posterior_json, shipped_linkage_config, to_precise_json,
    LoadOptions,
};
use crate::linkage::{afname_masses, odds_report, RecordDesc};
use crate::oracle::{run_check, RandomParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFERENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lde",
    version,
    about = "Exact inference over networks with string-valued variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Posterior of one variable given evidence.
    Query {
        /// Network file.
        #[arg(long)]
        net: PathBuf,
        /// Observations as VAR=VALUE.
        #[arg(long, num_args = 0.., value_parser = parse_observation)]
        evidence: Vec<(String, String)>,
        /// Variable to query.
        #[arg(long)]
        query: String,
        /// Elimination order, comma separated; defaults to min-fill.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        /// Keep variables that cannot influence the query.
        #[arg(long)]
        keep_barren: bool,
        /// Reject networks whose CPDs are not normalized.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Odds that two records describe the same person.
    Odds {
        /// Linkage configuration; defaults to the built-in one.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        x_fname: String,
        #[arg(long)]
        y_fname: String,
        #[arg(long)]
        x_phone: Option<String>,
        #[arg(long)]
        y_phone: Option<String>,
        /// Also show the masses of eliminating the actual first name.
        #[arg(long)]
        verbose: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compare the engine with brute-force enumeration on random networks.
    Check {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 6)]
        max_vars: usize,
        /// Largest tolerated total-variation distance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn parse_observation(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected VAR=VALUE, got `{s}`")),
    }
}

/// Whether an error comes from the input rather than from inference.
fn is_input_error(e: &Error) -> bool {
    match e {
        Error::At { source, .. } => is_input_error(source),
        Error::ZeroEvidence
        | Error::UnboundedMass { .. }
        | Error::UnsupportedRelation { .. }
        | Error::ImpossibleRecords
        | Error::ExcludedExceedsUnseen { .. } => false,
        _ => true,
    }
}

fn fail(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if is_input_error(e) {
        EXIT_USAGE
    } else {
        EXIT_INFERENCE
    }
}

/// Runs the command line with `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Query {
            net,
            evidence,
            query,
            order,
            keep_barren,
            strict,
            json,
        } => run_query(
            net,
            evidence,
            &query,
            order,
            keep_barren,
            strict,
            json,
            out,
            err,
        ),
        Command::Odds {
            config,
            x_fname,
            y_fname,
            x_phone,
            y_phone,
            verbose,
            json,
        } => run_odds(
            config, &x_fname, &y_fname, x_phone, y_phone, verbose, json, out,
        ),
        Command::Check {
            seeds,
            max_vars,
            tol,
        } => run_check_cmd(seeds, max_vars, tol, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => fail(err, &e),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_query(
    net: PathBuf,
    evidence: Vec<(String, String)>,
    query: &str,
    order: Option<Vec<String>>,
    keep_barren: bool,
    strict: bool,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> crate::Result<i32> {
    let loaded = load_network(&net, LoadOptions { strict })?;
    for w in &loaded.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let mut ev = Assignment::new();
    for (k, v) in evidence {
        ev.insert(k, v);
    }
    let opts = QueryOptions { order, keep_barren };
    let (post, _) = posterior_with(&loaded.network, &ev, query, &opts)?;
    if json {
        let _ = writeln!(out, "{}", to_precise_json(&posterior_json(&post)));
    } else {
        write_posterior(out, &post, &ev);
    }
    Ok(EXIT_OK)
}

fn write_posterior(out: &mut dyn Write, post: &Posterior, ev: &Assignment) {
    let given: Vec<String> = ev.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "P({} | {})", post.variable, given.join(", "));
    let width = post
        .explicit
        .keys()
        .map(String::len)
        .chain(std::iter::once("value".len()))
        .max()
        .unwrap_or(5);
    let _ = writeln!(out, "  {:<width$}  probability", "value");
    for (v, p) in &post.explicit {
        let _ = writeln!(out, "  {v:<width$}  {p:.12e}");
    }
    if let Some(c) = &post.complement {
        let _ = writeln!(out, "  every other value admitted by [{}]:", c.description);
        let _ = writeln!(out, "    each  {:.12e}", c.per_value);
        let _ = writeln!(out, "    total {:.12e}", c.total_mass);
    }
}

#[allow(clippy::too_many_arguments)]
fn run_odds(
    config: Option<PathBuf>,
    x_fname: &str,
    y_fname: &str,
    x_phone: Option<String>,
    y_phone: Option<String>,
    verbose: bool,
    json: bool,
    out: &mut dyn Write,
) -> crate::Result<i32> {
    let cfg = match config {
        Some(p) => load_linkage_config(&p)?,
        None => shipped_linkage_config()?,
    };
    let mut x = RecordDesc::new(x_fname)?;
    let mut y = RecordDesc::new(y_fname)?;
    if let Some(p) = x_phone {
        x = x.with_phone(&p);
    }
    if let Some(p) = y_phone {
        y = y.with_phone(&p);
    }
    let report = odds_report(&x, &y, &cfg)?;
    let masses = if verbose {
        let net = crate::linkage::build_same_network(&cfg)?;
        let (_, leaves) = afname_masses(&x, &y, &cfg)?;
        leaves
            .into_iter()
            .filter(|l| !l.mass.is_zero())
            .map(|l| {
                let value = l
                    .mass
                    .fold_constants(net.env())
                    .ok()
                    .and_then(|m| m.as_const());
                (l, value)
            })
            .collect()
    } else {
        Vec::new()
    };

    if json {
        let mut v = json!({
            "x_fname": x.fname,
            "y_fname": y.fname,
            "odds": report.odds,
            "same_likelihood": report.same_likelihood,
            "diff_likelihood": report.diff_likelihood,
            "prior_odds": report.prior_odds,
            "phone_ratio": report.phone_ratio,
        });
        if verbose {
            v["afname_masses"] = Value::Array(
                masses
                    .iter()
                    .map(|(l, value)| {
                        json!({
                            "constraints": l.constraints.to_string(),
                            "count": l.count.map(|c| c.to_string()),
                            "mass": l.mass.to_string(),
                            "value": value,
                        })
                    })
                    .collect(),
            );
        }
        let _ = writeln!(out, "{}", to_precise_json(&v));
        return Ok(EXIT_OK);
    }

    let _ = writeln!(out, "records: {} / {}", x.fname, y.fname);
    let rows = [
        ("P(names | same)", Some(report.same_likelihood)),
        ("P(names | different)", Some(report.diff_likelihood)),
        ("prior odds", Some(report.prior_odds)),
        ("phone ratio", report.phone_ratio),
        ("odds", Some(report.odds)),
    ];
    for (name, value) in rows {
        if let Some(v) = value {
            let _ = writeln!(out, "  {name:<22} {v:.12e}");
        }
    }
    if verbose {
        let _ = writeln!(out, "masses of summing out Afname:");
        for (l, value) in &masses {
            let _ = writeln!(out, "  {l}");
            if let Some(v) = value {
                let _ = writeln!(out, "    = {v:.12e}");
            }
        }
    }
    Ok(EXIT_OK)
}

fn run_check_cmd(seeds: u64, max_vars: usize, tol: f64, out: &mut dyn Write) -> crate::Result<i32> {
    let params = RandomParams {
        max_vars,
        ..RandomParams::default()
    };
    let report = run_check(0..seeds, params);
    let _ = writeln!(
        out,
        "{} networks, {} posteriors, max TV {:.3e}",
        seeds,
        report.comparisons.len(),
        report.max_tv()
    );
    for c in report.comparisons.iter().filter(|c| c.tv > tol) {
        let _ = writeln!(out, "  seed {} {}: TV {:.3e}", c.seed, c.variable, c.tv);
    }
    for (seed, e) in &report.errors {
        let _ = writeln!(out, "  seed {seed}: {e}");
    }
    if report.passed(tol) {
        let _ = writeln!(out, "ok");
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(out, "FAILED");
        Ok(EXIT_INFERENCE)
    }
}
