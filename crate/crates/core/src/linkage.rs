//! Person identification: are two records descriptions of the same person?
//!
//! Under the "same" hypothesis both recorded first names are noisy copies of
//! one actual name; under the "different" hypothesis each record has its own
//! independent generative chain. The odds of the two likelihoods, times the
//! prior odds, decide the match.

use std::collections::BTreeMap;

use crate::domain::{Alphabet, Assignment, VariableDecl};
use crate::engine::{evidence_likelihood_with, Cpd, EliminationStep, Network, QueryOptions};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::label::LabelExpr;
use crate::predicate::{Atom, Term};
use crate::sumout::{sum_out_large_traced, LeafMass};
use crate::table::{TableRegistry, NORMALIZATION_TOL};
use crate::tree::{condition, multiply, Factor, TreeNode};

pub const SEXES: [&str; 2] = ["male", "female"];
pub const SLOPPINESS: [&str; 2] = ["sloppy", "careful"];
pub const ERRORS: [&str; 3] = ["noerr", "sde", "ce"];

/// The attributes of one record.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordDesc {
    pub fname: String,
    pub phone: Option<String>,
}

impl RecordDesc {
    pub fn new(fname: &str) -> Result<Self> {
        if fname.trim().is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(RecordDesc {
            fname: fname.trim().to_string(),
            phone: None,
        })
    }

    pub fn with_phone(mut self, phone: &str) -> Self {
        self.phone = Some(phone.to_string());
        self
    }
}

/// Phone numbers: uniform over `n_values` legal numbers; a person keeps
/// their number except with probability `move_prob`, in which case the new
/// number is again uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhoneModel {
    pub n_values: f64,
    pub move_prob: f64,
}

impl PhoneModel {
    pub fn likelihood_ratio(&self, x: &str, y: &str) -> f64 {
        let p = self.n_values;
        let same =
            (1.0 / p) * ((1.0 - self.move_prob) * f64::from(u8::from(x == y)) + self.move_prob / p);
        let diff = 1.0 / (p * p);
        same / diff
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkageConfig {
    pub alphabet: Alphabet,
    pub tables: TableRegistry,
    pub male_table: String,
    pub female_table: String,
    pub sex_prior: BTreeMap<String, f64>,
    pub sloppy_prior: BTreeMap<String, f64>,
    /// Error-type distribution for each sloppiness value.
    pub error_prior: BTreeMap<String, BTreeMap<String, f64>>,
    /// Prior probability that two records describe the same person.
    pub prior_same: f64,
    pub phone: Option<PhoneModel>,
}

fn check_distribution(name: &str, dist: &BTreeMap<String, f64>, support: &[&str]) -> Result<()> {
    let bad = |detail: String| Error::Config(format!("{name}: {detail}"));
    for k in dist.keys() {
        if !support.contains(&k.as_str()) {
            return Err(bad(format!("unknown value `{k}`")));
        }
    }
    for s in support {
        match dist.get(*s) {
            Some(p) if (0.0..=1.0).contains(p) => {}
            Some(p) => return Err(bad(format!("probability {p} of `{s}` is outside [0,1]"))),
            None => return Err(bad(format!("missing value `{s}`"))),
        }
    }
    let total: f64 = dist.values().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(bad(format!("sums to {total}, not 1")));
    }
    Ok(())
}

impl LinkageConfig {
    pub fn validate(&self) -> Result<()> {
        self.tables.get(&self.male_table)?;
        self.tables.get(&self.female_table)?;
        check_distribution("sex_prior", &self.sex_prior, &SEXES)?;
        check_distribution("sloppy_prior", &self.sloppy_prior, &SLOPPINESS)?;
        for s in SLOPPINESS {
            let d = self
                .error_prior
                .get(s)
                .ok_or_else(|| Error::Config(format!("error_prior: missing `{s}`")))?;
            check_distribution(&format!("error_prior.{s}"), d, &ERRORS)?;
        }
        if self.error_prior.len() != SLOPPINESS.len() {
            return Err(Error::Config(
                "error_prior: unknown sloppiness value".into(),
            ));
        }
        if !(self.prior_same > 0.0 && self.prior_same < 1.0) {
            return Err(Error::Config(format!(
                "prior_same {} is outside (0,1)",
                self.prior_same
            )));
        }
        if let Some(p) = &self.phone {
            if !(p.n_values >= 1.0) || !(0.0..=1.0).contains(&p.move_prob) {
                return Err(Error::Config(
                    "phone: need n_values >= 1 and move_prob in [0,1]".into(),
                ));
            }
        }
        Ok(())
    }

    fn table_for(&self, sex: &str) -> &str {
        if sex == "male" {
            &self.male_table
        } else {
            &self.female_table
        }
    }
}

fn leaves_over(var: &str, dist: &BTreeMap<String, f64>, order: &[&str]) -> TreeNode {
    let (last, init) = order.split_last().expect("nonempty support");
    let branches: Vec<(&[&str], TreeNode)> = init
        .iter()
        .map(|v| (std::slice::from_ref(v), TreeNode::constant(dist[*v])))
        .collect();
    TreeNode::split(var, branches, Some(TreeNode::constant(dist[*last])))
}

/// Variable names of one generative chain.
struct Chain<'a> {
    sex: &'a str,
    afname: &'a str,
    sloppy: &'a str,
    error: &'a str,
    fname: &'a str,
}

/// The name prior: a listed name has its table probability, any other name
/// the table's unseen-name probability.
pub fn afname_tree(cfg: &LinkageConfig, sex: &str, afname: &str) -> TreeNode {
    let by_sex = |s: &str| {
        let t = cfg.table_for(s);
        TreeNode::pred(
            Atom::in_table(Term::var(afname), t),
            TreeNode::leaf(LabelExpr::table_pdf(afname, t)),
            TreeNode::leaf(LabelExpr::pnew(t)),
        )
    };
    TreeNode::split(
        sex,
        vec![(&["male"][..], by_sex("male"))],
        Some(by_sex("female")),
    )
}

/// The recorded-name CPD: an exact copy, a single substitution, or a copy of
/// some other name drawn from the name prior.
pub fn fname_tree(
    cfg: &LinkageConfig,
    sex: &str,
    afname: &str,
    error: &str,
    fname: &str,
) -> TreeNode {
    let (a, f) = (Term::var(afname), Term::var(fname));
    let copy = |s: &str| {
        let t = cfg.table_for(s);
        TreeNode::pred(
            Atom::in_table(f.clone(), t),
            TreeNode::leaf(LabelExpr::table_pdf(fname, t)),
            TreeNode::leaf(LabelExpr::pnew(t)),
        )
    };
    TreeNode::split(
        error,
        vec![
            (
                &["noerr"][..],
                TreeNode::pred(
                    Atom::equal(a.clone(), f.clone()),
                    TreeNode::constant(1.0),
                    TreeNode::constant(0.0),
                ),
            ),
            (
                &["sde"][..],
                TreeNode::pred(
                    Atom::single_edit(a, f.clone()),
                    TreeNode::leaf(LabelExpr::prsing(f.clone())),
                    TreeNode::constant(0.0),
                ),
            ),
        ],
        Some(TreeNode::split(
            sex,
            vec![(&["male"][..], copy("male"))],
            Some(copy("female")),
        )),
    )
}

fn error_tree(cfg: &LinkageConfig, sloppy: &str, error: &str) -> TreeNode {
    let (last, init) = SLOPPINESS.split_last().expect("nonempty");
    let branches = init
        .iter()
        .map(|s| {
            (
                std::slice::from_ref(s),
                leaves_over(error, &cfg.error_prior[*s], &ERRORS),
            )
        })
        .collect();
    TreeNode::split(
        sloppy,
        branches,
        Some(leaves_over(error, &cfg.error_prior[*last], &ERRORS)),
    )
}

fn chain_decls(
    env_vars: &mut Vec<VariableDecl>,
    c: &Chain,
    alphabet: &Alphabet,
    shared: bool,
) -> Result<()> {
    if !shared {
        env_vars.push(VariableDecl::small(c.sex, &SEXES)?);
        env_vars.push(VariableDecl::large(c.afname, alphabet.clone())?);
    }
    env_vars.push(VariableDecl::small(c.sloppy, &SLOPPINESS)?);
    env_vars.push(VariableDecl::small(c.error, &ERRORS)?);
    env_vars.push(VariableDecl::large(c.fname, alphabet.clone())?);
    Ok(())
}

fn chain_cpds(cfg: &LinkageConfig, c: &Chain, env: &Env, shared: bool) -> Result<Vec<Cpd>> {
    let mut out = Vec::new();
    if !shared {
        out.push(Cpd::new::<&str>(
            c.sex,
            &[],
            leaves_over(c.sex, &cfg.sex_prior, &SEXES),
            env,
        )?);
        out.push(Cpd::new(
            c.afname,
            &[c.sex],
            afname_tree(cfg, c.sex, c.afname),
            env,
        )?);
    }
    out.push(Cpd::new::<&str>(
        c.sloppy,
        &[],
        leaves_over(c.sloppy, &cfg.sloppy_prior, &SLOPPINESS),
        env,
    )?);
    out.push(Cpd::new(
        c.error,
        &[c.sloppy],
        error_tree(cfg, c.sloppy, c.error),
        env,
    )?);
    out.push(Cpd::new(
        c.fname,
        &[c.afname, c.sex, c.error],
        fname_tree(cfg, c.sex, c.afname, c.error, c.fname),
        env,
    )?);
    Ok(out)
}

const SAME_X: Chain<'static> = Chain {
    sex: "Sex",
    afname: "Afname",
    sloppy: "SloppyX",
    error: "EFx",
    fname: "Fname_x",
};
const SAME_Y: Chain<'static> = Chain {
    sex: "Sex",
    afname: "Afname",
    sloppy: "SloppyY",
    error: "EFy",
    fname: "Fname_y",
};
const DIFF_X: Chain<'static> = Chain {
    sex: "Sex_x",
    afname: "Afname_x",
    sloppy: "SloppyX",
    error: "EFx",
    fname: "Fname_x",
};
const DIFF_Y: Chain<'static> = Chain {
    sex: "Sex_y",
    afname: "Afname_y",
    sloppy: "SloppyY",
    error: "EFy",
    fname: "Fname_y",
};

fn build(cfg: &LinkageConfig, x: &Chain, y: &Chain, shared: bool) -> Result<Network> {
    cfg.validate()?;
    let mut vars = Vec::new();
    chain_decls(&mut vars, x, &cfg.alphabet, false)?;
    chain_decls(&mut vars, y, &cfg.alphabet, shared)?;
    let env = Env::new(cfg.alphabet.clone(), cfg.tables.clone(), vars)?;
    let mut cpds = chain_cpds(cfg, x, &env, false)?;
    cpds.extend(chain_cpds(cfg, y, &env, shared)?);
    Network::new(env, cpds)
}

/// Both records describe one person: they share `Sex` and `Afname`.
pub fn build_same_network(cfg: &LinkageConfig) -> Result<Network> {
    build(cfg, &SAME_X, &SAME_Y, true)
}

/// The records describe two people drawn independently.
pub fn build_diff_network(cfg: &LinkageConfig) -> Result<Network> {
    build(cfg, &DIFF_X, &DIFF_Y, false)
}

fn name_evidence(x: &RecordDesc, y: &RecordDesc) -> Assignment {
    Assignment::new()
        .with("Fname_x", x.fname.as_str())
        .with("Fname_y", y.fname.as_str())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OddsReport {
    pub odds: f64,
    pub same_likelihood: f64,
    pub diff_likelihood: f64,
    pub prior_odds: f64,
    pub phone_ratio: Option<f64>,
    /// Large-variable eliminations of the same-person computation.
    pub same_steps: Vec<EliminationStep>,
}

pub fn odds(x: &RecordDesc, y: &RecordDesc, cfg: &LinkageConfig) -> Result<f64> {
    odds_report(x, y, cfg).map(|r| r.odds)
}

pub fn odds_report(x: &RecordDesc, y: &RecordDesc, cfg: &LinkageConfig) -> Result<OddsReport> {
    let evidence = name_evidence(x, y);
    let opts = QueryOptions::default();
    let (same, same_steps) = evidence_likelihood_with(&build_same_network(cfg)?, &evidence, &opts)?;
    let (diff, _) = evidence_likelihood_with(&build_diff_network(cfg)?, &evidence, &opts)?;
    if !(diff > 0.0) {
        return Err(Error::ImpossibleRecords);
    }
    let prior_odds = cfg.prior_same / (1.0 - cfg.prior_same);
    let phone_ratio = match (&cfg.phone, &x.phone, &y.phone) {
        (Some(m), Some(px), Some(py)) => Some(m.likelihood_ratio(px, py)),
        _ => None,
    };
    Ok(OddsReport {
        odds: same / diff * prior_odds * phone_ratio.unwrap_or(1.0),
        same_likelihood: same,
        diff_likelihood: diff,
        prior_odds,
        phone_ratio,
        same_steps,
    })
}

/// Leaf masses of eliminating `Afname` first from the same-person network
/// after observing both names: the product of the three factors that
/// mention it, summed over the names each path admits.
pub fn afname_masses(
    x: &RecordDesc,
    y: &RecordDesc,
    cfg: &LinkageConfig,
) -> Result<(Factor, Vec<LeafMass>)> {
    let net = build_same_network(cfg)?;
    let env = net.env();
    let evidence = name_evidence(x, y);
    let mut factors = Vec::new();
    for cpd in net
        .cpds()
        .iter()
        .filter(|c| c.factor.scope().contains("Afname"))
    {
        let mut f = cpd.factor.clone();
        for (var, value) in evidence.iter() {
            if f.scope().contains(var) {
                f = condition(&f, var, &env.check_value(var, value)?, env)?;
            }
        }
        factors.push(f);
    }
    let product = multiply(&factors, env)?;
    sum_out_large_traced(&product, "Afname", env)
}
