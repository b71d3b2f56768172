//! Brute-force inference over closed domains, and random test networks.
//!
//! The oracle replaces the unbounded string domain by a finite universe,
//! re-normalizes the name tables to it, and enumerates every joint state.
//! It shares no code with elimination beyond pointwise tree evaluation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Alphabet, Assignment, VariableDecl};
use crate::engine::{check_normalized, posterior, Cpd, Network, Posterior};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::label::LabelExpr;
use crate::predicate::{Atom, Term};
use crate::table::{neumaier_sum, Count, NameTable, TableRegistry};
use crate::tree::{evaluate_node, TreeNode};

/// Refuse enumerations beyond this many joint states.
pub const MAX_STATES: u128 = 10_000_000;

/// A finite set of strings standing in for the domain of every large variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedUniverse {
    strings: BTreeSet<String>,
}

impl ClosedUniverse {
    pub fn new<S: AsRef<str>>(
        strings: impl IntoIterator<Item = S>,
        alphabet: &Alphabet,
    ) -> Result<Self> {
        let mut out = BTreeSet::new();
        for s in strings {
            let s = crate::domain::normalize(s.as_ref());
            if s.is_empty() {
                return Err(Error::InvalidUniverse("empty string".into()));
            }
            alphabet.check_word(&s)?;
            out.insert(s);
        }
        if out.is_empty() {
            return Err(Error::InvalidUniverse("no strings".into()));
        }
        Ok(ClosedUniverse { strings: out })
    }

    /// Every string over `alphabet` of length `1..=max_len`.
    pub fn all_strings(alphabet: &Alphabet, max_len: usize) -> Self {
        let mut out = BTreeSet::new();
        let mut layer = vec![String::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for &c in alphabet.chars() {
                    let mut s = w.clone();
                    s.push(c);
                    next.push(s);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        ClosedUniverse { strings: out }
    }

    pub fn strings(&self) -> &BTreeSet<String> {
        &self.strings
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn contains(&self, s: &str) -> bool {
        self.strings.contains(s)
    }

    /// The tables as probability distributions over this universe: the
    /// unseen names are exactly the universe's non-entries, sharing the
    /// residual mass equally.
    pub fn restrict(&self, tables: &TableRegistry) -> Result<TableRegistry> {
        let mut out = TableRegistry::new();
        for t in tables.iter() {
            if let Some(name) = t.entries().keys().find(|n| !self.contains(n)) {
                return Err(Error::InvalidUniverse(format!(
                    "entry `{name}` of table `{}` is outside",
                    t.id()
                )));
            }
            let n = (self.len() - t.len()) as u64;
            let residual = 1.0 - t.entry_total();
            let restricted = if n == 0 {
                let total = t.entry_total();
                NameTable::new(
                    t.id(),
                    t.entries().iter().map(|(k, p)| (k.clone(), p / total)),
                    t.pnew(),
                    Count::Finite(0),
                )?
            } else {
                NameTable::new(
                    t.id(),
                    t.entries().iter().map(|(k, p)| (k.clone(), *p)),
                    residual / n as f64,
                    Count::Finite(n),
                )?
            };
            out.insert(restricted);
        }
        Ok(out)
    }
}

/// `net` with its tables restricted to `universe`.
pub fn closed_network(net: &Network, universe: &ClosedUniverse) -> Result<Network> {
    Ok(net.with_tables(universe.restrict(net.tables())?))
}

fn domain_of<'a>(env: &'a Env, var: &str, universe: &'a ClosedUniverse) -> Result<Vec<&'a str>> {
    Ok(if env.is_large(var)? {
        universe.strings().iter().map(String::as_str).collect()
    } else {
        env.small_values(var)?.iter().map(String::as_str).collect()
    })
}

/// Compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Results of one enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    /// Probability of the evidence.
    pub likelihood: f64,
    /// Unnormalized joint mass of each value of each requested variable.
    pub marginals: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Enumerates every joint state of `net` (tables already closed over
/// `universe`) consistent with `evidence`, in topological order, skipping
/// zero-probability prefixes.
pub fn enumerate(
    net: &Network,
    universe: &ClosedUniverse,
    evidence: &Assignment,
    queries: &[&str],
) -> Result<Enumeration> {
    let env = net.env();
    let order = net.topological_order()?;
    let mut domains: Vec<Vec<&str>> = Vec::with_capacity(order.len());
    let mut states: u128 = 1;
    for v in &order {
        let d = match evidence.get(v) {
            Some(x) => {
                let x = env.check_value(v, x)?;
                let full = domain_of(env, v, universe)?;
                match full.into_iter().find(|s| *s == x) {
                    Some(s) => vec![s],
                    None => {
                        return Err(Error::InvalidUniverse(format!(
                            "evidence `{v}={x}` is outside"
                        )))
                    }
                }
            }
            None => domain_of(env, v, universe)?,
        };
        states = states.saturating_mul(d.len() as u128);
        domains.push(d);
    }
    if states > MAX_STATES {
        return Err(Error::UniverseTooLarge(states));
    }
    for q in queries {
        env.domain(q)?;
    }
    let cpds: Vec<&Cpd> = order.iter().map(|v| net.cpd(v)).collect::<Result<_>>()?;
    let mut total = Acc::default();
    let mut marg: BTreeMap<String, BTreeMap<String, Acc>> = queries
        .iter()
        .map(|q| (q.to_string(), BTreeMap::new()))
        .collect();
    let mut a = Assignment::new();
    walk(
        0, 1.0, &order, &domains, &cpds, env, &mut a, &mut total, &mut marg,
    )?;
    Ok(Enumeration {
        likelihood: total.value(),
        marginals: marg
            .into_iter()
            .map(|(q, m)| (q, m.into_iter().map(|(v, acc)| (v, acc.value())).collect()))
            .collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn walk(
    depth: usize,
    weight: f64,
    order: &[String],
    domains: &[Vec<&str>],
    cpds: &[&Cpd],
    env: &Env,
    a: &mut Assignment,
    total: &mut Acc,
    marg: &mut BTreeMap<String, BTreeMap<String, Acc>>,
) -> Result<()> {
    if depth == order.len() {
        total.add(weight);
        for (q, m) in marg.iter_mut() {
            let v = a.get(q).expect("complete assignment");
            m.entry(v.to_string()).or_default().add(weight);
        }
        return Ok(());
    }
    let var = &order[depth];
    for value in &domains[depth] {
        a.insert(var.as_str(), *value);
        let p = evaluate_node(cpds[depth].factor.root(), a, env)?;
        if p != 0.0 {
            walk(
                depth + 1,
                weight * p,
                order,
                domains,
                cpds,
                env,
                a,
                total,
                marg,
            )?;
        }
    }
    a.remove(var);
    Ok(())
}

/// Exact posterior by enumeration; `net` must already be closed over `universe`.
pub fn oracle_posterior(
    net: &Network,
    universe: &ClosedUniverse,
    evidence: &Assignment,
    query: &str,
) -> Result<Posterior> {
    if evidence.contains(query) {
        return Err(Error::QueryInEvidence(query.to_string()));
    }
    let e = enumerate(net, universe, evidence, &[query])?;
    if !(e.likelihood > 0.0) {
        return Err(Error::ZeroEvidence);
    }
    Ok(Posterior {
        variable: query.to_string(),
        explicit: e.marginals[query]
            .iter()
            .map(|(v, p)| (v.clone(), p / e.likelihood))
            .collect(),
        complement: None,
    })
}

pub fn oracle_likelihood(
    net: &Network,
    universe: &ClosedUniverse,
    evidence: &Assignment,
) -> Result<f64> {
    Ok(enumerate(net, universe, evidence, &[])?.likelihood)
}

/// Total-variation distance between an engine posterior and an enumerated
/// one. Engine mass on values outside the universe counts in full.
pub fn tv_distance(
    engine: &Posterior,
    oracle: &Posterior,
    support: &[&str],
    tables: &TableRegistry,
) -> Result<f64> {
    let mut diffs = Vec::with_capacity(support.len() + 1);
    let mut inside = Vec::with_capacity(support.len());
    for v in support {
        let pe = engine.probability(v, tables)?;
        let po = oracle.explicit.get(*v).copied().unwrap_or(0.0);
        inside.push(pe);
        diffs.push((pe - po).abs());
    }
    diffs.push((engine.total() - neumaier_sum(inside)).abs());
    Ok(0.5 * neumaier_sum(diffs))
}

/// Shape of generated networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomParams {
    pub max_vars: usize,
    pub max_small_domain: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_vars: 6,
            max_small_domain: 5,
        }
    }
}

/// A generated network with its universe, sampled evidence and queries.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub seed: u64,
    /// Tables are already closed over `universe`.
    pub net: Network,
    pub universe: ClosedUniverse,
    pub evidence: Assignment,
    pub queries: Vec<String>,
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
    // put the rounding error into the last entry so the sum is 1 to the ulp
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}

/// A split of `var` with one constant leaf per value.
fn dist_tree(var: &str, values: &[String], probs: &[f64]) -> TreeNode {
    let (_, init) = values.split_last().expect("nonempty domain");
    let branches: Vec<(&[String], TreeNode)> = init
        .iter()
        .zip(probs)
        .map(|(v, p)| (std::slice::from_ref(v), TreeNode::constant(*p)))
        .collect();
    TreeNode::split(
        var,
        branches,
        Some(TreeNode::constant(probs[values.len() - 1])),
    )
}

fn random_atom(rng: &mut ChaCha8Rng, var: &str, universe: &[String], tables: &[String]) -> Atom {
    let pick = |rng: &mut ChaCha8Rng| universe.choose(rng).expect("nonempty").clone();
    match rng.gen_range(0..4) {
        0 => Atom::equal(Term::var(var), Term::lit(&pick(rng))),
        1 => Atom::single_edit(Term::var(var), Term::lit(&pick(rng))),
        2 => Atom::in_table(
            Term::var(var),
            tables.choose(rng).expect("one table").clone(),
        ),
        _ => {
            let k = rng.gen_range(1..=4);
            Atom::in_set(
                Term::var(var),
                (0..k).map(|_| pick(rng)).collect::<Vec<_>>(),
            )
        }
    }
}

/// Generates a network deterministically from `seed`.
///
/// One large root `L` with a table prior (possibly depending on a small
/// parent), optionally a large child `C` copying `L` through an error
/// variable, and small children whose CPDs test predicates on `L`.
pub fn random_network(seed: u64, params: RandomParams) -> Result<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (alphabet, max_len) = if rng.gen_bool(0.5) {
        (Alphabet::new("ABC")?, 3)
    } else {
        (Alphabet::new("AB")?, 4)
    };
    let universe = ClosedUniverse::all_strings(&alphabet, max_len);
    let strings: Vec<String> = universe.strings().iter().cloned().collect();

    let n_tables = rng.gen_range(1..=2);
    let mut tables = TableRegistry::new();
    let mut table_ids = Vec::new();
    for i in 0..n_tables {
        let id = format!("t{i}");
        let k = rng.gen_range(2..=6);
        let names: Vec<String> = strings.choose_multiple(&mut rng, k).cloned().collect();
        let covered = rng.gen_range(0.3..0.9);
        let probs: Vec<f64> = random_dist(&mut rng, k)
            .into_iter()
            .map(|p| p * covered)
            .collect();
        let n = (strings.len() - k) as u64;
        let entry_total: f64 = neumaier_sum(probs.iter().copied());
        tables.insert(NameTable::new(
            &id,
            names.into_iter().zip(probs),
            (1.0 - entry_total) / n as f64,
            Count::Finite(n),
        )?);
        table_ids.push(id);
    }

    let max_vars = params.max_vars.max(2);
    let dom = |rng: &mut ChaCha8Rng, prefix: &str| -> Vec<String> {
        let k = rng.gen_range(2..=params.max_small_domain.max(2));
        (0..k).map(|i| format!("{prefix}{i}")).collect()
    };

    let mut decls = vec![VariableDecl::large("L", alphabet.clone())?];
    let mut budget = max_vars - 1;
    let parent = if budget >= 2 && rng.gen_bool(0.3) {
        budget -= 1;
        let d = dom(&mut rng, "p");
        decls.push(VariableDecl::small("P", &d)?);
        Some(d)
    } else {
        None
    };
    let child_errors: Option<Vec<String>> = if budget >= 3 && rng.gen_bool(0.5) {
        budget -= 2;
        let mut kinds: Vec<String> = ["noerr", "sde", "ce"]
            .iter()
            .filter(|_| rng.gen_bool(0.6))
            .map(|s| s.to_string())
            .collect();
        if kinds.is_empty() {
            kinds.push("noerr".into());
        }
        if kinds.len() == 1 {
            let other = if kinds[0] == "ce" { "noerr" } else { "ce" };
            kinds.push(other.into());
        }
        kinds.sort();
        decls.push(VariableDecl::small("E", &kinds)?);
        decls.push(VariableDecl::large("C", alphabet.clone())?);
        Some(kinds)
    } else {
        None
    };
    let n_small = rng.gen_range(1..=budget.clamp(1, 3));
    let mut small_children = Vec::new();
    for i in 0..n_small {
        let name = format!("S{i}");
        let d = dom(&mut rng, "v");
        decls.push(VariableDecl::small(&name, &d)?);
        small_children.push((name, d));
    }

    let env = Env::new(alphabet.clone(), tables, decls)?;
    let mut cpds = Vec::new();

    // prior of L
    let table_prior = |rng: &mut ChaCha8Rng| -> TreeNode {
        let t = table_ids.choose(rng).expect("one table").clone();
        if rng.gen_bool(0.5) {
            TreeNode::pred(
                Atom::in_table(Term::var("L"), t.clone()),
                TreeNode::leaf(LabelExpr::table_pdf("L", t.clone())),
                TreeNode::leaf(LabelExpr::pnew(t)),
            )
        } else {
            TreeNode::leaf(LabelExpr::table_pdf("L", t))
        }
    };
    match &parent {
        Some(d) => {
            let probs = random_dist(&mut rng, d.len());
            cpds.push(Cpd::new::<&str>("P", &[], dist_tree("P", d, &probs), &env)?);
            let (_, init) = d.split_last().expect("nonempty");
            let branches: Vec<(&[String], TreeNode)> = init
                .iter()
                .map(|v| (std::slice::from_ref(v), table_prior(&mut rng)))
                .collect();
            let tree = TreeNode::split("P", branches, Some(table_prior(&mut rng)));
            cpds.push(Cpd::new("L", &["P"], tree, &env)?);
        }
        None => cpds.push(Cpd::new::<&str>("L", &[], table_prior(&mut rng), &env)?),
    }

    if let Some(kinds) = &child_errors {
        let probs = random_dist(&mut rng, kinds.len());
        cpds.push(Cpd::new::<&str>(
            "E",
            &[],
            dist_tree("E", kinds, &probs),
            &env,
        )?);
        let ce_table = table_ids.choose(&mut rng).expect("one table").clone();
        let branch = |kind: &str| -> TreeNode {
            match kind {
                "noerr" => TreeNode::pred(
                    Atom::equal(Term::var("L"), Term::var("C")),
                    TreeNode::constant(1.0),
                    TreeNode::constant(0.0),
                ),
                "sde" => TreeNode::pred(
                    Atom::single_edit(Term::var("L"), Term::var("C")),
                    TreeNode::leaf(LabelExpr::prsing(Term::var("C"))),
                    TreeNode::constant(0.0),
                ),
                _ => TreeNode::leaf(LabelExpr::table_pdf("C", ce_table.clone())),
            }
        };
        let (last, init) = kinds.split_last().expect("nonempty");
        let branches: Vec<(&[String], TreeNode)> = init
            .iter()
            .map(|k| (std::slice::from_ref(k), branch(k)))
            .collect();
        let tree = TreeNode::split("E", branches, Some(branch(last)));
        cpds.push(Cpd::new("C", &["L", "E"], tree, &env)?);
    }

    // small children of L, possibly also depending on the small variable before them
    let mut previous: Option<(String, Vec<String>)> =
        parent.as_ref().map(|d| ("P".to_string(), d.clone()));
    for (name, d) in &small_children {
        let leaf = |rng: &mut ChaCha8Rng| dist_tree(name, d, &random_dist(rng, d.len()));
        let pred_tree = |rng: &mut ChaCha8Rng| -> TreeNode {
            let atom = random_atom(rng, "L", &strings, &table_ids);
            let yes = if rng.gen_bool(0.3) {
                let inner = random_atom(rng, "L", &strings, &table_ids);
                TreeNode::pred(inner, leaf(rng), leaf(rng))
            } else {
                leaf(rng)
            };
            TreeNode::pred(atom, yes, leaf(rng))
        };
        let extra = previous.clone().filter(|_| rng.gen_bool(0.5));
        let (tree, parents) = match &extra {
            Some((pv, pd)) => {
                let (_, init) = pd.split_last().expect("nonempty");
                let cut = rng.gen_range(1..=init.len().max(1)).min(init.len());
                let first: Vec<String> = init[..cut].to_vec();
                let tree = TreeNode::split(
                    pv,
                    vec![(&first[..], pred_tree(&mut rng))],
                    Some(pred_tree(&mut rng)),
                );
                (tree, vec!["L".to_string(), pv.clone()])
            }
            None => (pred_tree(&mut rng), vec!["L".to_string()]),
        };
        cpds.push(Cpd::new(name, &parents, tree, &env)?);
        previous = Some((name.clone(), d.clone()));
    }

    let net = Network::new(env, cpds)?;
    for c in net.cpds() {
        check_normalized(c, net.env(), 1e-9)?;
    }

    // ancestral sample, then observe a random subset
    let sample = ancestral_sample(&net, &universe, &mut rng)?;
    let mut evidence = Assignment::new();
    let must_observe_c = child_errors
        .as_ref()
        .is_some_and(|k| k.iter().any(|s| s == "sde"));
    for v in net.variable_names() {
        let observe = (v == "C" && must_observe_c) || rng.gen_bool(0.4);
        if observe {
            evidence.insert(v.clone(), sample.get(&v).expect("sampled").to_string());
        }
    }
    let mut queries: Vec<String> = net
        .variable_names()
        .into_iter()
        .filter(|v| !evidence.contains(v))
        .collect();
    if queries.is_empty() {
        evidence.remove("L");
        queries.push("L".into());
    }
    Ok(RandomCase {
        seed,
        net,
        universe,
        evidence,
        queries,
    })
}

/// Draws one joint state, parents first.
pub fn ancestral_sample(
    net: &Network,
    universe: &ClosedUniverse,
    rng: &mut impl Rng,
) -> Result<Assignment> {
    let env = net.env();
    let mut a = Assignment::new();
    for v in net.topological_order()? {
        let cpd = net.cpd(&v)?;
        let values = domain_of(env, &v, universe)?;
        let mut weights = Vec::with_capacity(values.len());
        for x in &values {
            a.insert(v.as_str(), *x);
            weights.push(evaluate_node(cpd.factor.root(), &a, env)?);
        }
        let total: f64 = weights.iter().sum();
        let mut u = rng.gen_range(0.0..total);
        let mut chosen = values[values.len() - 1];
        for (x, w) in values.iter().zip(&weights) {
            if u < *w {
                chosen = x;
                break;
            }
            u -= w;
        }
        a.insert(v.as_str(), chosen);
    }
    Ok(a)
}

/// One engine-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub seed: u64,
    pub variable: String,
    pub tv: f64,
}

/// Compares every query of a case. Both sides see the closed tables.
pub fn compare_case(case: &RandomCase) -> Result<Vec<Comparison>> {
    let queries: Vec<&str> = case.queries.iter().map(String::as_str).collect();
    let e = enumerate(&case.net, &case.universe, &case.evidence, &queries)?;
    let env = case.net.env();
    let mut out = Vec::new();
    for q in &queries {
        let engine = posterior(&case.net, &case.evidence, q)?;
        let oracle = Posterior {
            variable: q.to_string(),
            explicit: e.marginals[*q]
                .iter()
                .map(|(v, p)| (v.clone(), p / e.likelihood))
                .collect(),
            complement: None,
        };
        let support = domain_of(env, q, &case.universe)?;
        out.push(Comparison {
            seed: case.seed,
            variable: q.to_string(),
            tv: tv_distance(&engine, &oracle, &support, &env.tables)?,
        });
    }
    Ok(out)
}

/// Summary of an oracle-equivalence run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub comparisons: Vec<Comparison>,
    /// Seeds whose generation or inference failed, with the error.
    pub errors: Vec<(u64, String)>,
}

impl CheckReport {
    pub fn max_tv(&self) -> f64 {
        self.comparisons.iter().map(|c| c.tv).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.errors.is_empty() && self.comparisons.iter().all(|c| c.tv <= tol)
    }
}

pub fn run_check(seeds: impl IntoIterator<Item = u64>, params: RandomParams) -> CheckReport {
    let mut report = CheckReport {
        comparisons: Vec::new(),
        errors: Vec::new(),
    };
    for seed in seeds {
        match random_network(seed, params).and_then(|c| compare_case(&c)) {
            Ok(cs) => report.comparisons.extend(cs),
            Err(e) => report.errors.push((seed, e.to_string())),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_sizes() {
        assert_eq!(
            ClosedUniverse::all_strings(&Alphabet::new("ABC").unwrap(), 3).len(),
            39
        );
        assert_eq!(
            ClosedUniverse::all_strings(&Alphabet::new("AB").unwrap(), 4).len(),
            30
        );
    }

    #[test]
    fn restriction_renormalizes() {
        let ab = Alphabet::new("AB").unwrap();
        let u = ClosedUniverse::all_strings(&ab, 2);
        let t =
            NameTable::new("t", vec![("A".to_string(), 0.5)], 1e-3, Count::Finite(500)).unwrap();
        let r = u.restrict(&std::iter::once(t).collect()).unwrap();
        let t = r.get("t").unwrap();
        assert_eq!(t.n_unseen(), Count::Finite(5));
        assert!((t.pnew() - 0.1).abs() < 1e-15);
        let outside = ClosedUniverse::new(["B"], &ab).unwrap();
        assert!(outside.restrict(&r).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_network(7, RandomParams::default()).unwrap();
        let b = random_network(7, RandomParams::default()).unwrap();
        assert_eq!(a.net, b.net);
        assert_eq!(a.evidence, b.evidence);
        assert!(a.net.cpds().len() <= 6);
    }

    #[test]
    fn first_seeds_agree_with_enumeration() {
        let report = run_check(0..5, RandomParams::default());
        assert!(report.passed(1e-9), "{report:?}");
    }

    #[test]
    fn uniform_prior_without_evidence() {
        let ab = Alphabet::new("AB").unwrap();
        let u = ClosedUniverse::all_strings(&ab, 1);
        let t = NameTable::new("t", vec![("A".to_string(), 0.5)], 0.5, Count::Finite(1)).unwrap();
        let env = Env::new(
            ab.clone(),
            std::iter::once(t).collect(),
            vec![VariableDecl::large("L", ab).unwrap()],
        )
        .unwrap();
        let cpd = Cpd::new::<&str>(
            "L",
            &[],
            TreeNode::leaf(LabelExpr::table_pdf("L", "t")),
            &env,
        )
        .unwrap();
        let net = Network::new(env, vec![cpd]).unwrap();
        let p = oracle_posterior(&net, &u, &Assignment::new(), "L").unwrap();
        assert_eq!(p.explicit["A"], 0.5);
        assert_eq!(p.explicit["B"], 0.5);
    }
}
