//! Variable elimination over tree factors.

use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{normalize, Assignment};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::label::{LabelExpr, Sym};
use crate::predicate::{solve, Atom, ConstraintSet, Literal, SolutionSet, Term};
use crate::sumout::{leaf_mass, sum_out, sum_out_large_traced, LeafMass};
use crate::table::{neumaier_sum, TableRegistry};
use crate::tree::{condition, evaluate, multiply, Factor, TreeNode};

/// Conditional distribution of `child` given `parents`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpd {
    pub child: String,
    pub parents: Vec<String>,
    pub factor: Factor,
}

impl Cpd {
    pub fn new<S: AsRef<str>>(
        child: &str,
        parents: &[S],
        tree: TreeNode,
        env: &Env,
    ) -> Result<Self> {
        let parents: Vec<String> = parents.iter().map(|p| p.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for p in &parents {
            if p == child || !seen.insert(p.clone()) {
                return Err(Error::InvalidTree(format!(
                    "CPD for `{child}` lists parent `{p}` twice or itself"
                )));
            }
        }
        let factor = Factor::new(
            std::iter::once(child.to_string()).chain(parents.iter().cloned()),
            tree,
            env,
        )?;
        factor.check_complete(env)?;
        Ok(Cpd {
            child: child.to_string(),
            parents,
            factor,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    env: Env,
    cpds: Vec<Cpd>,
}

impl Network {
    /// Checks that every variable has exactly one CPD and the parent graph is
    /// acyclic. CPDs are kept in declaration order of their children.
    pub fn new(env: Env, cpds: Vec<Cpd>) -> Result<Self> {
        let mut by_child: BTreeMap<String, Cpd> = BTreeMap::new();
        for c in cpds {
            env.domain(&c.child)?;
            if by_child.contains_key(&c.child) {
                return Err(Error::InvalidTree(format!("two CPDs for `{}`", c.child)));
            }
            by_child.insert(c.child.clone(), c);
        }
        let mut ordered = Vec::new();
        for v in env.variables() {
            let cpd = by_child
                .remove(&v.name)
                .ok_or_else(|| Error::InvalidTree(format!("no CPD for `{}`", v.name)))?;
            ordered.push(cpd);
        }
        let net = Network { env, cpds: ordered };
        net.topological_order()?;
        Ok(net)
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn tables(&self) -> &TableRegistry {
        &self.env.tables
    }

    pub fn cpds(&self) -> &[Cpd] {
        &self.cpds
    }

    pub fn cpd(&self, var: &str) -> Result<&Cpd> {
        self.cpds
            .iter()
            .find(|c| c.child == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.env
            .variables()
            .iter()
            .map(|v| v.name.clone())
            .collect()
    }

    /// Parents before children; ties in declaration order.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        let mut done: BTreeSet<&str> = BTreeSet::new();
        let mut out = Vec::new();
        while out.len() < self.cpds.len() {
            let next = self.cpds.iter().find(|c| {
                !done.contains(c.child.as_str())
                    && c.parents.iter().all(|p| done.contains(p.as_str()))
            });
            match next {
                Some(c) => {
                    done.insert(&c.child);
                    out.push(c.child.clone());
                }
                None => {
                    let stuck = self
                        .cpds
                        .iter()
                        .find(|c| !done.contains(c.child.as_str()))
                        .expect("unfinished");
                    return Err(Error::Cyclic(stuck.child.clone()));
                }
            }
        }
        Ok(out)
    }

    /// `vars` together with all their ancestors.
    pub fn ancestral_set<'a>(
        &self,
        vars: impl IntoIterator<Item = &'a str>,
    ) -> Result<BTreeSet<String>> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<String> = vars.into_iter().map(str::to_string).collect();
        while let Some(v) = stack.pop() {
            if out.insert(v.clone()) {
                stack.extend(self.cpd(&v)?.parents.iter().cloned());
            }
        }
        Ok(out)
    }

    /// Replaces the CPDs' tables (for closed-universe comparisons).
    pub fn with_tables(&self, tables: TableRegistry) -> Network {
        Network {
            env: self.env.with_tables(tables),
            cpds: self.cpds.clone(),
        }
    }
}

/// Sums the child out of a CPD and checks that every parent context gets
/// total mass 1 within `tol`. Returns a description of the first violation.
pub fn check_normalized(cpd: &Cpd, env: &Env, tol: f64) -> Result<()> {
    let bad = |detail: String| Error::NotNormalized {
        child: cpd.child.clone(),
        detail,
    };
    let summed = sum_out(&cpd.factor, &cpd.child, env).map_err(|e| bad(e.to_string()))?;
    for l in summed.root().leaves() {
        match l.fold_constants(env)?.as_const() {
            Some(c) if (c - 1.0).abs() <= tol => {}
            Some(c) => return Err(bad(format!("a parent context sums to {c}"))),
            None => return Err(bad(format!("a parent context sums to `{l}`"))),
        }
    }
    Ok(())
}

/// The single block of a large-variable posterior covering every value not
/// listed explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementBlock {
    pub description: ConstraintSet,
    pub total_mass: f64,
    pub per_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub variable: String,
    pub explicit: BTreeMap<String, f64>,
    pub complement: Option<ComplementBlock>,
}

impl Posterior {
    /// Probability of one value; values outside every block have probability 0.
    pub fn probability(&self, value: &str, tables: &TableRegistry) -> Result<f64> {
        let key = if self.complement.is_some() {
            normalize(value)
        } else {
            value.to_string()
        };
        if let Some(p) = self.explicit.get(&key) {
            return Ok(*p);
        }
        match &self.complement {
            Some(c) if c.description.admits(&key, tables)? => Ok(c.per_value),
            _ => Ok(0.0),
        }
    }

    /// Explicit mass plus complement mass.
    pub fn total(&self) -> f64 {
        neumaier_sum(
            self.explicit
                .values()
                .copied()
                .chain(self.complement.as_ref().map(|c| c.total_mass)),
        )
    }
}

/// Options of a query run.
#[derive(Debug, Clone, Default)]
pub struct QueryOptions {
    /// Elimination order to use instead of min-fill.
    pub order: Option<Vec<String>>,
    /// Keep unobserved leaves that cannot influence the query.
    pub keep_barren: bool,
}

/// Mass records of one eliminated large variable.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStep {
    pub variable: String,
    pub leaves: Vec<LeafMass>,
}

fn validate_evidence(net: &Network, evidence: &Assignment) -> Result<Assignment> {
    let mut out = Assignment::new();
    for (k, v) in evidence.iter() {
        out.insert(k, net.env.check_value(k, v)?);
    }
    Ok(out)
}

/// Variables whose CPDs take part in the computation.
fn relevant(
    net: &Network,
    targets: &[&str],
    evidence: &Assignment,
    keep_barren: bool,
) -> Result<BTreeSet<String>> {
    if keep_barren {
        return Ok(net.variable_names().into_iter().collect());
    }
    net.ancestral_set(targets.iter().copied().chain(evidence.vars()))
}

/// Conditioned CPD factors of the relevant variables.
fn conditioned_factors(
    net: &Network,
    keep: &BTreeSet<String>,
    evidence: &Assignment,
) -> Result<Vec<Factor>> {
    let mut out = Vec::new();
    for cpd in net.cpds.iter().filter(|c| keep.contains(&c.child)) {
        let mut f = cpd.factor.clone();
        for (var, value) in evidence.iter() {
            if f.scope().contains(var) {
                f = condition(&f, var, value, &net.env)?;
            }
        }
        out.push(f);
    }
    Ok(out)
}

/// Min-fill order over the interaction graph of `scopes`; ties go to large
/// variables first, then to the lexicographically smallest name.
pub fn min_fill_order(
    scopes: &[BTreeSet<String>],
    hidden: &BTreeSet<String>,
    env: &Env,
) -> Result<Vec<String>> {
    let mut adj: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for s in scopes {
        for a in s {
            let entry = adj.entry(a.clone()).or_default();
            entry.extend(s.iter().filter(|b| *b != a).cloned());
        }
    }
    let mut remaining: BTreeSet<String> = hidden.clone();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let mut best: Option<((usize, bool, String), String)> = None;
        for v in &remaining {
            let nbrs: Vec<&String> = adj.get(v).map(|n| n.iter().collect()).unwrap_or_default();
            let mut fill = 0;
            for (i, a) in nbrs.iter().enumerate() {
                for b in &nbrs[i + 1..] {
                    if !adj[*a].contains(*b) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, !env.is_large(v)?, v.clone());
            if best.as_ref().map_or(true, |(k, _)| key < *k) {
                best = Some((key, v.clone()));
            }
        }
        let (_, v) = best.expect("nonempty");
        let nbrs: Vec<String> = adj
            .remove(&v)
            .map(|n| n.into_iter().collect())
            .unwrap_or_default();
        for a in &nbrs {
            if let Some(set) = adj.get_mut(a) {
                set.remove(&v);
                set.extend(nbrs.iter().filter(|b| *b != a).cloned());
            }
        }
        remaining.remove(&v);
        order.push(v);
    }
    Ok(order)
}

/// Order in which the hidden variables of a query are eliminated.
///
/// Without a user order this is min-fill over the conditioned factors of the
/// variables relevant to the query; a user order must list each of those
/// variables once and may mention irrelevant hidden variables, which are
/// skipped.
pub fn elimination_order(
    net: &Network,
    query: Option<&str>,
    evidence: &Assignment,
    opts: &QueryOptions,
) -> Result<Vec<String>> {
    if let Some(q) = query {
        net.env.domain(q)?;
        if evidence.contains(q) {
            return Err(Error::QueryInEvidence(q.to_string()));
        }
    }
    for v in evidence.vars() {
        net.env.domain(v)?;
    }
    let targets: Vec<&str> = query.into_iter().collect();
    let keep = relevant(net, &targets, evidence, opts.keep_barren)?;
    let hidden: BTreeSet<String> = keep
        .iter()
        .filter(|v| Some(v.as_str()) != query && !evidence.contains(v))
        .cloned()
        .collect();
    match &opts.order {
        Some(user) => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for v in user {
                net.env.domain(v)?;
                if Some(v.as_str()) == query || evidence.contains(v) {
                    return Err(Error::InvalidOrder(format!("`{v}` is observed or queried")));
                }
                if !seen.insert(v.clone()) {
                    return Err(Error::InvalidOrder(format!("`{v}` listed twice")));
                }
                if hidden.contains(v) {
                    out.push(v.clone());
                }
            }
            if let Some(missing) = hidden.iter().find(|v| !seen.contains(*v)) {
                return Err(Error::InvalidOrder(format!("`{missing}` is missing")));
            }
            Ok(out)
        }
        None => {
            let scopes: Vec<BTreeSet<String>> = net
                .cpds
                .iter()
                .filter(|c| keep.contains(&c.child))
                .map(|c| {
                    c.factor
                        .scope()
                        .iter()
                        .filter(|v| !evidence.contains(v))
                        .cloned()
                        .collect()
                })
                .collect();
            min_fill_order(&scopes, &hidden, &net.env)
        }
    }
}

/// Multiplies the factors mentioning each variable in turn and sums it out.
fn eliminate(
    mut factors: Vec<Factor>,
    order: &[String],
    env: &Env,
    trace: &mut Vec<EliminationStep>,
) -> Result<Factor> {
    for y in order {
        let (with, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.scope().contains(y));
        factors = rest;
        if with.is_empty() {
            continue;
        }
        let product = multiply(&with, env)?;
        let summed = if env.is_large(y)? {
            let (f, leaves) = sum_out_large_traced(&product, y, env)?;
            trace.push(EliminationStep {
                variable: y.clone(),
                leaves,
            });
            f
        } else {
            sum_out(&product, y, env)?
        };
        factors.push(summed);
    }
    if factors.is_empty() {
        return Ok(Factor::constant(1.0));
    }
    multiply(&factors, env)
}

pub fn posterior(net: &Network, evidence: &Assignment, query: &str) -> Result<Posterior> {
    posterior_with(net, evidence, query, &QueryOptions::default()).map(|(p, _)| p)
}

/// Posterior of `query`, also returning the masses computed while
/// eliminating large variables.
pub fn posterior_with(
    net: &Network,
    evidence: &Assignment,
    query: &str,
    opts: &QueryOptions,
) -> Result<(Posterior, Vec<EliminationStep>)> {
    let evidence = validate_evidence(net, evidence)?;
    let order = elimination_order(net, Some(query), &evidence, opts)?;
    let keep = relevant(net, &[query], &evidence, opts.keep_barren)?;
    let factors = conditioned_factors(net, &keep, &evidence)?;
    let mut trace = Vec::new();
    let last = eliminate(factors, &order, &net.env, &mut trace)?;
    let post = if net.env.is_large(query)? {
        large_posterior(&last, query, &net.env)?
    } else {
        small_posterior(&last, query, &net.env)?
    };
    Ok((post, trace))
}

fn small_posterior(f: &Factor, query: &str, env: &Env) -> Result<Posterior> {
    let mut raw = BTreeMap::new();
    for v in env.small_values(query)? {
        raw.insert(
            v.clone(),
            evaluate(f, &Assignment::new().with(query, v.as_str()), env)?,
        );
    }
    let z = neumaier_sum(raw.values().copied());
    if !(z > 0.0) {
        return Err(Error::ZeroEvidence);
    }
    Ok(Posterior {
        variable: query.to_string(),
        explicit: raw.into_iter().map(|(k, p)| (k, p / z)).collect(),
        complement: None,
    })
}

/// Tables whose density of `var` appears in `label`.
fn density_tables(label: &LabelExpr, var: &str) -> BTreeSet<String> {
    label
        .to_poly()
        .0
        .iter()
        .flat_map(|m| m.syms.iter())
        .filter_map(|s| match s {
            Sym::TablePdf(v, t) if v == var => Some(t.clone()),
            _ => None,
        })
        .collect()
}

/// Value of `label` at any name none of its density tables lists.
fn unlisted_value(label: &LabelExpr, var: &str, path: &ConstraintSet, env: &Env) -> Result<f64> {
    let mut total = Vec::new();
    for m in label.to_poly().0 {
        let mut v = m.coef;
        for s in &m.syms {
            v *= match s {
                Sym::TablePdf(x, t) if x == var => env.tables.get(t)?.pnew(),
                Sym::PrSing(Term::Var(x)) if x == var => {
                    return Err(Error::UnboundedMass {
                        path: path.to_string(),
                    })
                }
                s => s.eval(&Assignment::new(), env)?,
            };
        }
        total.push(v);
    }
    Ok(neumaier_sum(total))
}

fn large_posterior(f: &Factor, query: &str, env: &Env) -> Result<Posterior> {
    let mut leaves: Vec<(ConstraintSet, &LabelExpr)> = Vec::new();
    collect_paths(f.root(), &mut ConstraintSet::new(query), &mut leaves)?;
    let mut explicit: BTreeMap<String, f64> = BTreeMap::new();
    let mut complement = None;
    for (cs, label) in leaves {
        if label.is_zero() {
            continue;
        }
        match solve(&cs, &env.tables, &env.alphabet)? {
            SolutionSet::Explicit(values) => {
                for v in values {
                    let p = label.eval(&Assignment::new().with(query, v.as_str()), env)?;
                    *explicit.entry(v).or_insert(0.0) += p;
                }
            }
            s @ SolutionSet::ComplementOfFinite { .. } => {
                let tables = density_tables(label, query);
                let mut listed = BTreeSet::new();
                for t in &tables {
                    listed.extend(env.tables.get(t)?.entries().keys().cloned());
                }
                for name in listed {
                    if s.contains(&name, &env.tables)? {
                        let p = label.eval(&Assignment::new().with(query, name.as_str()), env)?;
                        *explicit.entry(name).or_insert(0.0) += p;
                    }
                }
                let mut rest = cs.clone();
                for t in &tables {
                    rest.push(Literal::neg(Atom::in_table(Term::var(query), t.clone())));
                }
                let per_value = unlisted_value(label, query, &rest, env)?;
                let total_mass = leaf_mass(label, &rest, env)?.as_const().ok_or_else(|| {
                    Error::InvalidTree(format!("posterior label `{label}` is not closed"))
                })?;
                complement = Some(ComplementBlock {
                    description: rest,
                    total_mass,
                    per_value,
                });
            }
        }
    }
    explicit.retain(|_, p| *p != 0.0);
    let z = neumaier_sum(
        explicit
            .values()
            .copied()
            .chain(complement.as_ref().map(|c| c.total_mass)),
    );
    if !(z > 0.0) {
        return Err(Error::ZeroEvidence);
    }
    for p in explicit.values_mut() {
        *p /= z;
    }
    if let Some(c) = complement.as_mut() {
        c.total_mass /= z;
        c.per_value /= z;
    }
    Ok(Posterior {
        variable: query.to_string(),
        explicit,
        complement: complement.filter(|c| c.total_mass > 0.0),
    })
}

fn collect_paths<'a>(
    node: &'a TreeNode,
    path: &mut ConstraintSet,
    out: &mut Vec<(ConstraintSet, &'a LabelExpr)>,
) -> Result<()> {
    match node {
        TreeNode::Leaf(l) => out.push((path.clone(), l)),
        TreeNode::PredSplit { atom, yes, no } => {
            for (child, positive) in [(yes, true), (no, false)] {
                let saved = path.literals.len();
                path.push(Literal::new(atom.clone(), positive));
                collect_paths(child, path, out)?;
                path.literals.truncate(saved);
            }
        }
        TreeNode::SmallSplit { var, .. } => {
            return Err(Error::InvalidTree(format!(
                "posterior factor still splits on `{var}`"
            )))
        }
    }
    Ok(())
}

/// Joint probability of the evidence.
pub fn evidence_likelihood(net: &Network, evidence: &Assignment) -> Result<f64> {
    evidence_likelihood_with(net, evidence, &QueryOptions::default()).map(|(p, _)| p)
}

pub fn evidence_likelihood_with(
    net: &Network,
    evidence: &Assignment,
    opts: &QueryOptions,
) -> Result<(f64, Vec<EliminationStep>)> {
    let evidence = validate_evidence(net, evidence)?;
    let order = elimination_order(net, None, &evidence, opts)?;
    let keep = relevant(net, &[], &evidence, opts.keep_barren)?;
    let factors = conditioned_factors(net, &keep, &evidence)?;
    let mut trace = Vec::new();
    let last = eliminate(factors, &order, &net.env, &mut trace)?;
    Ok((evaluate(&last, &Assignment::new(), &net.env)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, VariableDecl};
    use crate::table::{Count, NameTable};

    fn chain() -> Network {
        let ab = Alphabet::new("AB").unwrap();
        let t = NameTable::new("t", vec![("A".to_string(), 0.6)], 0.1, Count::Finite(4)).unwrap();
        let env = Env::new(
            ab.clone(),
            std::iter::once(t).collect(),
            vec![
                VariableDecl::large("L", ab).unwrap(),
                VariableDecl::small("S", &["y", "n"]).unwrap(),
            ],
        )
        .unwrap();
        let prior = Cpd::new::<&str>(
            "L",
            &[],
            TreeNode::leaf(LabelExpr::table_pdf("L", "t")),
            &env,
        )
        .unwrap();
        let s_tree = TreeNode::pred(
            Atom::equal(Term::var("L"), Term::lit("A")),
            TreeNode::split(
                "S",
                vec![(&["y"][..], TreeNode::constant(0.9))],
                Some(TreeNode::constant(0.1)),
            ),
            TreeNode::split(
                "S",
                vec![(&["y"][..], TreeNode::constant(0.2))],
                Some(TreeNode::constant(0.8)),
            ),
        );
        let s = Cpd::new("S", &["L"], s_tree, &env).unwrap();
        Network::new(env, vec![prior, s]).unwrap()
    }

    #[test]
    fn prior_of_a_small_variable() {
        let net = chain();
        let p = posterior(&net, &Assignment::new(), "S").unwrap();
        assert!((p.explicit["y"] - (0.6 * 0.9 + 0.4 * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn large_posterior_has_complement_block() {
        let net = chain();
        let p = posterior(&net, &Assignment::new().with("S", "y"), "L").unwrap();
        let z = 0.6 * 0.9 + 0.4 * 0.2;
        assert!((p.explicit["A"] - 0.54 / z).abs() < 1e-12);
        let c = p.complement.as_ref().unwrap();
        assert!((c.per_value - 0.1 * 0.2 / z).abs() < 1e-12);
        assert!((c.total_mass - 0.4 * 0.2 / z).abs() < 1e-12);
        assert!((p.total() - 1.0).abs() < 1e-12);
        assert!((p.probability("b", net.tables()).unwrap() - c.per_value).abs() < 1e-15);
    }

    #[test]
    fn likelihood_and_zero_evidence() {
        let net = chain();
        let l =
            evidence_likelihood(&net, &Assignment::new().with("L", "A").with("S", "n")).unwrap();
        assert!((l - 0.06).abs() < 1e-12);
        assert_eq!(
            posterior(&net, &Assignment::new().with("S", "y"), "S").unwrap_err(),
            Error::QueryInEvidence("S".into())
        );
    }

    #[test]
    fn cpds_are_normalized() {
        let net = chain();
        for c in net.cpds() {
            check_normalized(c, net.env(), 1e-9).unwrap();
        }
        let bad = Cpd::new("S", &["L"], TreeNode::constant(0.7), net.env()).unwrap();
        assert!(matches!(
            check_normalized(&bad, net.env(), 1e-9),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn cycles_are_rejected() {
        let ab = Alphabet::new("AB").unwrap();
        let env = Env::new(
            ab,
            TableRegistry::new(),
            vec![
                VariableDecl::small("A", &["0", "1"]).unwrap(),
                VariableDecl::small("B", &["0", "1"]).unwrap(),
            ],
        )
        .unwrap();
        let a = Cpd::new("A", &["B"], TreeNode::constant(0.5), &env).unwrap();
        let b = Cpd::new("B", &["A"], TreeNode::constant(0.5), &env).unwrap();
        assert!(matches!(
            Network::new(env, vec![a, b]),
            Err(Error::Cyclic(_))
        ));
    }

    #[test]
    fn user_order_is_checked() {
        let net = chain();
        let opts = QueryOptions {
            order: Some(vec!["L".into(), "L".into()]),
            ..Default::default()
        };
        assert!(elimination_order(&net, Some("S"), &Assignment::new(), &opts).is_err());
        let opts = QueryOptions {
            order: Some(vec!["L".into()]),
            ..Default::default()
        };
        assert_eq!(
            elimination_order(&net, Some("S"), &Assignment::new(), &opts).unwrap(),
            vec!["L"]
        );
    }

    #[test]
    fn min_fill_prefers_large_on_ties() {
        let net = chain();
        let scopes = vec![["L".to_string(), "S".to_string()]
            .into_iter()
            .collect::<BTreeSet<_>>()];
        let hidden = scopes[0].clone();
        assert_eq!(
            min_fill_order(&scopes, &hidden, net.env()).unwrap(),
            vec!["L", "S"]
        );
    }
}
