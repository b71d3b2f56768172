//! Summing a variable out of a tree factor.
//!
//! Small variables are summed branch by branch. Large variables are never
//! enumerated: every leaf's label is integrated over the values its path
//! admits, using the predicate solver for finite sets and a closed form over
//! the name tables for complements.

use std::collections::BTreeSet;
use std::fmt;

use crate::domain::Assignment;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::label::{LabelExpr, Mono, Poly, Sym};
use crate::predicate::{solution_count, solve, Atom, ConstraintSet, Literal, SolutionSet, Term};
use crate::table::{neumaier_sum, Count};
use crate::tree::{merge, prune_node, Branch, Context, Factor, Op, TreeNode};

/// Mass computed at one leaf while summing out a large variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafMass {
    /// Literals on the path to the leaf that constrain the summed variable.
    pub constraints: ConstraintSet,
    /// Label before summation.
    pub label: LabelExpr,
    /// Number of admitted values, when the solver could count them.
    pub count: Option<Count>,
    /// Resulting label, free of the summed variable.
    pub mass: LabelExpr,
}

impl fmt::Display for LeafMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} => {}", self.constraints, self.label, self.mass)?;
        if let Some(c) = self.count {
            write!(f, " ({c} values)")?;
        }
        Ok(())
    }
}

/// Sums `y` out of `f`, dispatching on the size of its domain.
pub fn sum_out(f: &Factor, y: &str, env: &Env) -> Result<Factor> {
    if env.is_large(y)? {
        sum_out_large(f, y, env)
    } else {
        sum_out_small(f, y, env)
    }
}

fn check_scope(f: &Factor, y: &str) -> Result<()> {
    if f.scope().contains(y) {
        Ok(())
    } else {
        Err(Error::UnknownVariable(format!("{y} (not in factor scope)")))
    }
}

fn without(f: &Factor, y: &str) -> BTreeSet<String> {
    let mut scope = f.scope().clone();
    scope.remove(y);
    scope
}

pub fn sum_out_small(f: &Factor, y: &str, env: &Env) -> Result<Factor> {
    check_scope(f, y)?;
    let domain: BTreeSet<String> = env.small_values(y)?.iter().cloned().collect();
    let root = small_rec(f.root(), y, &domain, env)?;
    Ok(Factor::from_parts(
        without(f, y),
        prune_node(&root, &Context::new(), env)?,
    ))
}

fn small_rec(node: &TreeNode, y: &str, allowed: &BTreeSet<String>, env: &Env) -> Result<TreeNode> {
    match node {
        TreeNode::Leaf(l) => Ok(TreeNode::Leaf(l.scale(allowed.len() as f64))),
        TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        } if var == y => {
            let mut parts = Vec::new();
            let mut covered = BTreeSet::new();
            for b in branches {
                covered.extend(b.values.iter().cloned());
                let eff: BTreeSet<String> = b.values.intersection(allowed).cloned().collect();
                if !eff.is_empty() {
                    parts.push(small_rec(&b.node, y, &eff, env)?);
                }
            }
            let rest: BTreeSet<String> = allowed.difference(&covered).cloned().collect();
            if !rest.is_empty() {
                match else_branch {
                    Some(e) => parts.push(small_rec(e, y, &rest, env)?),
                    None => {
                        return Err(Error::DanglingBranch {
                            var: y.to_string(),
                            value: rest.into_iter().next().unwrap_or_default(),
                        })
                    }
                }
            }
            if parts.is_empty() {
                return Ok(TreeNode::constant(0.0));
            }
            merge(&parts, Op::Add, env)
        }
        _ => map_children(node, &mut |c| small_rec(c, y, allowed, env)),
    }
}

/// Rebuilds an internal node with transformed children.
fn map_children(
    node: &TreeNode,
    f: &mut dyn FnMut(&TreeNode) -> Result<TreeNode>,
) -> Result<TreeNode> {
    Ok(match node {
        TreeNode::Leaf(_) => f(node)?,
        TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        } => TreeNode::SmallSplit {
            var: var.clone(),
            branches: branches
                .iter()
                .map(|b| {
                    Ok(Branch {
                        values: b.values.clone(),
                        node: f(&b.node)?,
                    })
                })
                .collect::<Result<_>>()?,
            else_branch: match else_branch {
                Some(e) => Some(Box::new(f(e)?)),
                None => None,
            },
        },
        TreeNode::PredSplit { atom, yes, no } => TreeNode::PredSplit {
            atom: atom.clone(),
            yes: Box::new(f(yes)?),
            no: Box::new(f(no)?),
        },
    })
}

pub fn sum_out_large(f: &Factor, y: &str, env: &Env) -> Result<Factor> {
    sum_out_large_traced(f, y, env).map(|(f, _)| f)
}

/// Like [`sum_out_large`], also returning the mass computed at every leaf.
pub fn sum_out_large_traced(f: &Factor, y: &str, env: &Env) -> Result<(Factor, Vec<LeafMass>)> {
    check_scope(f, y)?;
    if !env.is_large(y)? {
        return Err(Error::InvalidDomain {
            var: y.to_string(),
            reason: "expected a large variable".into(),
        });
    }
    let pruned = prune_node(f.root(), &Context::new(), env)?;
    let mut trace = Vec::new();
    let root = large_rec(&pruned, y, &mut Vec::new(), env, &mut trace)?;
    let root = prune_node(&root, &Context::new(), env)?;
    Ok((Factor::from_parts(without(f, y), root), trace))
}

fn large_rec(
    node: &TreeNode,
    y: &str,
    path: &mut Vec<Literal>,
    env: &Env,
    trace: &mut Vec<LeafMass>,
) -> Result<TreeNode> {
    match node {
        TreeNode::Leaf(label) => leaf_sum(label, y, path, env, trace),
        TreeNode::PredSplit { atom, yes, no } if atom.mentions(y) => {
            let mut parts = Vec::with_capacity(2);
            for (child, positive) in [(yes, true), (no, false)] {
                path.push(Literal::new(atom.clone(), positive));
                let r = large_rec(child, y, path, env, trace);
                path.pop();
                parts.push(r?);
            }
            merge(&parts, Op::Add, env)
        }
        TreeNode::PredSplit { atom, yes, no } => {
            let mut kids = Vec::with_capacity(2);
            for (child, positive) in [(yes, true), (no, false)] {
                path.push(Literal::new(atom.clone(), positive));
                let r = large_rec(child, y, path, env, trace);
                path.pop();
                kids.push(r?);
            }
            let no = kids.pop().expect("two children");
            let yes = kids.pop().expect("two children");
            Ok(TreeNode::PredSplit {
                atom: atom.clone(),
                yes: Box::new(yes),
                no: Box::new(no),
            })
        }
        TreeNode::SmallSplit { .. } => {
            map_children(node, &mut |c| large_rec(c, y, path, env, trace))
        }
    }
}

fn describe(path: &[Literal]) -> String {
    if path.is_empty() {
        return "true".into();
    }
    path.iter()
        .map(Literal::to_string)
        .collect::<Vec<_>>()
        .join(" & ")
}

fn leaf_sum(
    label: &LabelExpr,
    y: &str,
    path: &[Literal],
    env: &Env,
    trace: &mut Vec<LeafMass>,
) -> Result<TreeNode> {
    let on_y: Vec<&Literal> = path.iter().filter(|l| l.atom.mentions(y)).collect();
    if label.is_zero() {
        return Ok(TreeNode::constant(0.0));
    }
    let (grounded, relational): (Vec<&Literal>, Vec<&Literal>) =
        on_y.iter().partition(|l| l.atom.vars().len() == 1);
    if relational.is_empty() {
        let mut cs = ConstraintSet::new(y);
        for l in grounded {
            cs.push(l.clone());
        }
        let solution = solve(&cs, &env.tables, &env.alphabet)?;
        let count = solution_count(&solution, &env.tables).ok();
        let mass = mass_over(label, y, &cs, &solution, env)?;
        trace.push(LeafMass {
            constraints: cs,
            label: label.clone(),
            count,
            mass: mass.clone(),
        });
        return Ok(TreeNode::Leaf(mass));
    }
    // y = z for another variable z: the sum collapses onto y := z.
    let partner = relational.iter().find_map(|l| match (&l.atom, l.positive) {
        (Atom::Equal(Term::Var(a), Term::Var(b)), true) => {
            Some(if a == y { b.clone() } else { a.clone() })
        }
        _ => None,
    });
    if let Some(z) = partner {
        let guards = on_y.iter().map(|l| (l.atom.rename(y, &z), l.positive));
        return guarded(guards, TreeNode::Leaf(label.rename(y, &z)), env);
    }
    // finitely many candidates: ground y at each and keep the relations as
    // tests on the other variables
    let mut cs = ConstraintSet::new(y);
    for l in &grounded {
        cs.push((*l).clone());
    }
    if let SolutionSet::Explicit(values) = solve(&cs, &env.tables, &env.alphabet)? {
        let mut parts = Vec::with_capacity(values.len());
        for v in &values {
            let guards = relational.iter().map(|l| (l.atom.ground(y, v), l.positive));
            let leaf = TreeNode::Leaf(label.ground(y, v, env)?.fold_constants(env)?);
            parts.push(guarded(guards, leaf, env)?);
        }
        if parts.is_empty() {
            return Ok(TreeNode::constant(0.0));
        }
        return merge(&parts, Op::Add, env);
    }
    if let Some(mass) = neighbor_mass(label, y, &on_y) {
        return Ok(TreeNode::Leaf(mass));
    }
    // y != z: everything the other literals admit, minus z itself when it
    // is admitted
    let partners: BTreeSet<&str> = relational
        .iter()
        .filter_map(|l| match (&l.atom, l.positive) {
            (Atom::Equal(Term::Var(a), Term::Var(b)), false) => {
                Some(if a == y { b.as_str() } else { a.as_str() })
            }
            _ => None,
        })
        .collect();
    let only_inequalities = relational
        .iter()
        .all(|l| matches!(l.atom, Atom::Equal(..)) && !l.positive);
    if let (true, Some(&z)) = (only_inequalities && partners.len() == 1, partners.first()) {
        let solution = solve(&cs, &env.tables, &env.alphabet)?;
        let count = solution_count(&solution, &env.tables).ok();
        let all = mass_over(label, y, &cs, &solution, env)?;
        trace.push(LeafMass {
            constraints: cs.clone(),
            label: label.clone(),
            count,
            mass: all.clone(),
        });
        let without_z = all.add(&label.rename(y, z).scale(-1.0));
        let guards = grounded.iter().map(|l| (l.atom.rename(y, z), l.positive));
        return guarded_or(guards, TreeNode::Leaf(without_z), TreeNode::Leaf(all), env);
    }
    Err(Error::UnsupportedRelation {
        var: y.to_string(),
        reason: format!(
            "relational constraint `{}` over unboundedly many values",
            relational[0]
        ),
        path: describe(path),
    })
}

/// `leaf` under a chain of tests; a failed test leads to zero. Tests decided
/// without an assignment are folded.
fn guarded(
    guards: impl DoubleEndedIterator<Item = (Atom, bool)>,
    leaf: TreeNode,
    env: &Env,
) -> Result<TreeNode> {
    guarded_or(guards, leaf, TreeNode::constant(0.0), env)
}

/// Like [`guarded`] with `fallback` instead of zero.
fn guarded_or(
    guards: impl DoubleEndedIterator<Item = (Atom, bool)>,
    leaf: TreeNode,
    fallback: TreeNode,
    env: &Env,
) -> Result<TreeNode> {
    let mut result = leaf;
    for (atom, positive) in guards.rev() {
        match atom.decide(&env.tables)? {
            Some(b) if b == positive => {}
            Some(_) => return Ok(fallback),
            None => {
                result = if positive {
                    TreeNode::pred(atom, result, fallback.clone())
                } else {
                    TreeNode::pred(atom, fallback.clone(), result)
                };
            }
        }
    }
    Ok(result)
}

/// `Σ_y [singlet(y, z)] · prsing(y) · rest = rest`: the neighbors of `z`
/// number exactly `1 / prsing(z)`, and every neighbor has the length of `z`.
/// Applies only when that single literal is all that constrains `y` and
/// every term carries exactly one `prsing(y)`.
fn neighbor_mass(label: &LabelExpr, y: &str, on_y: &[&Literal]) -> Option<LabelExpr> {
    let [l] = on_y else { return None };
    if !l.positive || !matches!(l.atom, Atom::SingleEdit(Term::Var(_), Term::Var(_))) {
        return None;
    }
    let mut out = Poly::default();
    for m in label.to_poly().0 {
        let (on, rest): (Vec<Sym>, Vec<Sym>) = m.syms.into_iter().partition(|s| s.var() == Some(y));
        if on != [Sym::PrSing(Term::Var(y.to_string()))] {
            return None;
        }
        out.push(Mono {
            coef: m.coef,
            syms: rest,
        });
    }
    Some(out.to_expr())
}

/// Sum of `label` over every value of `y` admitted by `constraints`.
///
/// The result no longer mentions `y`; symbols of other variables stay
/// symbolic, ground symbols are folded into numbers.
pub fn leaf_mass(label: &LabelExpr, constraints: &ConstraintSet, env: &Env) -> Result<LabelExpr> {
    let solution = solve(constraints, &env.tables, &env.alphabet)?;
    mass_over(label, &constraints.subject, constraints, &solution, env)
}

fn mass_over(
    label: &LabelExpr,
    y: &str,
    cs: &ConstraintSet,
    solution: &SolutionSet,
    env: &Env,
) -> Result<LabelExpr> {
    let mut out = Poly::default();
    for m in label.to_poly().0 {
        let (on_y, rest): (Vec<Sym>, Vec<Sym>) =
            m.syms.into_iter().partition(|s| s.var() == Some(y));
        let sum = match solution {
            SolutionSet::Explicit(values) => {
                let mut terms = Vec::with_capacity(values.len());
                for v in values {
                    terms.push(product_at(&on_y, y, v, env)?);
                }
                neumaier_sum(terms)
            }
            SolutionSet::ComplementOfFinite {
                excluded,
                excluded_tables,
                ..
            } => complement_mass(
                &on_y,
                &rest,
                y,
                excluded,
                excluded_tables,
                solution,
                cs,
                env,
            )?,
        };
        out.push(Mono {
            coef: m.coef * sum,
            syms: rest,
        });
    }
    out.to_expr().fold_constants(env)
}

fn product_at(syms: &[Sym], y: &str, value: &str, env: &Env) -> Result<f64> {
    let a = Assignment::new().with(y, value);
    let mut p = 1.0;
    for s in syms {
        p *= s.eval(&a, env)?;
    }
    Ok(p)
}

/// Closed-form mass of a monomial over a complement set.
///
/// Every concrete string the computation knows of (excluded values and the
/// entries of the tables involved) is summed explicitly; the remaining values
/// are unseen names of a reference table, each weighing the product of the
/// `pnew`s of the monomial's table densities.
#[allow(clippy::too_many_arguments)]
fn complement_mass(
    on_y: &[Sym],
    rest: &[Sym],
    y: &str,
    excluded: &BTreeSet<String>,
    excluded_tables: &BTreeSet<String>,
    solution: &SolutionSet,
    cs: &ConstraintSet,
    env: &Env,
) -> Result<f64> {
    let unbounded = || Error::UnboundedMass {
        path: cs.to_string(),
    };
    if on_y.iter().any(|s| matches!(s, Sym::PrSing(_))) {
        return Err(unbounded());
    }
    let densities: Vec<&str> = on_y
        .iter()
        .filter_map(|s| match s {
            Sym::TablePdf(_, t) => Some(t.as_str()),
            _ => None,
        })
        .collect();
    let reference = densities
        .first()
        .copied()
        .or_else(|| {
            rest.iter().find_map(|s| match s {
                Sym::PNew(t) if excluded_tables.contains(t) => Some(t.as_str()),
                _ => None,
            })
        })
        .or_else(|| excluded_tables.iter().next().map(String::as_str))
        .ok_or_else(unbounded)?;
    let reference_table = env.tables.get(reference)?;

    let mut known: BTreeSet<String> = excluded.clone();
    known.extend(reference_table.entries().keys().cloned());
    for t in densities
        .iter()
        .copied()
        .chain(excluded_tables.iter().map(String::as_str))
    {
        known.extend(env.tables.get(t)?.entries().keys().cloned());
    }

    let mut terms = Vec::new();
    for v in &known {
        if solution.contains(v, &env.tables)? {
            terms.push(product_at(on_y, y, v, env)?);
        }
    }
    let outside = known
        .iter()
        .filter(|v| !reference_table.contains(v))
        .count() as u64;
    let n = match reference_table.n_unseen() {
        Count::Finite(n) => n,
        Count::Unbounded => return Err(unbounded()),
    };
    if outside > n {
        return Err(Error::ExcludedExceedsUnseen {
            table: reference.to_string(),
            excluded: outside,
            available: n,
        });
    }
    let mut per_unseen = 1.0;
    for t in &densities {
        per_unseen *= env.tables.get(t)?.pnew();
    }
    terms.push(per_unseen * (n - outside) as f64);
    Ok(neumaier_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, VariableDecl};
    use crate::table::{NameTable, TableRegistry};
    use crate::tree::evaluate;

    fn env() -> Env {
        let t = NameTable::new(
            "t",
            vec![("A".to_string(), 0.5), ("AB".to_string(), 0.2)],
            0.3 / 4.0,
            Count::Finite(4),
        )
        .unwrap();
        let ab = Alphabet::new("AB").unwrap();
        let vars = vec![
            VariableDecl::small("X", &["1", "2", "3"]).unwrap(),
            VariableDecl::large("Y", ab.clone()).unwrap(),
            VariableDecl::large("Z", ab.clone()).unwrap(),
        ];
        Env::new(ab, std::iter::once(t).collect::<TableRegistry>(), vars).unwrap()
    }

    fn y() -> Term {
        Term::var("Y")
    }

    #[test]
    fn untested_small_variable_multiplies_by_domain_size() {
        let e = env();
        let f = Factor::new(["X"], TreeNode::constant(0.25), &e).unwrap();
        assert_eq!(
            sum_out_small(&f, "X", &e).unwrap().root(),
            &TreeNode::constant(0.75)
        );
    }

    #[test]
    fn indicator_sums_to_one() {
        let e = env();
        let t = TreeNode::split(
            "X",
            vec![(&["1"][..], TreeNode::constant(1.0))],
            Some(TreeNode::constant(0.0)),
        );
        let f = Factor::new(["X"], t, &e).unwrap();
        assert_eq!(
            sum_out_small(&f, "X", &e).unwrap().root(),
            &TreeNode::constant(1.0)
        );
    }

    #[test]
    fn bare_prior_sums_to_one() {
        let e = env();
        let f = Factor::new(["Y"], TreeNode::leaf(LabelExpr::table_pdf("Y", "t")), &e).unwrap();
        let s = sum_out_large(&f, "Y", &e).unwrap();
        let c = s.root().as_leaf().and_then(LabelExpr::as_const).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaf_mass_rules() {
        let e = env();
        let free = ConstraintSet::new("Y");
        assert_eq!(
            leaf_mass(&LabelExpr::Const(0.0), &free, &e).unwrap(),
            LabelExpr::Const(0.0)
        );
        assert!(matches!(
            leaf_mass(&LabelExpr::Const(0.5), &free, &e),
            Err(Error::UnboundedMass { .. })
        ));
        let two = ConstraintSet::new("Y").with(Atom::in_set(y(), ["A", "B"]), true);
        assert_eq!(
            leaf_mass(&LabelExpr::Const(0.25), &two, &e).unwrap(),
            LabelExpr::Const(0.5)
        );

        // sum of the density over everything but one listed name
        let not_a = ConstraintSet::new("Y").with(Atom::equal(y(), Term::lit("A")), false);
        let m = leaf_mass(&LabelExpr::table_pdf("Y", "t"), &not_a, &e).unwrap();
        assert!((m.as_const().unwrap() - 0.5).abs() < 1e-12);

        // unlisted excluded value consumes one unseen slot
        let not_b = ConstraintSet::new("Y").with(Atom::equal(y(), Term::lit("B")), false);
        let m = leaf_mass(&LabelExpr::table_pdf("Y", "t"), &not_b, &e).unwrap();
        assert!((m.as_const().unwrap() - (1.0 - 0.075)).abs() < 1e-12);

        // pnew over the unseen part of the table
        let unseen = ConstraintSet::new("Y").with(Atom::in_table(y(), "t"), false);
        let m = leaf_mass(&LabelExpr::pnew("t"), &unseen, &e).unwrap();
        assert!((m.as_const().unwrap() - 0.3).abs() < 1e-12);

        let ps = LabelExpr::prsing(y());
        assert!(matches!(
            leaf_mass(&ps, &unseen, &e),
            Err(Error::UnboundedMass { .. })
        ));
    }

    #[test]
    fn equality_with_another_variable_substitutes() {
        let e = env();
        let eq = Atom::equal(y(), Term::var("Z"));
        // P(Z | Y) = [Y = Z] times prior of Y: summing Y leaves the prior on Z
        let t = TreeNode::pred(
            eq,
            TreeNode::leaf(LabelExpr::table_pdf("Y", "t")),
            TreeNode::constant(0.0),
        );
        let f = Factor::new(["Y", "Z"], t, &e).unwrap();
        let s = sum_out_large(&f, "Y", &e).unwrap();
        assert_eq!(s.root(), &TreeNode::leaf(LabelExpr::table_pdf("Z", "t")));
        let v = evaluate(&s, &Assignment::new().with("Z", "AB"), &e).unwrap();
        assert!((v - 0.2).abs() < 1e-15);
    }

    #[test]
    fn other_relations_are_rejected() {
        let e = env();
        let se = Atom::single_edit(y(), Term::var("Z"));
        let t = TreeNode::pred(se, TreeNode::constant(0.5), TreeNode::constant(0.0));
        let f = Factor::new(["Y", "Z"], t, &e).unwrap();
        assert!(matches!(
            sum_out_large(&f, "Y", &e),
            Err(Error::UnsupportedRelation { .. })
        ));
    }

    #[test]
    fn substitution_noise_sums_to_one() {
        let e = env();
        let se = Atom::single_edit(y(), Term::var("Z"));
        let t = TreeNode::pred(
            se,
            TreeNode::leaf(LabelExpr::prsing(y())),
            TreeNode::constant(0.0),
        );
        let f = Factor::new(["Y", "Z"], t, &e).unwrap();
        assert_eq!(
            sum_out_large(&f, "Y", &e).unwrap().root(),
            &TreeNode::constant(1.0)
        );
    }

    #[test]
    fn trace_records_leaves() {
        let e = env();
        let it = Atom::in_table(y(), "t");
        let t = TreeNode::pred(
            it,
            TreeNode::leaf(LabelExpr::table_pdf("Y", "t")),
            TreeNode::leaf(LabelExpr::pnew("t")),
        );
        let f = Factor::new(["Y"], t, &e).unwrap();
        let (s, trace) = sum_out_large_traced(&f, "Y", &e).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].count, Some(Count::Finite(2)));
        assert_eq!(trace[1].count, Some(Count::Finite(4)));
        let c = s.root().as_leaf().and_then(LabelExpr::as_const).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }
}
