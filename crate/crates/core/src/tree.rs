//! Decision-tree factors.
//!
//! Internal nodes either split a small variable into value subsets (with an
//! optional `else` branch for the values no subset lists) or test an
//! intensional predicate. Leaves carry [`LabelExpr`]s. All operations build
//! new trees; inputs are never mutated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::domain::Assignment;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::label::LabelExpr;
use crate::predicate::{Atom, ConstraintSet, Literal};

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub values: BTreeSet<String>,
    pub node: TreeNode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf(LabelExpr),
    SmallSplit {
        var: String,
        branches: Vec<Branch>,
        else_branch: Option<Box<TreeNode>>,
    },
    PredSplit {
        atom: Atom,
        yes: Box<TreeNode>,
        no: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf(label: LabelExpr) -> Self {
        TreeNode::Leaf(label.normalized())
    }

    pub fn constant(c: f64) -> Self {
        TreeNode::Leaf(LabelExpr::Const(c))
    }

    /// A split with one branch per value subset and an optional `else`.
    pub fn split<S: AsRef<str>>(
        var: impl Into<String>,
        branches: Vec<(&[S], TreeNode)>,
        else_branch: Option<TreeNode>,
    ) -> Self {
        TreeNode::SmallSplit {
            var: var.into(),
            branches: branches
                .into_iter()
                .map(|(vals, node)| Branch {
                    values: vals.iter().map(|v| v.as_ref().to_string()).collect(),
                    node,
                })
                .collect(),
            else_branch: else_branch.map(Box::new),
        }
    }

    pub fn pred(atom: Atom, yes: TreeNode, no: TreeNode) -> Self {
        TreeNode::PredSplit {
            atom,
            yes: Box::new(yes),
            no: Box::new(no),
        }
    }

    pub fn as_leaf(&self) -> Option<&LabelExpr> {
        match self {
            TreeNode::Leaf(l) => Some(l),
            _ => None,
        }
    }

    /// Child nodes in order.
    pub fn children(&self) -> Vec<&TreeNode> {
        match self {
            TreeNode::Leaf(_) => vec![],
            TreeNode::SmallSplit {
                branches,
                else_branch,
                ..
            } => branches
                .iter()
                .map(|b| &b.node)
                .chain(else_branch.as_deref())
                .collect(),
            TreeNode::PredSplit { yes, no, .. } => vec![yes, no],
        }
    }

    pub fn leaves(&self) -> Vec<&LabelExpr> {
        let mut out = Vec::new();
        fn walk<'a>(n: &'a TreeNode, out: &mut Vec<&'a LabelExpr>) {
            match n {
                TreeNode::Leaf(l) => out.push(l),
                _ => n.children().into_iter().for_each(|c| walk(c, out)),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    /// Every variable tested by a node or mentioned by a label.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(n: &TreeNode, out: &mut BTreeSet<String>) {
            match n {
                TreeNode::Leaf(l) => out.extend(l.vars()),
                TreeNode::SmallSplit { var, .. } => {
                    out.insert(var.clone());
                }
                TreeNode::PredSplit { atom, .. } => {
                    out.extend(atom.vars().into_iter().map(str::to_string))
                }
            }
            n.children().into_iter().for_each(|c| walk(c, out));
        }
        walk(self, &mut out);
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.vars().contains(var)
    }

    /// Indented text rendering used by golden tests and the CLI.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        pretty_into(self, 0, &mut out);
        out
    }
}

fn pretty_into(node: &TreeNode, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match node {
        TreeNode::Leaf(l) => {
            let _ = writeln!(out, "{pad}{l}");
        }
        TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        } => {
            let _ = writeln!(out, "{pad}{var}");
            for b in branches {
                let vals: Vec<&str> = b.values.iter().map(String::as_str).collect();
                pretty_child(&format!("= {}", vals.join(", ")), &b.node, indent + 2, out);
            }
            if let Some(e) = else_branch {
                pretty_child("else", e, indent + 2, out);
            }
        }
        TreeNode::PredSplit { atom, yes, no } => {
            let _ = writeln!(out, "{pad}{atom}?");
            pretty_child("yes", yes, indent + 2, out);
            pretty_child("no", no, indent + 2, out);
        }
    }
}

fn pretty_child(head: &str, child: &TreeNode, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match child {
        TreeNode::Leaf(l) => {
            let _ = writeln!(out, "{pad}{head} -> {l}");
        }
        _ => {
            let _ = writeln!(out, "{pad}{head}");
            pretty_into(child, indent + 2, out);
        }
    }
}

/// Conjunction of split outcomes along a path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Context {
    small: BTreeMap<String, BTreeSet<String>>,
    literals: Vec<Literal>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intersects the allowed values of a small variable.
    pub fn restrict(&mut self, var: &str, values: &BTreeSet<String>) {
        match self.small.get_mut(var) {
            Some(cur) => cur.retain(|v| values.contains(v)),
            None => {
                self.small.insert(var.to_string(), values.clone());
            }
        }
    }

    pub fn assume(&mut self, literal: Literal) {
        if !self.literals.contains(&literal) {
            self.literals.push(literal);
        }
    }

    pub fn with_restriction(mut self, var: &str, values: &BTreeSet<String>) -> Self {
        self.restrict(var, values);
        self
    }

    pub fn with_literal(mut self, literal: Literal) -> Self {
        self.assume(literal);
        self
    }

    /// Allowed values of a small variable (its whole domain when unconstrained).
    pub fn allowed(&self, var: &str, env: &Env) -> Result<BTreeSet<String>> {
        match self.small.get(var) {
            Some(s) => Ok(s.clone()),
            None => Ok(env.small_values(var)?.iter().cloned().collect()),
        }
    }

    pub fn small_restrictions(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.small
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// Truth value of an atom fixed by an earlier test of the same atom.
    pub fn decides(&self, atom: &Atom) -> Option<bool> {
        self.literals
            .iter()
            .find(|l| l.atom == *atom)
            .map(|l| l.positive)
    }

    pub fn is_contradictory(&self) -> bool {
        self.small.values().any(BTreeSet::is_empty)
            || self.literals.iter().any(|l| {
                self.literals
                    .iter()
                    .any(|m| m.atom == l.atom && m.positive != l.positive)
            })
    }

    /// Literals that mention `var`.
    pub fn project(&self, var: &str) -> ConstraintSet {
        let mut cs = ConstraintSet::new(var);
        for l in self.literals.iter().filter(|l| l.atom.mentions(var)) {
            cs.push(l.clone());
        }
        cs
    }

    /// Does the assignment satisfy every restriction and literal it covers?
    pub fn admits(&self, a: &Assignment, env: &Env) -> Result<bool> {
        for (var, allowed) in &self.small {
            if let Some(v) = a.get(var) {
                if !allowed.contains(v) {
                    return Ok(false);
                }
            }
        }
        for l in &self.literals {
            if l.atom.vars().iter().all(|v| a.contains(v))
                && l.atom.eval(a, &env.tables)? != l.positive
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Human-readable path description.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .small
            .iter()
            .map(|(v, s)| {
                format!(
                    "{v} in {{{}}}",
                    s.iter().cloned().collect::<Vec<_>>().join(", ")
                )
            })
            .collect();
        parts.extend(self.literals.iter().map(|l| l.to_string()));
        if parts.is_empty() {
            "true".into()
        } else {
            parts.join(" & ")
        }
    }
}

/// A nonnegative function over `scope`, represented as a decision tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: BTreeSet<String>,
    root: TreeNode,
}

impl Factor {
    /// Builds a factor, checking that the tree only mentions declared scope
    /// variables and is well-typed against their domains.
    pub fn new<S: AsRef<str>>(
        scope: impl IntoIterator<Item = S>,
        root: TreeNode,
        env: &Env,
    ) -> Result<Self> {
        let scope: BTreeSet<String> = scope.into_iter().map(|s| s.as_ref().to_string()).collect();
        for v in &scope {
            env.domain(v)?;
        }
        validate_node(&root, &scope, env)?;
        Ok(Factor { scope, root })
    }

    pub(crate) fn from_parts(scope: BTreeSet<String>, root: TreeNode) -> Self {
        Factor { scope, root }
    }

    pub fn constant(c: f64) -> Self {
        Factor {
            scope: BTreeSet::new(),
            root: TreeNode::constant(c),
        }
    }

    pub fn scope(&self) -> &BTreeSet<String> {
        &self.scope
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn into_root(self) -> TreeNode {
        self.root
    }

    /// Splits of small variables that leave values of the domain without a
    /// branch.
    pub fn check_complete(&self, env: &Env) -> Result<()> {
        fn walk(n: &TreeNode, ctx: &Context, env: &Env) -> Result<()> {
            match n {
                TreeNode::Leaf(_) => Ok(()),
                TreeNode::SmallSplit {
                    var,
                    branches,
                    else_branch,
                } => {
                    let allowed = ctx.allowed(var, env)?;
                    let covered: BTreeSet<String> = branches
                        .iter()
                        .flat_map(|b| b.values.iter().cloned())
                        .collect();
                    if else_branch.is_none() {
                        if let Some(v) = allowed.iter().find(|v| !covered.contains(*v)) {
                            return Err(Error::DanglingBranch {
                                var: var.clone(),
                                value: v.clone(),
                            });
                        }
                    }
                    for b in branches {
                        walk(&b.node, &ctx.clone().with_restriction(var, &b.values), env)?;
                    }
                    if let Some(e) = else_branch {
                        let rest: BTreeSet<String> =
                            allowed.difference(&covered).cloned().collect();
                        walk(e, &ctx.clone().with_restriction(var, &rest), env)?;
                    }
                    Ok(())
                }
                TreeNode::PredSplit { yes, no, .. } => {
                    walk(yes, ctx, env)?;
                    walk(no, ctx, env)
                }
            }
        }
        walk(&self.root, &Context::new(), env)
    }
}

fn validate_node(node: &TreeNode, scope: &BTreeSet<String>, env: &Env) -> Result<()> {
    let in_scope = |v: &str| -> Result<()> {
        if scope.contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidTree(format!(
                "variable `{v}` is not in the factor scope"
            )))
        }
    };
    match node {
        TreeNode::Leaf(label) => {
            for v in label.vars() {
                in_scope(&v)?;
                if !env.is_large(&v)? {
                    return Err(Error::InvalidTree(format!(
                        "label `{label}` refers to small variable `{v}`"
                    )));
                }
            }
            for t in label.tables() {
                env.tables.get(&t)?;
            }
            if let Some(c) = label.as_const() {
                if !(c >= 0.0) || !c.is_finite() {
                    return Err(Error::InvalidTree(format!(
                        "leaf constant {c} is not a nonnegative number"
                    )));
                }
            }
        }
        TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        } => {
            in_scope(var)?;
            let domain = env.small_values(var)?;
            let mut seen: BTreeSet<&String> = BTreeSet::new();
            for b in branches {
                if b.values.is_empty() {
                    return Err(Error::InvalidTree(format!("empty branch on `{var}`")));
                }
                for v in &b.values {
                    if !domain.contains(v) {
                        return Err(Error::ValueOutsideDomain {
                            var: var.clone(),
                            value: v.clone(),
                        });
                    }
                    if !seen.insert(v) {
                        return Err(Error::InvalidTree(format!(
                            "value `{v}` appears in two branches on `{var}`"
                        )));
                    }
                }
                validate_node(&b.node, scope, env)?;
            }
            if let Some(e) = else_branch {
                validate_node(e, scope, env)?;
            }
        }
        TreeNode::PredSplit { atom, yes, no } => {
            let vars = atom.vars();
            if vars.is_empty() {
                return Err(Error::InvalidTree(format!(
                    "predicate `{atom}` mentions no variable"
                )));
            }
            for v in vars {
                in_scope(v)?;
                if !env.is_large(v)? {
                    return Err(Error::InvalidTree(format!(
                        "predicate `{atom}` tests small variable `{v}`"
                    )));
                }
            }
            for t in atom.terms() {
                if let Some(w) = t.as_lit() {
                    env.alphabet.check_word(w)?;
                }
            }
            match atom {
                Atom::InTable(_, t) => {
                    env.tables.get(t)?;
                }
                Atom::InSet(_, set) => {
                    if set.is_empty() {
                        return Err(Error::InvalidTree(format!("empty set in `{atom}`")));
                    }
                }
                _ => {}
            }
            validate_node(yes, scope, env)?;
            validate_node(no, scope, env)?;
        }
    }
    Ok(())
}

/// Value of the factor at a full assignment of its scope.
pub fn evaluate(f: &Factor, a: &Assignment, env: &Env) -> Result<f64> {
    for v in &f.scope {
        if !a.contains(v) {
            return Err(Error::Unassigned(v.clone()));
        }
    }
    evaluate_node(&f.root, a, env)
}

pub fn evaluate_node(node: &TreeNode, a: &Assignment, env: &Env) -> Result<f64> {
    let mut node = node;
    loop {
        match node {
            TreeNode::Leaf(l) => return l.eval(a, env),
            TreeNode::SmallSplit {
                var,
                branches,
                else_branch,
            } => {
                let value = a.get(var).ok_or_else(|| Error::Unassigned(var.clone()))?;
                node = match branches.iter().find(|b| b.values.contains(value)) {
                    Some(b) => &b.node,
                    None => else_branch
                        .as_deref()
                        .ok_or_else(|| Error::DanglingBranch {
                            var: var.clone(),
                            value: value.to_string(),
                        })?,
                };
            }
            TreeNode::PredSplit { atom, yes, no } => {
                node = if atom.eval(a, &env.tables)? { yes } else { no };
            }
        }
    }
}

/// Walks `node` under `ctx`, dropping branches the context makes infeasible,
/// folding decided predicates, collapsing single-child splits, and replacing
/// every surviving leaf by `on_leaf(label, path_context)`.
pub(crate) fn rebuild(
    node: &TreeNode,
    ctx: &Context,
    env: &Env,
    on_leaf: &mut dyn FnMut(&LabelExpr, &Context) -> Result<TreeNode>,
) -> Result<TreeNode> {
    match node {
        TreeNode::Leaf(l) => on_leaf(l, ctx),
        TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        } => {
            let allowed = ctx.allowed(var, env)?;
            let mut kept: Vec<Branch> = Vec::new();
            let mut covered: BTreeSet<String> = BTreeSet::new();
            for b in branches {
                covered.extend(b.values.iter().cloned());
                let eff: BTreeSet<String> = b.values.intersection(&allowed).cloned().collect();
                if eff.is_empty() {
                    continue;
                }
                let child = rebuild(
                    &b.node,
                    &ctx.clone().with_restriction(var, &eff),
                    env,
                    on_leaf,
                )?;
                kept.push(Branch {
                    values: eff,
                    node: child,
                });
            }
            let rest: BTreeSet<String> = allowed.difference(&covered).cloned().collect();
            let else_node = match else_branch {
                Some(e) if !rest.is_empty() => Some(rebuild(
                    e,
                    &ctx.clone().with_restriction(var, &rest),
                    env,
                    on_leaf,
                )?),
                _ => None,
            };
            let dangling = else_branch.is_none() && !rest.is_empty();
            let mut children: Vec<&TreeNode> = kept.iter().map(|b| &b.node).collect();
            children.extend(else_node.as_ref());
            if !dangling {
                if children.len() == 1 {
                    return Ok(children[0].clone());
                }
                if let Some(first) = children.first().and_then(|c| c.as_leaf()) {
                    if children.iter().all(|c| c.as_leaf() == Some(first)) {
                        return Ok(TreeNode::Leaf(first.clone()));
                    }
                }
            }
            Ok(TreeNode::SmallSplit {
                var: var.clone(),
                branches: kept,
                else_branch: else_node.map(Box::new),
            })
        }
        TreeNode::PredSplit { atom, yes, no } => {
            let decided = match atom.decide(&env.tables)? {
                Some(b) => Some(b),
                None => ctx.decides(atom),
            };
            match decided {
                Some(true) => rebuild(yes, ctx, env, on_leaf),
                Some(false) => rebuild(no, ctx, env, on_leaf),
                None => {
                    let y = rebuild(
                        yes,
                        &ctx.clone().with_literal(Literal::pos(atom.clone())),
                        env,
                        on_leaf,
                    )?;
                    let n = rebuild(
                        no,
                        &ctx.clone().with_literal(Literal::neg(atom.clone())),
                        env,
                        on_leaf,
                    )?;
                    if let (Some(a), Some(b)) = (y.as_leaf(), n.as_leaf()) {
                        if a == b {
                            return Ok(y);
                        }
                    }
                    Ok(TreeNode::PredSplit {
                        atom: atom.clone(),
                        yes: Box::new(y),
                        no: Box::new(n),
                    })
                }
            }
        }
    }
}

/// Removes branches incompatible with `ctx` and with their own ancestors.
pub fn prune_node(node: &TreeNode, ctx: &Context, env: &Env) -> Result<TreeNode> {
    if ctx.is_contradictory() {
        return Ok(node.clone());
    }
    rebuild(node, ctx, env, &mut |l, _| Ok(TreeNode::Leaf(l.clone())))
}

pub fn prune(f: &Factor, ctx: &Context, env: &Env) -> Result<Factor> {
    Ok(Factor {
        scope: f.scope.clone(),
        root: prune_node(&f.root, ctx, env)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Mul,
}

impl Op {
    pub fn apply(self, a: &LabelExpr, b: &LabelExpr) -> LabelExpr {
        match self {
            Op::Add => a.add(b),
            Op::Mul => a.mul(b),
        }
    }
}

/// Grafts a copy of `t2` onto every leaf of `t1`, combining leaf labels with
/// `op`. Under `Mul`, a zero leaf of `t1` is kept as is.
pub fn merge2(t1: &TreeNode, t2: &TreeNode, op: Op, env: &Env) -> Result<TreeNode> {
    merge2_in(t1, t2, op, &Context::new(), env)
}

pub(crate) fn merge2_in(
    t1: &TreeNode,
    t2: &TreeNode,
    op: Op,
    ctx: &Context,
    env: &Env,
) -> Result<TreeNode> {
    rebuild(t1, ctx, env, &mut |l1, path| {
        if op == Op::Mul && l1.is_zero() {
            return Ok(TreeNode::Leaf(l1.clone()));
        }
        rebuild(t2, path, env, &mut |l2, _| {
            Ok(TreeNode::Leaf(op.apply(l1, l2)))
        })
    })
}

/// Left fold of [`merge2`] in list order.
pub fn merge(trees: &[TreeNode], op: Op, env: &Env) -> Result<TreeNode> {
    let (first, rest) = trees.split_first().ok_or(Error::EmptyMerge)?;
    let mut acc = first.clone();
    for t in rest {
        acc = merge2(&acc, t, op, env)?;
    }
    Ok(acc)
}

/// Incorporates the observation `var = value`.
pub fn condition(f: &Factor, var: &str, value: &str, env: &Env) -> Result<Factor> {
    if !f.scope.contains(var) {
        return Err(Error::UnknownVariable(format!(
            "{var} (not in factor scope)"
        )));
    }
    let value = env.check_value(var, value)?;
    let grounded = condition_node(&f.root, var, &value, env)?;
    let mut scope = f.scope.clone();
    scope.remove(var);
    Ok(Factor {
        scope,
        root: prune_node(&grounded, &Context::new(), env)?,
    })
}

fn condition_node(node: &TreeNode, var: &str, value: &str, env: &Env) -> Result<TreeNode> {
    Ok(match node {
        TreeNode::Leaf(l) => TreeNode::Leaf(l.ground(var, value, env)?),
        TreeNode::SmallSplit {
            var: v,
            branches,
            else_branch,
        } if v == var => {
            let chosen = match branches.iter().find(|b| b.values.contains(value)) {
                Some(b) => &b.node,
                None => else_branch
                    .as_deref()
                    .ok_or_else(|| Error::DanglingBranch {
                        var: var.to_string(),
                        value: value.to_string(),
                    })?,
            };
            condition_node(chosen, var, value, env)?
        }
        TreeNode::SmallSplit {
            var: v,
            branches,
            else_branch,
        } => TreeNode::SmallSplit {
            var: v.clone(),
            branches: branches
                .iter()
                .map(|b| {
                    Ok(Branch {
                        values: b.values.clone(),
                        node: condition_node(&b.node, var, value, env)?,
                    })
                })
                .collect::<Result<_>>()?,
            else_branch: match else_branch {
                Some(e) => Some(Box::new(condition_node(e, var, value, env)?)),
                None => None,
            },
        },
        TreeNode::PredSplit { atom, yes, no } => {
            let atom = if atom.mentions(var) {
                atom.ground(var, value)
            } else {
                atom.clone()
            };
            match atom.decide(&env.tables)? {
                Some(true) => condition_node(yes, var, value, env)?,
                Some(false) => condition_node(no, var, value, env)?,
                None => TreeNode::PredSplit {
                    atom,
                    yes: Box::new(condition_node(yes, var, value, env)?),
                    no: Box::new(condition_node(no, var, value, env)?),
                },
            }
        }
    })
}

/// Product of factors: `merge(trees, Mul)` over the union of the scopes.
pub fn multiply(factors: &[Factor], env: &Env) -> Result<Factor> {
    if factors.is_empty() {
        return Err(Error::EmptyMerge);
    }
    let trees: Vec<TreeNode> = factors.iter().map(|f| f.root.clone()).collect();
    let scope = factors
        .iter()
        .flat_map(|f| f.scope.iter().cloned())
        .collect();
    let root = merge(&trees, Op::Mul, env)?;
    Ok(Factor {
        scope,
        root: prune_node(&root, &Context::new(), env)?,
    })
}
