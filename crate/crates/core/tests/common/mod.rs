//! Shared fixtures: a four-variable environment small enough to enumerate
//! exhaustively, and proptest strategies for trees over it.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lde::oracle::ClosedUniverse;
use lde::table::Count;
use lde::tree::{evaluate_node, TreeNode};
use lde::{Alphabet, Assignment, Atom, Env, LabelExpr, NameTable, Term, VariableDecl};
use proptest::prelude::*;

pub const SMALL_A: [&str; 3] = ["a", "b", "c"];
pub const SMALL_B: [&str; 2] = ["x", "y"];
pub const WORDS: [&str; 6] = ["A", "B", "AA", "AB", "BA", "BB"];

pub fn env() -> Env {
    let alphabet = Alphabet::new("AB").unwrap();
    let t = NameTable::new(
        "t",
        vec![("A".to_string(), 0.4), ("AB".to_string(), 0.3)],
        0.075,
        Count::Finite(4),
    )
    .unwrap();
    Env::new(
        alphabet.clone(),
        [t].into_iter().collect(),
        vec![
            VariableDecl::small("A", &SMALL_A).unwrap(),
            VariableDecl::small("B", &SMALL_B).unwrap(),
            VariableDecl::large("L", alphabet.clone()).unwrap(),
            VariableDecl::large("M", alphabet).unwrap(),
        ],
    )
    .unwrap()
}

pub fn universe() -> ClosedUniverse {
    ClosedUniverse::all_strings(&Alphabet::new("AB").unwrap(), 2)
}

pub const VARS: [&str; 4] = ["A", "B", "L", "M"];

pub fn values_of(var: &str) -> Vec<&'static str> {
    match var {
        "A" => SMALL_A.to_vec(),
        "B" => SMALL_B.to_vec(),
        _ => WORDS.to_vec(),
    }
}

/// Every joint assignment of the four variables (216 of them).
pub fn all_assignments() -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for var in VARS {
        out = out
            .into_iter()
            .flat_map(|a| {
                values_of(var)
                    .into_iter()
                    .map(move |v| a.clone().with(var, v))
            })
            .collect();
    }
    out
}

pub fn eval(t: &TreeNode, a: &Assignment, env: &Env) -> f64 {
    evaluate_node(t, a, env).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn leaf() -> impl Strategy<Value = TreeNode> {
    prop_oneof![
        prop::sample::select(vec![0.0, 0.1, 0.25, 0.5, 1.0]).prop_map(TreeNode::constant),
        (0.01f64..2.0).prop_map(TreeNode::constant),
        Just(TreeNode::leaf(LabelExpr::table_pdf("L", "t"))),
        Just(TreeNode::leaf(LabelExpr::table_pdf("M", "t"))),
        Just(TreeNode::leaf(LabelExpr::pnew("t"))),
        Just(TreeNode::leaf(LabelExpr::prsing(Term::var("M")))),
        (0.1f64..1.0).prop_map(|c| TreeNode::leaf(LabelExpr::table_pdf("L", "t").scale(c))),
    ]
}

fn large_var() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["L", "M"])
}

fn word() -> impl Strategy<Value = &'static str> {
    prop::sample::select(WORDS.to_vec())
}

pub fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        Just(Atom::equal(Term::var("L"), Term::var("M"))),
        Just(Atom::single_edit(Term::var("L"), Term::var("M"))),
        (large_var(), word()).prop_map(|(v, w)| Atom::equal(Term::var(v), Term::lit(w))),
        (large_var(), word()).prop_map(|(v, w)| Atom::single_edit(Term::var(v), Term::lit(w))),
        large_var().prop_map(|v| Atom::in_table(Term::var(v), "t")),
        (large_var(), prop::sample::subsequence(WORDS.to_vec(), 1..4))
            .prop_map(|(v, ws)| Atom::in_set(Term::var(v), ws)),
    ]
}

fn small_split(inner: BoxedStrategy<TreeNode>) -> impl Strategy<Value = TreeNode> {
    (
        prop::sample::select(vec!["A", "B"]),
        inner.clone(),
        inner.clone(),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(var, first, rest, idx)| {
            let values = values_of(var);
            let cut = 1 + idx.index(values.len() - 1);
            let chosen: BTreeSet<&str> = values[..cut].iter().copied().collect();
            let chosen: Vec<&str> = chosen.into_iter().collect();
            TreeNode::split(var, vec![(&chosen[..], first)], Some(rest))
        })
}

/// Random trees over `A`, `B`, `L`, `M` of depth at most four.
pub fn tree() -> impl Strategy<Value = TreeNode> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (atom(), inner.clone(), inner.clone()).prop_map(|(a, y, n)| TreeNode::pred(a, y, n)),
            small_split(inner.boxed()),
        ]
    })
}
