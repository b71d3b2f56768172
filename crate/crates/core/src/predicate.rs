//! Intensional predicates over large variables and the solver that turns a
//! conjunction of grounded literals into an explicit set or the complement of
//! a finite set, with exact counts.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{normalize, Alphabet, Assignment};
use crate::error::{Error, Result};
use crate::table::{Count, TableRegistry};

/// Either a variable reference or a literal string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Var(String),
    Lit(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    /// A literal value, case-normalized.
    pub fn lit(value: &str) -> Self {
        Term::Lit(normalize(value))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Lit(_) => None,
        }
    }

    pub fn as_lit(&self) -> Option<&str> {
        match self {
            Term::Lit(v) => Some(v),
            Term::Var(_) => None,
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.as_var() == Some(var)
    }

    fn ground(&self, var: &str, value: &str) -> Term {
        if self.mentions(var) {
            Term::lit(value)
        } else {
            self.clone()
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        if self.mentions(from) {
            Term::Var(to.to_string())
        } else {
            self.clone()
        }
    }

    /// Resolves the term to a string under an assignment.
    pub fn resolve<'a>(&'a self, a: &'a Assignment) -> Result<String> {
        match self {
            Term::Lit(v) => Ok(v.clone()),
            Term::Var(v) => a
                .get(v)
                .map(normalize)
                .ok_or_else(|| Error::Unassigned(v.clone())),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Lit(v) => write!(f, "\"{v}\""),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Equal,
    SingleEdit,
    InTable,
    InSet,
}

/// A predicate over one or two large-variable terms.
///
/// `Equal` and `SingleEdit` are symmetric; the constructors put their terms
/// in a canonical order so that the same test is always the same value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Equal(Term, Term),
    SingleEdit(Term, Term),
    InTable(Term, String),
    InSet(Term, BTreeSet<String>),
}

fn ordered(a: Term, b: Term) -> (Term, Term) {
    match (&a, &b) {
        (Term::Lit(_), Term::Var(_)) => (b, a),
        _ if a.as_var().is_some() == b.as_var().is_some() && b < a => (b, a),
        _ => (a, b),
    }
}

impl Atom {
    pub fn equal(a: Term, b: Term) -> Self {
        let (a, b) = ordered(a, b);
        Atom::Equal(a, b)
    }

    pub fn single_edit(a: Term, b: Term) -> Self {
        let (a, b) = ordered(a, b);
        Atom::SingleEdit(a, b)
    }

    pub fn in_table(subject: Term, table: impl Into<String>) -> Self {
        Atom::InTable(subject, table.into())
    }

    pub fn in_set<S: AsRef<str>>(subject: Term, values: impl IntoIterator<Item = S>) -> Self {
        Atom::InSet(
            subject,
            values.into_iter().map(|v| normalize(v.as_ref())).collect(),
        )
    }

    pub fn kind(&self) -> AtomKind {
        match self {
            Atom::Equal(..) => AtomKind::Equal,
            Atom::SingleEdit(..) => AtomKind::SingleEdit,
            Atom::InTable(..) => AtomKind::InTable,
            Atom::InSet(..) => AtomKind::InSet,
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Equal(a, b) | Atom::SingleEdit(a, b) => vec![a, b],
            Atom::InTable(s, _) | Atom::InSet(s, _) => vec![s],
        }
    }

    /// Variables the atom mentions, deduplicated.
    pub fn vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.terms().into_iter().filter_map(Term::as_var).collect();
        out.dedup();
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.terms().iter().any(|t| t.mentions(var))
    }

    fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Equal(a, b) => Atom::equal(f(a), f(b)),
            Atom::SingleEdit(a, b) => Atom::single_edit(f(a), f(b)),
            Atom::InTable(s, t) => Atom::InTable(f(s), t.clone()),
            Atom::InSet(s, v) => Atom::InSet(f(s), v.clone()),
        }
    }

    /// Replaces every occurrence of `var` with the literal `value`.
    pub fn ground(&self, var: &str, value: &str) -> Atom {
        self.map_terms(|t| t.ground(var, value))
    }

    /// Replaces every occurrence of variable `from` with variable `to`.
    pub fn rename(&self, from: &str, to: &str) -> Atom {
        self.map_terms(|t| t.rename(from, to))
    }

    /// Truth value when it no longer depends on any assignment.
    pub fn decide(&self, tables: &TableRegistry) -> Result<Option<bool>> {
        match self {
            Atom::Equal(Term::Var(a), Term::Var(b)) if a == b => Ok(Some(true)),
            Atom::SingleEdit(Term::Var(a), Term::Var(b)) if a == b => Ok(Some(false)),
            _ if self.vars().is_empty() => self.eval(&Assignment::new(), tables).map(Some),
            _ => Ok(None),
        }
    }

    /// Evaluates the atom under an assignment of all the variables it mentions.
    pub fn eval(&self, a: &Assignment, tables: &TableRegistry) -> Result<bool> {
        Ok(match self {
            Atom::Equal(x, y) => x.resolve(a)? == y.resolve(a)?,
            Atom::SingleEdit(x, y) => is_single_edit(&x.resolve(a)?, &y.resolve(a)?),
            Atom::InTable(s, t) => tables.get(t)?.contains(&s.resolve(a)?),
            Atom::InSet(s, set) => set.contains(&s.resolve(a)?),
        })
    }

    /// Evaluates an atom whose only variable is `var` at `value`.
    pub fn eval_at(&self, var: &str, value: &str, tables: &TableRegistry) -> Result<bool> {
        self.eval(&Assignment::new().with(var, value), tables)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Equal(a, b) => write!(f, "equal({a}, {b})"),
            Atom::SingleEdit(a, b) => write!(f, "singlet({a}, {b})"),
            Atom::InTable(s, t) => write!(f, "intable({s}, {t})"),
            Atom::InSet(s, v) => {
                write!(f, "inset({s}, {{")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "\"{x}\"")?;
                }
                f.write_str("})")
            }
        }
    }
}

/// An atom together with the truth value a tree path assigns it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn new(atom: Atom, positive: bool) -> Self {
        Literal { atom, positive }
    }

    pub fn pos(atom: Atom) -> Self {
        Self::new(atom, true)
    }

    pub fn neg(atom: Atom) -> Self {
        Self::new(atom, false)
    }

    pub fn holds_at(&self, var: &str, value: &str, tables: &TableRegistry) -> Result<bool> {
        Ok(self.atom.eval_at(var, value, tables)? == self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.positive { "yes" } else { "no" };
        write!(f, "{} = {v}", self.atom)
    }
}

/// Conjunction of literals that all constrain one variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub subject: String,
    pub literals: Vec<Literal>,
}

impl ConstraintSet {
    pub fn new(subject: impl Into<String>) -> Self {
        ConstraintSet {
            subject: subject.into(),
            literals: Vec::new(),
        }
    }

    pub fn with(mut self, atom: Atom, positive: bool) -> Self {
        self.push(Literal::new(atom, positive));
        self
    }

    pub fn push(&mut self, literal: Literal) {
        if !self.literals.contains(&literal) {
            self.literals.push(literal);
        }
    }

    /// Does `value` satisfy every literal?
    pub fn admits(&self, value: &str, tables: &TableRegistry) -> Result<bool> {
        for lit in &self.literals {
            if !lit.holds_at(&self.subject, value, tables)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_grounded(&self) -> Result<()> {
        for lit in &self.literals {
            if lit.atom.vars().iter().any(|v| *v != self.subject)
                || !lit.atom.mentions(&self.subject)
            {
                return Err(Error::InvalidTree(format!(
                    "literal `{lit}` is not grounded on `{}`",
                    self.subject
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("true");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Reference measure of a complement set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Table(String),
    WholeDomain,
}

/// Values satisfying a constraint set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionSet {
    Explicit(BTreeSet<String>),
    /// Every value except `excluded` and the entries of `excluded_tables`.
    ComplementOfFinite {
        excluded: BTreeSet<String>,
        excluded_tables: BTreeSet<String>,
        base: Base,
    },
}

impl SolutionSet {
    pub fn contains(&self, value: &str, tables: &TableRegistry) -> Result<bool> {
        let value = normalize(value);
        match self {
            SolutionSet::Explicit(vals) => Ok(vals.contains(&value)),
            SolutionSet::ComplementOfFinite {
                excluded,
                excluded_tables,
                ..
            } => {
                if excluded.contains(&value) {
                    return Ok(false);
                }
                for t in excluded_tables {
                    if tables.get(t)?.contains(&value) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Excluded values that are entries of the base table.
    pub fn excluded_in_table(&self, tables: &TableRegistry) -> Result<BTreeSet<String>> {
        match self {
            SolutionSet::ComplementOfFinite {
                excluded,
                excluded_tables,
                base: Base::Table(t),
            } => {
                let table = tables.get(t)?;
                if excluded_tables.contains(t) {
                    return Ok(table.entries().keys().cloned().collect());
                }
                Ok(excluded
                    .iter()
                    .filter(|v| table.contains(v))
                    .cloned()
                    .collect())
            }
            _ => Ok(BTreeSet::new()),
        }
    }

    /// Excluded values that are unseen with respect to the base table.
    pub fn excluded_unseen(&self, tables: &TableRegistry) -> Result<BTreeSet<String>> {
        match self {
            SolutionSet::ComplementOfFinite {
                excluded,
                excluded_tables,
                base: Base::Table(t),
            } => excluded_outside(t, excluded, excluded_tables, &BTreeSet::new(), tables),
            _ => Ok(BTreeSet::new()),
        }
    }
}

/// `(excluded ∪ extra ∪ entries of the excluded tables) \ entries of table`:
/// the concrete values a complement removes from `table`'s unseen pool.
pub(crate) fn excluded_outside(
    table: &str,
    excluded: &BTreeSet<String>,
    excluded_tables: &BTreeSet<String>,
    extra: &BTreeSet<String>,
    tables: &TableRegistry,
) -> Result<BTreeSet<String>> {
    let base = tables.get(table)?;
    let mut out: BTreeSet<String> = excluded
        .iter()
        .chain(extra.iter())
        .filter(|v| !base.contains(v))
        .cloned()
        .collect();
    for other in excluded_tables.iter().filter(|o| *o != table) {
        out.extend(
            tables
                .get(other)?
                .entries()
                .keys()
                .filter(|v| !base.contains(v))
                .cloned(),
        );
    }
    Ok(out)
}

/// True iff both strings have the same nonzero length and differ in exactly
/// one position.
pub fn is_single_edit(a: &str, b: &str) -> bool {
    let (a, b) = (normalize(a), normalize(b));
    let mut ca = a.chars();
    let mut cb = b.chars();
    let mut diffs = 0;
    loop {
        match (ca.next(), cb.next()) {
            (Some(x), Some(y)) => {
                if x != y {
                    diffs += 1;
                    if diffs > 1 {
                        return false;
                    }
                }
            }
            (None, None) => return diffs == 1,
            _ => return false,
        }
    }
}

/// All strings at substitution distance exactly one from `word`.
pub fn single_edit_neighbors(word: &str, alphabet: &Alphabet) -> Result<BTreeSet<String>> {
    let word: Vec<char> = normalize(word).chars().collect();
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if let Some(c) = word.iter().find(|c| !alphabet.contains(**c)) {
        return Err(Error::OutsideAlphabet(*c));
    }
    let mut out = BTreeSet::new();
    let mut buf = word.clone();
    for i in 0..word.len() {
        for &c in alphabet.chars() {
            if c != word[i] {
                buf[i] = c;
                out.insert(buf.iter().collect());
            }
        }
        buf[i] = word[i];
    }
    Ok(out)
}

/// Size of the finite set a positive literal generates, without building it.
fn generator_size(atom: &Atom, alphabet: &Alphabet, tables: &TableRegistry) -> Result<usize> {
    Ok(match atom {
        Atom::Equal(..) => 1,
        Atom::InSet(_, set) => set.len(),
        Atom::SingleEdit(a, b) => {
            let w = a.as_lit().or(b.as_lit()).unwrap_or_default();
            (alphabet.len() - 1) * w.chars().count()
        }
        Atom::InTable(_, t) => tables.get(t)?.len(),
    })
}

/// The finite set of values a literal over `subject` singles out.
fn generate(atom: &Atom, alphabet: &Alphabet, tables: &TableRegistry) -> Result<BTreeSet<String>> {
    Ok(match atom {
        Atom::Equal(a, b) => a
            .as_lit()
            .or(b.as_lit())
            .into_iter()
            .map(str::to_string)
            .collect(),
        Atom::InSet(_, set) => set.clone(),
        Atom::SingleEdit(a, b) => {
            let w = a.as_lit().or(b.as_lit()).unwrap_or_default();
            single_edit_neighbors(w, alphabet)?
        }
        Atom::InTable(_, t) => tables.get(t)?.entries().keys().cloned().collect(),
    })
}

/// Solves a conjunction of grounded literals over one large variable.
///
/// With at least one positive literal the smallest generator is enumerated
/// and filtered; otherwise the result is the complement of the union of the
/// negated generators. Unsatisfiable sets come back as `Explicit(∅)`.
pub fn solve(
    constraints: &ConstraintSet,
    tables: &TableRegistry,
    alphabet: &Alphabet,
) -> Result<SolutionSet> {
    constraints.check_grounded()?;
    let mut best: Option<(usize, &Atom)> = None;
    for lit in constraints.literals.iter().filter(|l| l.positive) {
        let size = generator_size(&lit.atom, alphabet, tables)?;
        if best.map_or(true, |(s, _)| size < s) {
            best = Some((size, &lit.atom));
        }
    }

    if let Some((_, atom)) = best {
        let mut out = BTreeSet::new();
        for v in generate(atom, alphabet, tables)? {
            if alphabet.check_word(&v).is_ok() && !v.is_empty() && constraints.admits(&v, tables)? {
                out.insert(v);
            }
        }
        return Ok(SolutionSet::Explicit(out));
    }

    let mut excluded = BTreeSet::new();
    let mut excluded_tables = BTreeSet::new();
    for lit in &constraints.literals {
        match &lit.atom {
            Atom::InTable(_, t) => {
                tables.get(t)?;
                excluded_tables.insert(t.clone());
            }
            atom => excluded.extend(generate(atom, alphabet, tables)?),
        }
    }
    let base = match excluded_tables.iter().next() {
        Some(t) => Base::Table(t.clone()),
        None => Base::WholeDomain,
    };
    Ok(SolutionSet::ComplementOfFinite {
        excluded,
        excluded_tables,
        base,
    })
}

/// Number of values in a solution set.
pub fn solution_count(s: &SolutionSet, tables: &TableRegistry) -> Result<Count> {
    match s {
        SolutionSet::Explicit(v) => Ok(Count::Finite(v.len() as u64)),
        SolutionSet::ComplementOfFinite {
            base: Base::WholeDomain,
            ..
        } => Ok(Count::Unbounded),
        SolutionSet::ComplementOfFinite {
            excluded_tables,
            base: Base::Table(t),
            ..
        } => {
            let table = tables.get(t)?;
            let in_table = if excluded_tables.contains(t) {
                0
            } else {
                (table.len() - s.excluded_in_table(tables)?.len()) as u64
            };
            let excluded_unseen = s.excluded_unseen(tables)?.len() as u64;
            match table.n_unseen() {
                Count::Unbounded => Ok(Count::Unbounded),
                Count::Finite(n) if excluded_unseen > n => Err(Error::ExcludedExceedsUnseen {
                    table: t.clone(),
                    excluded: excluded_unseen,
                    available: n,
                }),
                Count::Finite(n) => Ok(Count::Finite(in_table + n - excluded_unseen)),
            }
        }
    }
}
