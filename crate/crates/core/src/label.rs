//! Leaf labels of tree factors.
//!
//! Labels are kept in a sum-of-products normal form: constants are folded,
//! products are flat, and like terms are merged. Intensional factors
//! (`prsing`, table densities, `pnew`) stay symbolic until a value for their
//! variable is known or the label is evaluated.

use std::fmt;

use crate::domain::Assignment;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::predicate::Term;

#[derive(Debug, Clone, PartialEq)]
pub enum LabelExpr {
    Const(f64),
    /// Probability of one specific single-edit error: `1 / ((|alphabet|-1) * |w|)`.
    PrSing(Term),
    /// Table density of a variable: its entry if listed, `pnew` otherwise.
    TablePdf {
        var: String,
        table: String,
    },
    /// The unseen-name probability of a table.
    PNewConst(String),
    Product(Vec<LabelExpr>),
    Sum(Vec<LabelExpr>),
}

/// A symbolic factor of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Sym {
    PrSing(Term),
    TablePdf(String, String),
    PNew(String),
}

impl Sym {
    pub(crate) fn var(&self) -> Option<&str> {
        match self {
            Sym::PrSing(t) => t.as_var(),
            Sym::TablePdf(v, _) => Some(v),
            Sym::PNew(_) => None,
        }
    }

    pub(crate) fn eval(&self, a: &Assignment, env: &Env) -> Result<f64> {
        match self {
            Sym::PrSing(t) => {
                let w = t.resolve(a)?;
                prsing(w.chars().count(), env)
            }
            Sym::TablePdf(v, t) => {
                let value = a.get(v).ok_or_else(|| Error::Unassigned(v.clone()))?;
                Ok(env.tables.get(t)?.prob(value))
            }
            Sym::PNew(t) => Ok(env.tables.get(t)?.pnew()),
        }
    }

    fn to_expr(&self) -> LabelExpr {
        match self {
            Sym::PrSing(t) => LabelExpr::PrSing(t.clone()),
            Sym::TablePdf(v, t) => LabelExpr::TablePdf {
                var: v.clone(),
                table: t.clone(),
            },
            Sym::PNew(t) => LabelExpr::PNewConst(t.clone()),
        }
    }
}

/// `1 / ((|alphabet| - 1) * len)`.
pub fn prsing(len: usize, env: &Env) -> Result<f64> {
    if len == 0 {
        return Err(Error::EmptyWord);
    }
    Ok(1.0 / ((env.alphabet.len() - 1) as f64 * len as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mono {
    pub coef: f64,
    pub syms: Vec<Sym>,
}

/// Sum of monomials; zero monomials dropped, like terms merged in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct Poly(pub Vec<Mono>);

impl Poly {
    pub(crate) fn constant(c: f64) -> Poly {
        let mut p = Poly::default();
        p.push(Mono {
            coef: c,
            syms: vec![],
        });
        p
    }

    pub(crate) fn push(&mut self, mut m: Mono) {
        if m.coef == 0.0 {
            return;
        }
        m.syms.sort();
        if let Some(existing) = self.0.iter_mut().find(|x| x.syms == m.syms) {
            existing.coef += m.coef;
            if existing.coef == 0.0 {
                self.0.retain(|x| x.coef != 0.0);
            }
        } else {
            self.0.push(m);
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for m in &other.0 {
            out.push(m.clone());
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for a in &self.0 {
            for b in &other.0 {
                let mut syms = a.syms.clone();
                syms.extend(b.syms.iter().cloned());
                out.push(Mono {
                    coef: a.coef * b.coef,
                    syms,
                });
            }
        }
        out
    }

    pub(crate) fn to_expr(&self) -> LabelExpr {
        let mono = |m: &Mono| -> LabelExpr {
            if m.syms.is_empty() {
                return LabelExpr::Const(m.coef);
            }
            if m.coef == 1.0 && m.syms.len() == 1 {
                return m.syms[0].to_expr();
            }
            let mut fs = Vec::with_capacity(m.syms.len() + 1);
            if m.coef != 1.0 {
                fs.push(LabelExpr::Const(m.coef));
            }
            fs.extend(m.syms.iter().map(Sym::to_expr));
            LabelExpr::Product(fs)
        };
        match self.0.as_slice() {
            [] => LabelExpr::Const(0.0),
            [m] => mono(m),
            ms => LabelExpr::Sum(ms.iter().map(mono).collect()),
        }
    }
}

impl LabelExpr {
    pub fn constant(c: f64) -> Self {
        LabelExpr::Const(c)
    }

    pub fn table_pdf(var: impl Into<String>, table: impl Into<String>) -> Self {
        LabelExpr::TablePdf {
            var: var.into(),
            table: table.into(),
        }
    }

    pub fn pnew(table: impl Into<String>) -> Self {
        LabelExpr::PNewConst(table.into())
    }

    pub fn prsing(term: Term) -> Self {
        LabelExpr::PrSing(term)
    }

    pub(crate) fn to_poly(&self) -> Poly {
        let sym = |s: Sym| {
            let mut p = Poly::default();
            p.push(Mono {
                coef: 1.0,
                syms: vec![s],
            });
            p
        };
        match self {
            LabelExpr::Const(c) => Poly::constant(*c),
            LabelExpr::PrSing(t) => sym(Sym::PrSing(t.clone())),
            LabelExpr::TablePdf { var, table } => sym(Sym::TablePdf(var.clone(), table.clone())),
            LabelExpr::PNewConst(t) => sym(Sym::PNew(t.clone())),
            LabelExpr::Product(fs) => fs
                .iter()
                .fold(Poly::constant(1.0), |acc, f| acc.mul(&f.to_poly())),
            LabelExpr::Sum(fs) => fs
                .iter()
                .fold(Poly::default(), |acc, f| acc.add(&f.to_poly())),
        }
    }

    /// Rewrites the label into normal form.
    pub fn normalized(&self) -> LabelExpr {
        self.to_poly().to_expr()
    }

    pub fn mul(&self, other: &LabelExpr) -> LabelExpr {
        if self.is_zero() || other.is_zero() {
            return LabelExpr::Const(0.0);
        }
        self.to_poly().mul(&other.to_poly()).to_expr()
    }

    pub fn add(&self, other: &LabelExpr) -> LabelExpr {
        self.to_poly().add(&other.to_poly()).to_expr()
    }

    pub fn scale(&self, c: f64) -> LabelExpr {
        self.mul(&LabelExpr::Const(c))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LabelExpr::Const(c) if *c == 0.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            LabelExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Variables the label depends on.
    pub fn vars(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .to_poly()
            .0
            .iter()
            .flat_map(|m| m.syms.iter().filter_map(|s| s.var().map(str::to_string)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.vars().iter().any(|v| v == var)
    }

    /// Tables the label refers to.
    pub fn tables(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .to_poly()
            .0
            .iter()
            .flat_map(|m| m.syms.iter())
            .filter_map(|s| match s {
                Sym::TablePdf(_, t) | Sym::PNew(t) => Some(t.clone()),
                Sym::PrSing(_) => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Substitutes an observed value. A table density of a listed name folds
    /// to its entry, of an unlisted name to that table's `pnew`.
    pub fn ground(&self, var: &str, value: &str, env: &Env) -> Result<LabelExpr> {
        let mut out = Poly::default();
        for m in self.to_poly().0 {
            let mut coef = m.coef;
            let mut syms = Vec::with_capacity(m.syms.len());
            for s in m.syms {
                match s {
                    Sym::PrSing(Term::Var(v)) if v == var => {
                        syms.push(Sym::PrSing(Term::lit(value)))
                    }
                    Sym::TablePdf(v, t) if v == var => match env.tables.get(&t)?.lookup(value) {
                        Some(p) => coef *= p,
                        None => syms.push(Sym::PNew(t)),
                    },
                    s => syms.push(s),
                }
            }
            out.push(Mono { coef, syms });
        }
        Ok(out.to_expr())
    }

    /// Replaces variable `from` with variable `to`.
    pub fn rename(&self, from: &str, to: &str) -> LabelExpr {
        let mut out = Poly::default();
        for m in self.to_poly().0 {
            let syms = m
                .syms
                .into_iter()
                .map(|s| match s {
                    Sym::PrSing(Term::Var(v)) if v == from => {
                        Sym::PrSing(Term::Var(to.to_string()))
                    }
                    Sym::TablePdf(v, t) if v == from => Sym::TablePdf(to.to_string(), t),
                    s => s,
                })
                .collect();
            out.push(Mono { coef: m.coef, syms });
        }
        out.to_expr()
    }

    /// Numeric value under an assignment of every variable the label mentions.
    pub fn eval(&self, a: &Assignment, env: &Env) -> Result<f64> {
        let mut total = 0.0;
        for m in self.to_poly().0 {
            let mut v = m.coef;
            for s in &m.syms {
                v *= s.eval(a, env)?;
            }
            total += v;
        }
        Ok(total)
    }

    /// Folds every factor that no longer depends on a variable into the
    /// coefficient.
    pub fn fold_constants(&self, env: &Env) -> Result<LabelExpr> {
        let mut out = Poly::default();
        let empty = Assignment::new();
        for m in self.to_poly().0 {
            let mut coef = m.coef;
            let mut syms = Vec::new();
            for s in m.syms {
                if s.var().is_none() {
                    coef *= s.eval(&empty, env)?;
                } else {
                    syms.push(s);
                }
            }
            out.push(Mono { coef, syms });
        }
        Ok(out.to_expr())
    }
}

impl fmt::Display for LabelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelExpr::Const(c) => write!(f, "{c}"),
            LabelExpr::PrSing(t) => write!(f, "prsing({t})"),
            LabelExpr::TablePdf { var, table } => write!(f, "lookup({var}, {table})"),
            LabelExpr::PNewConst(t) => write!(f, "pnew({t})"),
            LabelExpr::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            LabelExpr::Sum(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, VariableDecl};
    use crate::table::{Count, NameTable, TableRegistry};

    fn env() -> Env {
        let male = NameTable::new(
            "male",
            vec![("DAVID".to_string(), 0.02363), ("DAVIS".to_string(), 0.01)],
            (1.0 - 0.03363) / 1000.0,
            Count::Finite(1000),
        )
        .unwrap();
        let tables: TableRegistry = std::iter::once(male).collect();
        let vars = vec![
            VariableDecl::large("Y", Alphabet::latin()).unwrap(),
            VariableDecl::large("Z", Alphabet::latin()).unwrap(),
        ];
        Env::new(Alphabet::latin(), tables, vars).unwrap()
    }

    #[test]
    fn products_are_flat_with_merged_constants() {
        let a = LabelExpr::Product(vec![
            LabelExpr::Const(2.0),
            LabelExpr::Product(vec![LabelExpr::Const(3.0), LabelExpr::pnew("male")]),
        ]);
        assert_eq!(
            a.normalized(),
            LabelExpr::Product(vec![LabelExpr::Const(6.0), LabelExpr::pnew("male")])
        );
        assert_eq!(
            LabelExpr::Const(2.0).mul(&LabelExpr::Const(4.0)),
            LabelExpr::Const(8.0)
        );
        assert_eq!(
            LabelExpr::Const(2.0).add(&LabelExpr::Const(4.0)),
            LabelExpr::Const(6.0)
        );
    }

    #[test]
    fn like_terms_merge() {
        let x = LabelExpr::table_pdf("Y", "male");
        assert_eq!(x.add(&x.scale(3.0)), x.scale(4.0));
        assert_eq!(x.add(&x.scale(-1.0)), LabelExpr::Const(0.0));
    }

    #[test]
    fn zero_annihilates() {
        let x = LabelExpr::table_pdf("Y", "male");
        assert!(x.mul(&LabelExpr::Const(0.0)).is_zero());
    }

    #[test]
    fn grounding_folds_table_densities() {
        let e = env();
        let x = LabelExpr::table_pdf("Y", "male");
        assert_eq!(
            x.ground("Y", "david", &e).unwrap(),
            LabelExpr::Const(0.02363)
        );
        assert_eq!(x.ground("Y", "DAVIG", &e).unwrap(), LabelExpr::pnew("male"));
        let p = LabelExpr::prsing(Term::var("Y"));
        assert_eq!(
            p.ground("Y", "DAVE", &e).unwrap(),
            LabelExpr::prsing(Term::lit("DAVE"))
        );
        assert_eq!(p.ground("Z", "DAVE", &e).unwrap(), p);
    }

    #[test]
    fn evaluation() {
        let e = env();
        let p = LabelExpr::prsing(Term::lit("DAVE"));
        assert!((p.eval(&Assignment::new(), &e).unwrap() - 0.01).abs() < 1e-15);
        let x = LabelExpr::table_pdf("Y", "male").mul(&p);
        let a = Assignment::new().with("Y", "DAVIS");
        assert!((x.eval(&a, &e).unwrap() - 0.0001).abs() < 1e-15);
        assert_eq!(x.vars(), vec!["Y".to_string()]);
        assert_eq!(x.tables(), vec!["male".to_string()]);
    }

    #[test]
    fn sums_distribute_over_products() {
        let e = env();
        let s = LabelExpr::table_pdf("Y", "male").add(&LabelExpr::Const(0.5));
        let p = s.mul(&LabelExpr::prsing(Term::var("Z")));
        let a = Assignment::new().with("Y", "DAVID").with("Z", "AB");
        let expect = (0.02363 + 0.5) * (1.0 / 50.0);
        assert!((p.eval(&a, &e).unwrap() - expect).abs() < 1e-15);
        assert!(matches!(p, LabelExpr::Sum(_)));
    }
}
