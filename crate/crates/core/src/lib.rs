//! Exact inference for Bayesian networks whose variables may range over
//! unbounded sets of strings.
//!
//! Factors are decision trees whose internal nodes test small variables or
//! string predicates; variable elimination sums large variables out in closed
//! form rather than by enumeration.

pub mod cli;
pub mod domain;
pub mod engine;
pub mod env;
pub mod error;
pub mod io;
pub mod label;
pub mod linkage;
pub mod oracle;
pub mod predicate;
pub mod sumout;
pub mod table;
pub mod tree;

pub use domain::{Alphabet, Assignment, Domain, VariableDecl};
pub use env::Env;
pub use error::{Error, Result};
pub use label::LabelExpr;
pub use predicate::{Atom, ConstraintSet, Literal, SolutionSet, Term};
pub use table::{Coverage, NameTable, TableRegistry};
pub use tree::{Context, Factor, TreeNode};
