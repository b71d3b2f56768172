//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain for `{var}`: {reason}")]
    InvalidDomain { var: String, reason: String },

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown table `{0}`")]
    UnknownTable(String),

    #[error("value `{value}` is outside the domain of `{var}`")]
    ValueOutsideDomain { var: String, value: String },

    #[error("variable `{0}` is not assigned")]
    Unassigned(String),

    #[error("no branch of the split on `{var}` accepts `{value}`")]
    DanglingBranch { var: String, value: String },

    #[error("name table `{table}`: {reason}")]
    InvalidTable { table: String, reason: String },

    #[error("excluded count {excluded} exceeds {available} unseen values of table `{table}`")]
    ExcludedExceedsUnseen {
        table: String,
        excluded: u64,
        available: u64,
    },

    #[error("single-edit neighbors of an empty word are undefined")]
    EmptyWord,

    #[error("character `{0}` is not in the alphabet")]
    OutsideAlphabet(char),

    #[error("merge of an empty list of trees")]
    EmptyMerge,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("unbounded mass at leaf [{path}]")]
    UnboundedMass { path: String },

    #[error("cannot sum out `{var}`: {reason} at leaf [{path}]")]
    UnsupportedRelation {
        var: String,
        reason: String,
        path: String,
    },

    #[error("evidence has probability zero")]
    ZeroEvidence,

    #[error("records impossible under difference model")]
    ImpossibleRecords,

    #[error("query variable `{0}` is part of the evidence")]
    QueryInEvidence(String),

    #[error("invalid elimination order: {0}")]
    InvalidOrder(String),

    #[error("closed universe too large: {0} joint states")]
    UniverseTooLarge(u128),

    #[error("invalid closed universe: {0}")]
    InvalidUniverse(String),

    #[error("CPD for `{child}` is not normalized: {detail}")]
    NotNormalized { child: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    /// An error located at a JSON path of an input file.
    #[error("{path}: {source}")]
    At { path: String, source: Box<Error> },

    #[error("cyclic parent graph through `{0}`")]
    Cyclic(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on `{path}`: {message}")]
    Io { path: String, message: String },
}
