//! Variables, their domains and assignments.
//!
//! A variable is either *small* (an explicit, ordered list of symbols) or
//! *large* (every finite string over an alphabet). Large values are
//! case-normalized to uppercase everywhere they enter the crate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uppercases a large-domain value. Every string that reaches an atom,
/// a table or an assignment goes through here.
pub fn normalize(value: &str) -> String {
    value.to_uppercase()
}

/// Ordered set of characters the strings of a large domain are built from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn new(chars: &str) -> Result<Self> {
        let mut out: Vec<char> = Vec::new();
        for c in chars.chars().flat_map(char::to_uppercase) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        if out.len() < 2 {
            return Err(Error::InvalidDomain {
                var: "<alphabet>".into(),
                reason: format!(
                    "alphabet needs at least 2 distinct characters, got {}",
                    out.len()
                ),
            });
        }
        Ok(Alphabet(out))
    }

    /// The 26 uppercase Latin letters.
    pub fn latin() -> Self {
        Alphabet(('A'..='Z').collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.0
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }

    /// Checks that a (normalized) word only uses characters of the alphabet.
    pub fn check_word(&self, word: &str) -> Result<()> {
        match word.chars().find(|c| !self.contains(*c)) {
            Some(c) => Err(Error::OutsideAlphabet(c)),
            None => Ok(()),
        }
    }
}

impl TryFrom<String> for Alphabet {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Alphabet::new(&value)
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.0.into_iter().collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Explicitly listed symbols, in declaration order.
    SmallExtensional(Vec<String>),
    /// All finite strings over the alphabet.
    LargeCountable(Alphabet),
}

impl Domain {
    pub fn small<S: AsRef<str>>(values: &[S]) -> Self {
        Domain::SmallExtensional(values.iter().map(|v| v.as_ref().to_string()).collect())
    }

    pub fn is_small(&self) -> bool {
        matches!(self, Domain::SmallExtensional(_))
    }

    pub fn is_large(&self) -> bool {
        !self.is_small()
    }

    /// Values of a small domain; `None` for large domains.
    pub fn values(&self) -> Option<&[String]> {
        match self {
            Domain::SmallExtensional(v) => Some(v),
            Domain::LargeCountable(_) => None,
        }
    }

    pub fn contains(&self, value: &str) -> bool {
        match self {
            Domain::SmallExtensional(v) => v.iter().any(|x| x == value),
            Domain::LargeCountable(a) => {
                !value.is_empty() && a.check_word(&normalize(value)).is_ok()
            }
        }
    }

    fn validate(&self, var: &str) -> Result<()> {
        match self {
            Domain::SmallExtensional(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidDomain {
                        var: var.into(),
                        reason: "small domain needs at least one value".into(),
                    });
                }
                for (i, v) in values.iter().enumerate() {
                    if values[..i].contains(v) {
                        return Err(Error::InvalidDomain {
                            var: var.into(),
                            reason: format!("value `{v}` listed twice"),
                        });
                    }
                }
                Ok(())
            }
            Domain::LargeCountable(a) if a.len() < 2 => Err(Error::InvalidDomain {
                var: var.into(),
                reason: "alphabet needs at least 2 characters".into(),
            }),
            Domain::LargeCountable(_) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Domain,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, domain: Domain) -> Result<Self> {
        let name = name.into();
        domain.validate(&name)?;
        Ok(VariableDecl { name, domain })
    }

    pub fn small<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Result<Self> {
        Self::new(name, Domain::small(values))
    }

    pub fn large(name: impl Into<String>, alphabet: Alphabet) -> Result<Self> {
        Self::new(name, Domain::LargeCountable(alphabet))
    }
}

/// A partial map from variable names to values.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, value: impl Into<String>) -> Self {
        self.insert(var, value);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, value: impl Into<String>) {
        self.0.insert(var.into(), value.into());
    }

    pub fn remove(&mut self, var: &str) -> Option<String> {
        self.0.remove(var)
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Assignment(
            iter.into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        )
    }
}
