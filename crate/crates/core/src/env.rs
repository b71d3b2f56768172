use std::collections::BTreeMap;

use crate::domain::{normalize, Alphabet, Domain, VariableDecl};
use crate::error::{Error, Result};
use crate::table::TableRegistry;

/// Everything tree operations need to interpret variables and labels:
/// domains, the shared alphabet of large variables, and the name tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Env {
    pub alphabet: Alphabet,
    pub tables: TableRegistry,
    vars: Vec<VariableDecl>,
    index: BTreeMap<String, usize>,
}

impl Env {
    pub fn new(alphabet: Alphabet, tables: TableRegistry, vars: Vec<VariableDecl>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
            if let Domain::LargeCountable(a) = &v.domain {
                if *a != alphabet {
                    return Err(Error::InvalidDomain {
                        var: v.name.clone(),
                        reason: format!(
                            "alphabet `{a}` differs from the network alphabet `{alphabet}`"
                        ),
                    });
                }
            }
        }
        Ok(Env {
            alphabet,
            tables,
            vars,
            index,
        })
    }

    /// Declarations in insertion order.
    pub fn variables(&self) -> &[VariableDecl] {
        &self.vars
    }

    pub fn has(&self, var: &str) -> bool {
        self.index.contains_key(var)
    }

    pub fn domain(&self, var: &str) -> Result<&Domain> {
        self.index
            .get(var)
            .map(|&i| &self.vars[i].domain)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn is_large(&self, var: &str) -> Result<bool> {
        Ok(self.domain(var)?.is_large())
    }

    pub fn small_values(&self, var: &str) -> Result<&[String]> {
        self.domain(var)?
            .values()
            .ok_or_else(|| Error::InvalidDomain {
                var: var.to_string(),
                reason: "expected a small variable".into(),
            })
    }

    /// Validates a value for `var`, returning it normalized.
    pub fn check_value(&self, var: &str, value: &str) -> Result<String> {
        let domain = self.domain(var)?;
        let value = if domain.is_large() {
            normalize(value)
        } else {
            value.to_string()
        };
        if domain.contains(&value) {
            Ok(value)
        } else {
            Err(Error::ValueOutsideDomain {
                var: var.to_string(),
                value,
            })
        }
    }

    /// Same variables and alphabet, different tables.
    pub fn with_tables(&self, tables: TableRegistry) -> Env {
        Env {
            tables,
            ..self.clone()
        }
    }
}
