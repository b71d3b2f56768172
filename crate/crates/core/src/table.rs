//! Finite name-frequency tables with a residual mass for unseen names.
//!
//! A table lists explicit probabilities for known names and closes the
//! distribution with `n_unseen` further names of probability `pnew` each.
//! Complement masses therefore have a closed form and are never enumerated.

use std::collections::BTreeMap;
use std::fmt;

use crate::domain::normalize;
use crate::error::{Error, Result};

/// Tolerance of the normalization invariant.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Default fraction of the probability mass covered by a loaded table.
pub const DEFAULT_COVERAGE: f64 = 0.9;

/// A cardinality that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(u64),
    Unbounded,
}

impl Count {
    pub fn finite(self) -> Option<u64> {
        match self {
            Count::Finite(n) => Some(n),
            Count::Unbounded => None,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Unbounded => f.write_str("UNBOUNDED"),
        }
    }
}

/// A probability mass that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mass {
    Finite(f64),
    Unbounded,
}

impl Mass {
    pub fn finite(self) -> Option<f64> {
        match self {
            Mass::Finite(m) => Some(m),
            Mass::Unbounded => None,
        }
    }
}

/// How raw weights of a table file become probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coverage {
    /// Weights are rescaled so the listed names carry this total mass.
    Fraction(f64),
    /// Weights already are probabilities; the covered mass is their sum.
    AsListed,
}

impl Default for Coverage {
    fn default() -> Self {
        Coverage::Fraction(DEFAULT_COVERAGE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NameTable {
    id: String,
    entries: BTreeMap<String, f64>,
    pnew: f64,
    n_unseen: Count,
    entry_total: f64,
}

impl NameTable {
    /// Builds a table from already-normalized parts, checking every invariant.
    pub fn new(
        id: impl Into<String>,
        entries: impl IntoIterator<Item = (String, f64)>,
        pnew: f64,
        n_unseen: Count,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| Error::InvalidTable {
            table: id.clone(),
            reason,
        };
        let mut map = BTreeMap::new();
        for (name, p) in entries {
            let name = normalize(&name);
            if !(p > 0.0 && p <= 1.0) {
                return Err(invalid(format!(
                    "probability {p} of `{name}` is outside (0,1]"
                )));
            }
            if map.insert(name.clone(), p).is_some() {
                return Err(invalid(format!("duplicate name `{name}`")));
            }
        }
        if !(pnew > 0.0 && pnew < 1.0) {
            return Err(invalid(format!("pnew {pnew} is outside (0,1)")));
        }
        let entry_total = neumaier_sum(map.values().copied());
        if entry_total > 1.0 + NORMALIZATION_TOL {
            return Err(invalid(format!("entries sum to {entry_total} > 1")));
        }
        if let Count::Finite(n) = n_unseen {
            let total = entry_total + pnew * n as f64;
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(invalid(format!(
                    "entries ({entry_total}) plus residual ({pnew} x {n}) sum to {total}, not 1"
                )));
            }
        }
        Ok(NameTable {
            id,
            entries: map,
            pnew,
            n_unseen,
            entry_total,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pnew(&self) -> f64 {
        self.pnew
    }

    pub fn n_unseen(&self) -> Count {
        self.n_unseen
    }

    /// Sum of all listed entries.
    pub fn entry_total(&self) -> f64 {
        self.entry_total
    }

    pub fn contains(&self, value: &str) -> bool {
        self.entries.contains_key(&normalize(value))
    }

    /// Entry probability, or `None` when the name is not listed.
    pub fn lookup(&self, value: &str) -> Option<f64> {
        self.entries.get(&normalize(value)).copied()
    }

    /// Per-value probability under the table model: the entry or `pnew`.
    pub fn prob(&self, value: &str) -> f64 {
        self.lookup(value).unwrap_or(self.pnew)
    }

    /// Mass of the unseen values left after excluding `excluded` of them.
    pub fn residual_mass(&self, excluded: u64) -> Result<Mass> {
        match self.n_unseen {
            Count::Unbounded => Ok(Mass::Unbounded),
            Count::Finite(n) if excluded > n => Err(Error::ExcludedExceedsUnseen {
                table: self.id.clone(),
                excluded,
                available: n,
            }),
            Count::Finite(n) => Ok(Mass::Finite(self.pnew * (n - excluded) as f64)),
        }
    }
}

/// Parses a census-style table: `NAME WEIGHT [ignored columns...]` per line,
/// with `#` comments and blank lines skipped.
pub fn load_name_table(id: &str, text: &str, pnew: f64, coverage: Coverage) -> Result<NameTable> {
    let invalid = |reason: String| Error::InvalidTable {
        table: id.to_string(),
        reason,
    };
    let mut raw: Vec<(String, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let name = cols.next().map(normalize).unwrap_or_default();
        let weight: f64 = cols
            .next()
            .ok_or_else(|| invalid(format!("line {}: missing weight", lineno + 1)))?
            .parse()
            .map_err(|e| invalid(format!("line {}: bad weight: {e}", lineno + 1)))?;
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(invalid(format!(
                "line {}: weight of `{name}` must be positive",
                lineno + 1
            )));
        }
        if raw.iter().any(|(n, _)| *n == name) {
            return Err(invalid(format!(
                "line {}: duplicate name `{name}`",
                lineno + 1
            )));
        }
        raw.push((name, weight));
    }
    if raw.is_empty() {
        return Err(invalid("no entries".into()));
    }

    let weight_sum = neumaier_sum(raw.iter().map(|(_, w)| *w));
    let (entries, covered): (Vec<(String, f64)>, f64) = match coverage {
        Coverage::Fraction(c) => {
            if !(c > 0.0 && c <= 1.0) {
                return Err(invalid(format!("coverage {c} is outside (0,1]")));
            }
            let scaled = raw
                .into_iter()
                .map(|(n, w)| (n, c * w / weight_sum))
                .collect();
            (scaled, c)
        }
        Coverage::AsListed => {
            if weight_sum > 1.0 + NORMALIZATION_TOL {
                return Err(invalid(format!(
                    "listed probabilities sum to {weight_sum} > 1"
                )));
            }
            (raw, weight_sum.min(1.0))
        }
    };

    let residual = 1.0 - covered;
    if residual <= NORMALIZATION_TOL {
        let pnew = if pnew > 0.0 && pnew < 1.0 {
            pnew
        } else {
            f64::EPSILON
        };
        return NameTable::new(id, entries, pnew, Count::Finite(0));
    }
    if !(pnew > 0.0) || pnew >= residual {
        return Err(invalid(format!(
            "pnew {pnew} must be positive and below the residual mass {residual}"
        )));
    }
    let n_unseen = (residual / pnew).round() as u64;
    // Rounding n_unseen would break normalization; the per-name mass absorbs it.
    let effective_pnew = residual / n_unseen as f64;
    NameTable::new(id, entries, effective_pnew, Count::Finite(n_unseen))
}

/// Named tables a network refers to.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableRegistry(BTreeMap<String, NameTable>);

impl TableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: NameTable) -> Option<NameTable> {
        self.0.insert(table.id().to_string(), table)
    }

    pub fn get(&self, id: &str) -> Result<&NameTable> {
        self.0
            .get(id)
            .ok_or_else(|| Error::UnknownTable(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NameTable> {
        self.0.values()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<NameTable> for TableRegistry {
    fn from_iter<I: IntoIterator<Item = NameTable>>(iter: I) -> Self {
        TableRegistry(iter.into_iter().map(|t| (t.id().to_string(), t)).collect())
    }
}

/// Compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
