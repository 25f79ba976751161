use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// How the selected values of one facet combine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// A record matches when it holds any selected value.
    #[default]
    Or,
    /// A record matches only when it holds every selected value.
    And,
}

/// Per-facet value selections. Clauses are conjoined; values inside a clause
/// combine according to `within_facet_mode`. An empty filter matches all records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    #[serde(default)]
    pub clauses: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub within_facet_mode: MatchMode,
}

impl FilterSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Self {
        self.within_facet_mode = mode;
        self
    }

    /// Adds values to the clause for `facet`, creating it if needed.
    pub fn with<I, S>(mut self, facet: &str, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.select(facet, values);
        self
    }

    pub fn select<I, S>(&mut self, facet: &str, values: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.clauses
            .entry(facet.to_string())
            .or_default()
            .extend(values.into_iter().map(Into::into));
    }

    /// Copy of this filter without the clause for `facet`.
    pub fn without(&self, facet: &str) -> Self {
        let mut out = self.clone();
        out.clauses.remove(facet);
        out
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Parses a `facet=value` assignment, splitting on the first `=`.
    pub fn parse_assignment(s: &str) -> Option<(&str, &str)> {
        let (facet, value) = s.split_once('=')?;
        (!facet.is_empty() && !value.is_empty()).then_some((facet, value))
    }
}
