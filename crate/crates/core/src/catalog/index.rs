use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::filter::{FilterSpec, MatchMode};
use super::CatalogError;
use crate::ingest::{CatalogSnapshot, DatasetRecord, FacetSchema};

/// Pseudo-value standing for "record has no value for this facet".
///
/// It is reported by [`FacetIndex::facet_values`] and may be selected in a
/// filter clause to match records lacking the facet.
pub const MISSING_VALUE: &str = "(missing)";

/// Position of a record in the index; records are numbered in id order.
pub type Ordinal = u32;

/// A facet value with the number of matching records holding it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCount {
    pub value: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetSummary {
    pub name: String,
    pub distinct_values: usize,
    pub records_with_values: usize,
    pub records_missing: usize,
}

/// Immutable inverted index from facet values to record ordinals.
#[derive(Debug, Clone)]
pub struct FacetIndex {
    records: Vec<DatasetRecord>,
    by_id: HashMap<String, Ordinal>,
    postings: BTreeMap<String, BTreeMap<String, Vec<Ordinal>>>,
    missing: BTreeMap<String, Vec<Ordinal>>,
    schema: FacetSchema,
    source_label: String,
}

/// Builds the index for a snapshot.
pub fn build_index(snapshot: CatalogSnapshot) -> FacetIndex {
    FacetIndex::new(snapshot)
}

impl FacetIndex {
    pub fn new(snapshot: CatalogSnapshot) -> Self {
        let source_label = snapshot.source_label().to_string();
        let (records, schema) = snapshot.into_parts();
        assert!(
            records.len() <= Ordinal::MAX as usize,
            "catalog exceeds ordinal range"
        );

        let mut postings: BTreeMap<String, BTreeMap<String, Vec<Ordinal>>> = schema
            .known_facets()
            .iter()
            .map(|f| (f.clone(), BTreeMap::new()))
            .collect();
        let mut missing: BTreeMap<String, Vec<Ordinal>> = schema
            .known_facets()
            .iter()
            .map(|f| (f.clone(), Vec::new()))
            .collect();
        let mut by_id = HashMap::with_capacity(records.len());

        for (ord, record) in records.iter().enumerate() {
            let ord = ord as Ordinal;
            by_id.insert(record.id.clone(), ord);
            for (facet, values) in postings.iter_mut() {
                match record.facets.get(facet) {
                    Some(vs) => {
                        for v in vs {
                            match values.get_mut(v) {
                                Some(list) => list.push(ord),
                                None => {
                                    values.insert(v.clone(), vec![ord]);
                                }
                            }
                        }
                    }
                    None => missing.get_mut(facet).expect("same keys").push(ord),
                }
            }
        }

        Self {
            records,
            by_id,
            postings,
            missing,
            schema,
            source_label,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn schema(&self) -> &FacetSchema {
        &self.schema
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn records(&self) -> &[DatasetRecord] {
        &self.records
    }

    pub fn record(&self, ordinal: Ordinal) -> Result<&DatasetRecord, CatalogError> {
        self.records
            .get(ordinal as usize)
            .ok_or_else(|| CatalogError::RecordNotFound(format!("#{ordinal}")))
    }

    pub fn ordinal_of(&self, id: &str) -> Option<Ordinal> {
        self.by_id.get(id).copied()
    }

    pub fn record_by_id(&self, id: &str) -> Result<&DatasetRecord, CatalogError> {
        self.ordinal_of(id)
            .map(|o| &self.records[o as usize])
            .ok_or_else(|| CatalogError::RecordNotFound(id.to_string()))
    }

    /// Sorted ordinals holding `value` for `facet`; empty if the value is unknown.
    pub fn postings(&self, facet: &str, value: &str) -> &[Ordinal] {
        self.postings
            .get(facet)
            .and_then(|vs| vs.get(value))
            .map_or(&[], Vec::as_slice)
    }

    /// Sorted ordinals lacking `facet`.
    pub fn missing(&self, facet: &str) -> &[Ordinal] {
        self.missing.get(facet).map_or(&[], Vec::as_slice)
    }

    /// All values of a facet with their posting lists.
    pub fn values(&self, facet: &str) -> Result<&BTreeMap<String, Vec<Ordinal>>, CatalogError> {
        self.postings
            .get(facet)
            .ok_or_else(|| CatalogError::UnknownFacet(facet.to_string()))
    }

    pub fn facet_summaries(&self) -> Vec<FacetSummary> {
        self.postings
            .iter()
            .map(|(name, values)| {
                let missing = self.missing(name).len();
                FacetSummary {
                    name: name.clone(),
                    distinct_values: values.len(),
                    records_with_values: self.records.len() - missing,
                    records_missing: missing,
                }
            })
            .collect()
    }

    /// Ordinals of records matching `filter`, ascending.
    pub fn apply_filter(&self, filter: &FilterSpec) -> Result<Vec<Ordinal>, CatalogError> {
        Ok(self
            .matching(filter)?
            .ones()
            .map(|o| o as Ordinal)
            .collect())
    }

    /// Like [`apply_filter`](Self::apply_filter) but returns the bitset.
    pub fn matching(&self, filter: &FilterSpec) -> Result<FixedBitSet, CatalogError> {
        let n = self.records.len();
        let mut acc = FixedBitSet::with_capacity(n);
        acc.insert_range(..);
        for (facet, selected) in &filter.clauses {
            if !self.postings.contains_key(facet) {
                return Err(CatalogError::UnknownFacet(facet.clone()));
            }
            if selected.is_empty() {
                return Err(CatalogError::EmptyClause(facet.clone()));
            }
            let clause = match filter.within_facet_mode {
                MatchMode::Or => {
                    let mut any = FixedBitSet::with_capacity(n);
                    for value in selected {
                        any.extend(self.value_ordinals(facet, value).iter().map(|&o| o as usize));
                    }
                    any
                }
                MatchMode::And => {
                    let mut all = acc.clone();
                    for value in selected {
                        let mut one = FixedBitSet::with_capacity(n);
                        one.extend(self.value_ordinals(facet, value).iter().map(|&o| o as usize));
                        all.intersect_with(&one);
                    }
                    all
                }
            };
            acc.intersect_with(&clause);
        }
        Ok(acc)
    }

    fn value_ordinals(&self, facet: &str, value: &str) -> &[Ordinal] {
        if value == MISSING_VALUE {
            self.missing(facet)
        } else {
            self.postings(facet, value)
        }
    }

    /// Values of `facet` with counts over the records matching `active`, the
    /// clause on `facet` itself excluded. Sorted by descending count, then
    /// value; a trailing [`MISSING_VALUE`] entry counts matching records that
    /// lack the facet.
    pub fn facet_values(
        &self,
        facet: &str,
        active: &FilterSpec,
    ) -> Result<Vec<ValueCount>, CatalogError> {
        let values = self.values(facet)?;
        let others = active.without(facet);

        let (mut counts, missing): (Vec<ValueCount>, usize) = if others.is_empty() {
            let counts = values
                .iter()
                .map(|(v, ords)| ValueCount {
                    value: v.clone(),
                    count: ords.len(),
                })
                .collect();
            (counts, self.missing(facet).len())
        } else {
            let matched = self.matching(&others)?;
            let mut tally: HashMap<&str, usize> = HashMap::new();
            let mut missing = 0;
            for ord in matched.ones() {
                match self.records[ord].facets.get(facet) {
                    Some(vs) => {
                        for v in vs {
                            *tally.entry(v.as_str()).or_default() += 1;
                        }
                    }
                    None => missing += 1,
                }
            }
            let counts = tally
                .into_iter()
                .map(|(v, count)| ValueCount {
                    value: v.to_string(),
                    count,
                })
                .collect();
            (counts, missing)
        };

        counts.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
        if missing > 0 {
            counts.push(ValueCount {
                value: MISSING_VALUE.to_string(),
                count: missing,
            });
        }
        Ok(counts)
    }
}
