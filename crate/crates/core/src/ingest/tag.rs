use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Separator between a facet prefix and its value in a card tag.
pub const TAG_SEPARATOR: char = ':';

/// Reserved facet holding the record's own id.
pub const DATASET_FACET: &str = "dataset";

/// Facet populated by `model:` tags.
pub const MODEL_FACET: &str = "model";

/// Default home for tags without a prefix.
pub const DEFAULT_FALLBACK_FACET: &str = "tag";

/// Tag prefixes found on hub dataset cards.
pub const STANDARD_PREFIXES: &[&str] = &[
    "task_categories",
    "annotations_creators",
    "language_creators",
    "multilinguality",
    "source_datasets",
    "language",
    "license",
    "size_categories",
    "format",
    "modality",
    "library",
    "model",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("empty tag")]
    Empty,
    #[error("tag {0:?} has an empty facet name")]
    EmptyFacet(String),
    #[error("tag {0:?} has an empty value")]
    EmptyValue(String),
    #[error("tag {tag:?} names unknown facet {facet:?} and the schema is closed")]
    UnknownFacet { tag: String, facet: String },
    #[error("tag {0:?} targets the reserved facet \"dataset\"")]
    ReservedFacet(String),
}

/// The facet names a catalog knows about and how unknown tag prefixes are treated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetSchema {
    known_facets: BTreeSet<String>,
    open_schema: bool,
    fallback_facet: String,
}

impl Default for FacetSchema {
    fn default() -> Self {
        Self::new(true, DEFAULT_FALLBACK_FACET)
    }
}

impl FacetSchema {
    /// Schema seeded with the reserved facet, the standard prefixes and the fallback facet.
    pub fn new(open_schema: bool, fallback_facet: impl Into<String>) -> Self {
        let fallback_facet = fallback_facet.into();
        let mut known_facets: BTreeSet<String> =
            STANDARD_PREFIXES.iter().map(|s| s.to_string()).collect();
        known_facets.insert(DATASET_FACET.to_string());
        known_facets.insert(fallback_facet.clone());
        Self {
            known_facets,
            open_schema,
            fallback_facet,
        }
    }

    pub fn is_known(&self, facet: &str) -> bool {
        self.known_facets.contains(facet)
    }

    pub fn known_facets(&self) -> &BTreeSet<String> {
        &self.known_facets
    }

    pub fn open_schema(&self) -> bool {
        self.open_schema
    }

    pub fn fallback_facet(&self) -> &str {
        &self.fallback_facet
    }

    /// Registers a facet. Used when assembling a snapshot from records parsed
    /// under an open schema.
    pub fn register(&mut self, facet: &str) {
        if !self.known_facets.contains(facet) {
            self.known_facets.insert(facet.to_string());
        }
    }
}

/// Splits a card tag into `(facet, value)` on the first separator.
///
/// Everything right of the first `:` is kept verbatim, so values such as
/// `10K<n<100K` or `a:b` survive. Tags without a separator land in the
/// schema's fallback facet with the whole tag as value.
pub fn parse_tag<'a>(tag: &'a str, schema: &'a FacetSchema) -> Result<(&'a str, &'a str), TagError> {
    if tag.is_empty() {
        return Err(TagError::Empty);
    }
    let Some((facet, value)) = tag.split_once(TAG_SEPARATOR) else {
        return Ok((schema.fallback_facet(), tag));
    };
    if facet.is_empty() {
        return Err(TagError::EmptyFacet(tag.to_string()));
    }
    if value.is_empty() {
        return Err(TagError::EmptyValue(tag.to_string()));
    }
    if facet == DATASET_FACET {
        return Err(TagError::ReservedFacet(tag.to_string()));
    }
    if !schema.open_schema() && !schema.is_known(facet) {
        return Err(TagError::UnknownFacet {
            tag: tag.to_string(),
            facet: facet.to_string(),
        });
    }
    Ok((facet, value))
}
