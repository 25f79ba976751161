//! Faceted inverted index, filter evaluation and count-annotated value lists.

mod filter;
mod index;
mod url;

use thiserror::Error;

pub use filter::{FilterSpec, MatchMode};
pub use index::{build_index, FacetIndex, FacetSummary, Ordinal, ValueCount, MISSING_VALUE};
pub use url::{UrlTemplate, UrlTemplates, DEFAULT_DATASET_URL, DEFAULT_MODEL_URL, ID_PLACEHOLDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown facet {0:?}")]
    UnknownFacet(String),
    #[error("filter clause for facet {0:?} selects no values")]
    EmptyClause(String),
    #[error("record {0:?} not found")]
    RecordNotFound(String),
    #[error("url template {0:?} must contain exactly one {{id}} placeholder")]
    BadTemplate(String),
}
