//! Card loading, tag parsing, normalization and catalog snapshots.

mod card;
#[cfg(feature = "hub")]
pub mod hub;
mod load;
mod record;
mod snapshot;
mod tag;

use std::path::PathBuf;

use thiserror::Error;

pub use card::RawCard;
pub use load::{load_catalog, parse_catalog, CardError, LoadReport, Location};
pub use record::{normalize_record, DatasetRecord, Normalized, Scalars, SkippedTag};
pub use snapshot::{
    load_snapshot, save_snapshot, write_snapshot, CatalogSnapshot, SnapshotError, SNAPSHOT_MAGIC,
    SNAPSHOT_VERSION,
};
pub use tag::{
    parse_tag, FacetSchema, TagError, DATASET_FACET, DEFAULT_FALLBACK_FACET, MODEL_FACET,
    STANDARD_PREFIXES, TAG_SEPARATOR,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document at {location}: {message}")]
    Malformed { location: String, message: String },
    #[error("page {page} ({url}): HTTP {}: {message}", status.map_or("error".to_string(), |s| s.to_string()))]
    Http {
        page: usize,
        url: String,
        status: Option<u16>,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Result of normalizing a batch of cards.
#[derive(Debug, Clone, Default)]
pub struct NormalizeSummary {
    pub records: Vec<DatasetRecord>,
    pub parsed_tags: usize,
    pub skipped_tags: Vec<(String, SkippedTag)>,
}

/// Normalizes every card of a batch, collecting skipped tags by card id.
pub fn normalize_all(cards: &[RawCard], schema: &FacetSchema) -> NormalizeSummary {
    let mut out = NormalizeSummary::default();
    for card in cards {
        let n = normalize_record(card, schema);
        out.parsed_tags += n.parsed_tags;
        out.skipped_tags
            .extend(n.skipped.into_iter().map(|s| (card.id.clone(), s)));
        out.records.push(n.record);
    }
    out
}
