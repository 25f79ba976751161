use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::card::RawCard;
use super::tag::{parse_tag, FacetSchema, TagError, DATASET_FACET};

/// Scalar card metadata. Absent fields stay `None` so that an unknown
/// download count is distinguishable from zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalars {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<FixedOffset>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_modified: Option<DateTime<FixedOffset>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downloads: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paperswithcode_id: Option<String>,
}

impl Scalars {
    /// Download count for ordering purposes; unknown sorts as zero.
    pub fn downloads_for_sort(&self) -> u64 {
        self.downloads.unwrap_or(0)
    }

    pub fn likes_for_sort(&self) -> u64 {
        self.likes.unwrap_or(0)
    }
}

/// One normalized catalog entry.
///
/// `facets` never holds an empty set: a facet the card does not mention is
/// simply absent. The record id is always the single value of the reserved
/// `dataset` facet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub scalars: Scalars,
    pub facets: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub description: String,
}

impl DatasetRecord {
    pub fn values(&self, facet: &str) -> Option<&BTreeSet<String>> {
        self.facets.get(facet)
    }

    pub fn has_value(&self, facet: &str, value: &str) -> bool {
        self.facets.get(facet).is_some_and(|vs| vs.contains(value))
    }

    /// Rebuilds a card whose normalization yields this record again.
    pub fn to_card(&self) -> RawCard {
        let tags = self
            .facets
            .iter()
            .filter(|(facet, _)| facet.as_str() != DATASET_FACET)
            .flat_map(|(facet, values)| values.iter().map(move |v| format!("{facet}:{v}")))
            .collect();
        RawCard {
            id: self.id.clone(),
            author: self.scalars.author.clone(),
            created_at: self.scalars.created_at,
            last_modified: self.scalars.last_modified,
            downloads: self.scalars.downloads,
            likes: self.scalars.likes,
            paperswithcode_id: self.scalars.paperswithcode_id.clone(),
            tags,
            description: if self.description.is_empty() {
                None
            } else {
                Some(self.description.clone())
            },
        }
    }
}

/// A tag that could not be placed into a facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedTag {
    pub tag: String,
    pub reason: TagError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub record: DatasetRecord,
    pub parsed_tags: usize,
    pub skipped: Vec<SkippedTag>,
}

/// Turns a raw card into a record. Per-tag failures are collected in
/// [`Normalized::skipped`] and never abort the card.
pub fn normalize_record(card: &RawCard, schema: &FacetSchema) -> Normalized {
    debug_assert!(!card.id.is_empty(), "card id must be non-empty");
    let mut facets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut parsed_tags = 0;
    let mut skipped = Vec::new();
    for tag in &card.tags {
        match parse_tag(tag, schema) {
            Ok((facet, value)) => {
                parsed_tags += 1;
                facets
                    .entry(facet.to_string())
                    .or_default()
                    .insert(value.to_string());
            }
            Err(reason) => skipped.push(SkippedTag {
                tag: tag.clone(),
                reason,
            }),
        }
    }
    facets.insert(DATASET_FACET.to_string(), BTreeSet::from([card.id.clone()]));

    let record = DatasetRecord {
        id: card.id.clone(),
        scalars: Scalars {
            author: card.author.clone(),
            created_at: card.created_at,
            last_modified: card.last_modified,
            downloads: card.downloads,
            likes: card.likes,
            paperswithcode_id: card.paperswithcode_id.clone(),
        },
        facets,
        description: card.description.clone().unwrap_or_default(),
    };
    Normalized {
        record,
        parsed_tags,
        skipped,
    }
}
