use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CatalogError;
use crate::ingest::{DATASET_FACET, MODEL_FACET};

pub const ID_PLACEHOLDER: &str = "{id}";
pub const DEFAULT_DATASET_URL: &str = "https://huggingface.co/datasets/{id}";
pub const DEFAULT_MODEL_URL: &str = "https://huggingface.co/{id}";

/// A URL pattern with exactly one `{id}` placeholder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct UrlTemplate(String);

impl UrlTemplate {
    pub fn new(template: impl Into<String>) -> Result<Self, CatalogError> {
        let template = template.into();
        if template.matches(ID_PLACEHOLDER).count() != 1 {
            return Err(CatalogError::BadTemplate(template));
        }
        Ok(Self(template))
    }

    pub fn expand(&self, id: &str) -> String {
        self.0.replacen(ID_PLACEHOLDER, id, 1)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UrlTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for UrlTemplate {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl TryFrom<String> for UrlTemplate {
    type Error = CatalogError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Self::new(s)
    }
}

impl From<UrlTemplate> for String {
    fn from(t: UrlTemplate) -> Self {
        t.0
    }
}

/// Source-platform pages for datasets and models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct UrlTemplates {
    pub dataset: UrlTemplate,
    pub model: UrlTemplate,
}

impl Default for UrlTemplates {
    fn default() -> Self {
        Self {
            dataset: UrlTemplate(DEFAULT_DATASET_URL.to_string()),
            model: UrlTemplate(DEFAULT_MODEL_URL.to_string()),
        }
    }
}

impl UrlTemplates {
    /// External page of a dataset record.
    pub fn external_url(&self, record_id: &str) -> String {
        self.dataset.expand(record_id)
    }

    /// External page for a value of `facet`, if that facet names hub entities.
    pub fn for_facet_value(&self, facet: &str, value: &str) -> Option<String> {
        match facet {
            DATASET_FACET => Some(self.dataset.expand(value)),
            MODEL_FACET => Some(self.model.expand(value)),
            _ => None,
        }
    }
}
