use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::FacetSchema;

/// The four-variable recipe for a network: which facet supplies source
/// nodes, which supplies target nodes, which facet's values connect them and
/// which facet colours the connections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologySpec {
    #[serde(alias = "source_var")]
    pub source: String,
    #[serde(alias = "target_var")]
    pub target: String,
    #[serde(alias = "link_var")]
    pub link: String,
    #[serde(default, alias = "thematic_var", skip_serializing_if = "Option::is_none")]
    pub thematic: Option<String>,
}

impl TopologySpec {
    pub fn new(source: &str, target: &str, link: &str) -> Self {
        Self {
            source: source.to_string(),
            target: target.to_string(),
            link: link.to_string(),
            thematic: None,
        }
    }

    pub fn with_thematic(mut self, thematic: &str) -> Self {
        self.thematic = Some(thematic.to_string());
        self
    }

    pub fn kind(&self) -> NetworkKind {
        if self.source == self.target {
            NetworkKind::Unipartite
        } else {
            NetworkKind::Bipartite
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Bipartite,
    Unipartite,
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkKind::Bipartite => "bipartite",
            NetworkKind::Unipartite => "unipartite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Target,
    Link,
    Thematic,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Source => "source",
            Role::Target => "target",
            Role::Link => "link",
            Role::Thematic => "thematic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum TopologyError {
    #[error("{role} facet {facet:?} is not in the schema")]
    UnknownFacet { role: Role, facet: String },
    #[error("link facet {facet:?} must differ from the source facet")]
    LinkEqualsSource { facet: String },
    #[error("link facet {facet:?} must differ from the target facet")]
    LinkEqualsTarget { facet: String },
}

impl TopologyError {
    /// The topology role the error is about.
    pub fn role(&self) -> Role {
        match self {
            TopologyError::UnknownFacet { role, .. } => *role,
            TopologyError::LinkEqualsSource { .. } | TopologyError::LinkEqualsTarget { .. } => Role::Link,
        }
    }
}

/// A topology that passed [`validate_topology`] against some schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidTopology {
    spec: TopologySpec,
    kind: NetworkKind,
}

impl ValidTopology {
    pub fn spec(&self) -> &TopologySpec {
        &self.spec
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }
}

/// Checks every facet reference; reports all violations at once.
pub fn validate_topology(
    spec: &TopologySpec,
    schema: &FacetSchema,
) -> Result<ValidTopology, Vec<TopologyError>> {
    let mut errors = Vec::new();
    let mut require = |role: Role, facet: &str| {
        if !schema.is_known(facet) {
            errors.push(TopologyError::UnknownFacet {
                role,
                facet: facet.to_string(),
            });
        }
    };
    require(Role::Source, &spec.source);
    if spec.target != spec.source {
        require(Role::Target, &spec.target);
    }
    require(Role::Link, &spec.link);
    if let Some(thematic) = &spec.thematic {
        require(Role::Thematic, thematic);
    }
    if spec.link == spec.source {
        errors.push(TopologyError::LinkEqualsSource { facet: spec.link.clone() });
    }
    if spec.link == spec.target && spec.target != spec.source {
        errors.push(TopologyError::LinkEqualsTarget { facet: spec.link.clone() });
    }

    if errors.is_empty() {
        Ok(ValidTopology {
            spec: spec.clone(),
            kind: spec.kind(),
        })
    } else {
        Err(errors)
    }
}
