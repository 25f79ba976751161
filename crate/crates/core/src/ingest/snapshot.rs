//! Versioned single-file catalog snapshots.
//!
//! Layout:
//!
//! ```text
//! FACETNET-SNAPSHOT 1\n
//! sha256=<64 hex digits> bytes=<body length>\n
//! <compact JSON body>
//! ```
//!
//! The body is serialized from ordered maps with records sorted by id, so
//! saving the same snapshot twice produces identical bytes.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::record::DatasetRecord;
use super::tag::FacetSchema;

pub const SNAPSHOT_MAGIC: &str = "FACETNET-SNAPSHOT";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("cannot save an empty catalog")]
    Empty,
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not a snapshot file (missing {SNAPSHOT_MAGIC} header)")]
    NotASnapshot { path: String },
    #[error("{path}: snapshot format version {found}, this build reads version {SNAPSHOT_VERSION}")]
    VersionMismatch { path: String, found: String },
    #[error("{path}: corrupt snapshot: {reason}")]
    Corrupt { path: String, reason: String },
}

/// An immutable, id-sorted set of records with the schema they were parsed under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSnapshot {
    source_label: String,
    built_at: DateTime<Utc>,
    schema: FacetSchema,
    records: Vec<DatasetRecord>,
}

impl CatalogSnapshot {
    /// Sorts records by id, rejects duplicate ids and registers every facet
    /// the records use in the schema.
    pub fn new(
        mut records: Vec<DatasetRecord>,
        mut schema: FacetSchema,
        source_label: impl Into<String>,
        built_at: DateTime<Utc>,
    ) -> Result<Self, SnapshotError> {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = records.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(SnapshotError::DuplicateId(w[0].id.clone()));
        }
        let used: BTreeSet<&str> = records
            .iter()
            .flat_map(|r| r.facets.keys().map(String::as_str))
            .collect();
        for facet in used {
            schema.register(facet);
        }
        Ok(Self {
            source_label: source_label.into(),
            built_at,
            schema,
            records,
        })
    }

    pub fn records(&self) -> &[DatasetRecord] {
        &self.records
    }

    pub fn schema(&self) -> &FacetSchema {
        &self.schema
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn built_at(&self) -> DateTime<Utc> {
        self.built_at
    }

    pub fn into_parts(self) -> (Vec<DatasetRecord>, FacetSchema) {
        (self.records, self.schema)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body = serde_json::to_vec(self).expect("snapshot serialization is infallible");
        let digest = hex::encode(Sha256::digest(&body));
        let mut out = Vec::with_capacity(body.len() + 128);
        writeln!(out, "{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}").unwrap();
        writeln!(out, "sha256={digest} bytes={}", body.len()).unwrap();
        out.extend_from_slice(&body);
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &str) -> Result<Self, SnapshotError> {
        let corrupt = |reason: String| SnapshotError::Corrupt {
            path: path.to_string(),
            reason,
        };
        let (magic_line, rest) = split_line(bytes).ok_or_else(|| SnapshotError::NotASnapshot {
            path: path.to_string(),
        })?;
        let magic_line = std::str::from_utf8(magic_line).map_err(|_| SnapshotError::NotASnapshot {
            path: path.to_string(),
        })?;
        let version = magic_line
            .strip_prefix(SNAPSHOT_MAGIC)
            .and_then(|v| v.strip_prefix(' '))
            .ok_or_else(|| SnapshotError::NotASnapshot {
                path: path.to_string(),
            })?;
        if version != SNAPSHOT_VERSION.to_string() {
            return Err(SnapshotError::VersionMismatch {
                path: path.to_string(),
                found: version.to_string(),
            });
        }

        let (check_line, body) =
            split_line(rest).ok_or_else(|| corrupt("missing checksum line".into()))?;
        let check_line =
            std::str::from_utf8(check_line).map_err(|_| corrupt("unreadable checksum line".into()))?;
        let (digest, length) = parse_check_line(check_line)
            .ok_or_else(|| corrupt(format!("malformed checksum line {check_line:?}")))?;
        if body.len() != length {
            return Err(corrupt(format!(
                "body is {} bytes, header declares {length} (truncated?)",
                body.len()
            )));
        }
        if hex::encode(Sha256::digest(body)) != digest {
            return Err(corrupt("checksum mismatch".into()));
        }
        let snapshot: CatalogSnapshot =
            serde_json::from_slice(body).map_err(|e| corrupt(e.to_string()))?;
        snapshot.validate().map_err(corrupt)?;
        Ok(snapshot)
    }

    fn validate(&self) -> Result<(), String> {
        if let Some(w) = self.records.windows(2).find(|w| w[0].id >= w[1].id) {
            return Err(format!("records out of order at {:?}", w[1].id));
        }
        for r in &self.records {
            if let Some((f, _)) = r.facets.iter().find(|(_, vs)| vs.is_empty()) {
                return Err(format!("record {:?} has empty facet {f:?}", r.id));
            }
        }
        Ok(())
    }
}

fn split_line(bytes: &[u8]) -> Option<(&[u8], &[u8])> {
    let nl = bytes.iter().position(|&b| b == b'\n')?;
    Some((&bytes[..nl], &bytes[nl + 1..]))
}

fn parse_check_line(line: &str) -> Option<(&str, usize)> {
    let (digest, length) = line.split_once(' ')?;
    let digest = digest.strip_prefix("sha256=")?;
    let length = length.strip_prefix("bytes=")?.parse().ok()?;
    (digest.len() == 64).then_some((digest, length))
}

/// Writes a snapshot of `records` to `path`.
pub fn save_snapshot(
    records: Vec<DatasetRecord>,
    schema: FacetSchema,
    source_label: &str,
    built_at: DateTime<Utc>,
    path: impl AsRef<Path>,
) -> Result<CatalogSnapshot, SnapshotError> {
    if records.is_empty() {
        return Err(SnapshotError::Empty);
    }
    let snapshot = CatalogSnapshot::new(records, schema, source_label, built_at)?;
    write_snapshot(&snapshot, path)?;
    Ok(snapshot)
}

pub fn write_snapshot(snapshot: &CatalogSnapshot, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
    let path = path.as_ref();
    if snapshot.records.is_empty() {
        return Err(SnapshotError::Empty);
    }
    std::fs::write(path, snapshot.to_bytes()).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<CatalogSnapshot, SnapshotError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })?;
    CatalogSnapshot::from_bytes(&bytes, &path.display().to_string())
}
