use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use super::card::RawCard;
use super::IngestError;

/// Where a card came from inside a source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line of a newline-delimited document.
    Line(usize),
    /// 0-based element of an array document.
    Element(usize),
    /// 1-based page of a paginated fetch, with the element inside the page.
    Page { page: usize, element: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Element(n) => write!(f, "element {n}"),
            Location::Page { page, element } => write!(f, "page {page}, element {element}"),
        }
    }
}

/// A card that was skipped while loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardError {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for CardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub cards: Vec<RawCard>,
    pub errors: Vec<CardError>,
}

/// Reads a card file, either a JSON array or one JSON object per line.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<LoadReport, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_catalog(&text)
}

/// Parses an in-memory card document. Malformed cards are skipped and
/// reported; only an unreadable array document is fatal.
pub fn parse_catalog(text: &str) -> Result<LoadReport, IngestError> {
    let mut report = LoadReport::default();
    if text.trim_start().starts_with('[') {
        let elements: Vec<serde_json::Value> =
            serde_json::from_str(text).map_err(|e| IngestError::Malformed {
                location: format!("line {}, column {}", e.line(), e.column()),
                message: e.to_string(),
            })?;
        for (i, value) in elements.into_iter().enumerate() {
            accept(
                &mut report,
                Location::Element(i),
                serde_json::from_value(value),
            );
        }
    } else {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            accept(&mut report, Location::Line(i + 1), serde_json::from_str(line));
        }
    }
    report.cards = dedup_keep_last(std::mem::take(&mut report.cards));
    Ok(report)
}

pub(crate) fn accept(
    report: &mut LoadReport,
    location: Location,
    parsed: serde_json::Result<RawCard>,
) {
    match parsed {
        Ok(card) if card.id.is_empty() => report.errors.push(CardError {
            location,
            message: "card has an empty id".into(),
        }),
        Ok(card) => report.cards.push(card),
        Err(e) => report.errors.push(CardError {
            location,
            message: e.to_string(),
        }),
    }
}

/// Drops earlier occurrences of a repeated id; survivors keep source order.
pub(crate) fn dedup_keep_last(cards: Vec<RawCard>) -> Vec<RawCard> {
    let mut last: HashMap<&str, usize> = HashMap::with_capacity(cards.len());
    for (i, card) in cards.iter().enumerate() {
        last.insert(card.id.as_str(), i);
    }
    if last.len() == cards.len() {
        return cards;
    }
    let keep: Vec<bool> = cards
        .iter()
        .enumerate()
        .map(|(i, c)| last[c.id.as_str()] == i)
        .collect();
    cards
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}
