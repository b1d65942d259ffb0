//! Declarative raw-category to unified-code maps.
//!
//! A mapping document is a JSON list of maps:
//!
//! ```json
//! [ { "feature": "CollisionManner", "default": 99,
//!     "codebook": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 99],
//!     "entries": { "Rear End": 2, "NULL": 99 } } ]
//! ```
//!
//! `codebook` is optional. Raw strings are compared after
//! [`normalize_category`], so two keys that normalize alike are duplicates.
//! Empty cells, missing columns and the literal `NULL` are null; a map that
//! lists a `NULL` entry maps them silently, otherwise they fall back to the
//! default code and are audited like any other unmapped value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use super::DataError;

/// One crash-report row: column name to raw text.
pub type RawRecord = BTreeMap<String, String>;

/// A unified column value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Code(i64),
    Raw(String),
}

pub type UnifiedRecord = BTreeMap<String, Cell>;

const NULL_KEY: &str = "null";

/// Trims, strips one layer of surrounding quotes, collapses inner
/// whitespace and lowercases.
pub fn normalize_category(raw: &str) -> String {
    let mut s = raw.trim();
    for (open, close) in [('\'', '\''), ('`', '\''), ('`', '`'), ('"', '"'), ('\u{2018}', '\u{2019}')] {
        if s.len() >= 2 && s.starts_with(open) && s.ends_with(close) {
            s = s[open.len_utf8()..s.len() - close.len_utf8()].trim();
            break;
        }
    }
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn is_null(raw: Option<&String>) -> bool {
    match raw {
        None => true,
        Some(v) => {
            let v = v.trim();
            v.is_empty() || v.eq_ignore_ascii_case("null")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnificationMap {
    pub feature_name: String,
    pub default_code: i64,
    pub codebook: Option<BTreeSet<i64>>,
    entries: BTreeMap<String, i64>,
}

impl UnificationMap {
    pub fn new(
        feature_name: impl Into<String>,
        default_code: i64,
        codebook: Option<BTreeSet<i64>>,
        entries: impl IntoIterator<Item = (String, i64)>,
    ) -> Result<Self, DataError> {
        let feature_name = feature_name.into();
        let in_book = |code: i64| codebook.as_ref().is_none_or(|b| b.contains(&code));
        if !in_book(default_code) {
            return Err(DataError::Mapping(format!(
                "{feature_name}: default code {default_code} is outside the codebook"
            )));
        }
        let mut map = BTreeMap::new();
        for (raw, code) in entries {
            if !in_book(code) {
                return Err(DataError::Mapping(format!(
                    "{feature_name}: code {code} for `{raw}` is outside the codebook"
                )));
            }
            if map.insert(normalize_category(&raw), code).is_some() {
                return Err(DataError::Mapping(format!(
                    "{feature_name}: duplicate raw value `{raw}`"
                )));
            }
        }
        Ok(UnificationMap {
            feature_name,
            default_code,
            codebook,
            entries: map,
        })
    }

    /// Code for a raw cell, or `None` when it is unmapped.
    pub fn lookup(&self, raw: Option<&String>) -> Option<i64> {
        if is_null(raw) {
            return self.entries.get(NULL_KEY).copied();
        }
        self.entries.get(&normalize_category(raw?)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    feature: String,
    default: i64,
    #[serde(default)]
    codebook: Option<Vec<i64>>,
    #[serde(deserialize_with = "entries_keep_duplicates")]
    entries: Vec<(String, i64)>,
}

// serde_json keeps the last of two equal keys when filling a map, which
// would hide duplicates; collect the raw pairs instead.
fn entries_keep_duplicates<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(String, i64)>, D::Error> {
    struct PairVisitor;
    impl<'de> Visitor<'de> for PairVisitor {
        type Value = Vec<(String, i64)>;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object of raw value to integer code")
        }
        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out = Vec::new();
            while let Some(pair) = access.next_entry()? {
                out.push(pair);
            }
            Ok(out)
        }
    }
    d.deserialize_map(PairVisitor)
}

/// Parses and validates a mapping document.
pub fn load_unification_maps(text: &str) -> Result<Vec<UnificationMap>, DataError> {
    let docs: Vec<MapDoc> =
        serde_json::from_str(text).map_err(|e| DataError::Mapping(e.to_string()))?;
    let mut seen = BTreeSet::new();
    docs.into_iter()
        .map(|doc| {
            if !seen.insert(doc.feature.clone()) {
                return Err(DataError::Mapping(format!("feature `{}` mapped twice", doc.feature)));
            }
            UnificationMap::new(
                doc.feature,
                doc.default,
                doc.codebook.map(|c| c.into_iter().collect()),
                doc.entries,
            )
        })
        .collect()
}

/// Collision-manner map for Maryland crash reports.
pub fn bundled_maryland_collision() -> Vec<UnificationMap> {
    load_unification_maps(include_str!("mappings/maryland_collision.json")).expect("bundled map")
}

/// Collision-manner map for Arizona crash reports.
pub fn bundled_arizona_collision() -> Vec<UnificationMap> {
    load_unification_maps(include_str!("mappings/arizona_collision.json")).expect("bundled map")
}

/// A raw value that fell back to its map's default code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEntry {
    pub file: String,
    pub row: usize,
    pub column: String,
    pub raw_value: String,
}

impl fmt::Display for AuditEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.file, self.row, self.column, self.raw_value)
    }
}

/// Output of [`unify_record`]: the unified row plus `(column, raw)` pairs
/// that were not in their map.
#[derive(Debug, Clone, PartialEq)]
pub struct Unification {
    pub record: UnifiedRecord,
    pub unmapped: Vec<(String, String)>,
}

/// Replaces every mapped column by its code; other columns pass through.
pub fn unify_record(record: &RawRecord, maps: &[UnificationMap]) -> Unification {
    let mut out: UnifiedRecord = record
        .iter()
        .map(|(k, v)| (k.clone(), Cell::Raw(v.clone())))
        .collect();
    let mut unmapped = Vec::new();
    for map in maps {
        let raw = record.get(&map.feature_name);
        let code = match map.lookup(raw) {
            Some(code) => code,
            None => {
                let shown = if is_null(raw) { "NULL".to_string() } else { raw.cloned().unwrap_or_default() };
                unmapped.push((map.feature_name.clone(), shown));
                map.default_code
            }
        };
        out.insert(map.feature_name.clone(), Cell::Code(code));
    }
    Unification {
        record: out,
        unmapped,
    }
}

/// Reads an RFC-4180 CSV with a header row.
pub fn read_raw_records<R: Read>(reader: R) -> Result<Vec<RawRecord>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect(),
        );
    }
    Ok(rows)
}
