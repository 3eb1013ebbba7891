//! Manifest (JSON), battery (TOML) and valence-norm (CSV) files.

use std::fs;
use std::path::Path;

use ieat_core::{validate_battery, StimulusManifest, TestSpec, ValenceNormRow};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn parse_manifest(text: &str, origin: &Path) -> Result<StimulusManifest> {
    let manifest: StimulusManifest = serde_json::from_str(text).map_err(|e| {
        Error::malformed(origin, format!("line {} column {}", e.line(), e.column()), e)
    })?;
    manifest.validate().map_err(|e| Error::invalid(origin, e))?;
    Ok(manifest)
}

pub fn load_manifest(path: &Path) -> Result<StimulusManifest> {
    parse_manifest(&read_text(path)?, path)
}

pub fn write_manifest(path: &Path, manifest: &StimulusManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A named list of test specs.
///
/// ```toml
/// name = "replication"
/// model = "iGPT"
///
/// [[tests]]
/// name = "Insect-Flower"
/// x_category = "Flower"
/// y_category = "Insect"
/// a_category = "Pleasant"
/// b_category = "Unpleasant"
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battery {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Label of the embedding model the battery was written for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub tests: Vec<TestSpec>,
}

pub fn parse_battery(text: &str, origin: &Path) -> Result<Battery> {
    let battery: Battery = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => format!("line {}", text[..span.start].lines().count().max(1)),
            None => "document".to_string(),
        };
        Error::malformed(origin, location, e.message())
    })?;
    validate_battery(&battery.tests).map_err(|e| Error::invalid(origin, e))?;
    Ok(battery)
}

pub fn load_battery(path: &Path) -> Result<Battery> {
    parse_battery(&read_text(path)?, path)
}

/// Reads a `word,valence,imagery` table.
pub fn parse_norms(text: &str, origin: &Path) -> Result<Vec<ValenceNormRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::malformed(origin, "header", e))?;
    if header.iter().collect::<Vec<_>>() != ["word", "valence", "imagery"] {
        return Err(Error::malformed(
            origin,
            "header",
            "expected columns `word,valence,imagery`",
        ));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::malformed(origin, format!("line {}", i + 2), e)))
        .collect()
}

pub fn load_norms(path: &Path) -> Result<Vec<ValenceNormRow>> {
    parse_norms(&read_text(path)?, path)
}
