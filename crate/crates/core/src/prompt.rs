//! Two-part prompts: a constant system prompt carrying the one-shot example, and a
//! per-building user prompt holding only metadata.

use crate::corpus::BuildingRecord;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Default system prompt, including the one-shot example.
pub const DEFAULT_SYSTEM_PROMPT: &str = include_str!("assets/system_prompt.txt");

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("cannot read system template {path}: {source}")]
    Template {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("user prompt is not valid metadata JSON: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub building_id: String,
    pub system: String,
    pub user: String,
}

/// The four metadata fields a user prompt carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserPromptFields {
    #[serde(rename = "Building_city")]
    pub city: String,
    #[serde(rename = "Building_tag")]
    pub tag: String,
    #[serde(rename = "Building_name")]
    pub name: String,
    #[serde(rename = "Tweets_language_distribution")]
    pub languages: Vec<String>,
}

/// Returns the template file verbatim, or the embedded default.
pub fn build_system_prompt(template_path: Option<&Path>) -> Result<String, PromptError> {
    match template_path {
        None => Ok(DEFAULT_SYSTEM_PROMPT.to_string()),
        Some(path) => std::fs::read_to_string(path).map_err(|source| PromptError::Template {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Single-line JSON with keys in the fixed order `Building_city`, `Building_tag`,
/// `Building_name`, `Tweets_language_distribution`, using `", "` and `": "`
/// separators as in the one-shot example.
pub fn build_user_prompt(record: &BuildingRecord) -> String {
    let langs: Vec<String> = record.tweet_languages.iter().map(|l| json_str(l)).collect();
    format!(
        "{{\"Building_city\": {}, \"Building_tag\": {}, \"Building_name\": {}, \"Tweets_language_distribution\": [{}]}}",
        json_str(&record.city),
        json_str(&record.tag),
        json_str(&record.name),
        langs.join(", ")
    )
}

pub fn parse_user_prompt(user: &str) -> Result<UserPromptFields, PromptError> {
    Ok(serde_json::from_str(user)?)
}

pub fn build_bundle(system: &str, record: &BuildingRecord) -> PromptBundle {
    PromptBundle {
        building_id: record.building_id.clone(),
        system: system.to_string(),
        user: build_user_prompt(record),
    }
}

pub fn build_bundles(system: &str, records: &[BuildingRecord]) -> Vec<PromptBundle> {
    records.iter().map(|r| build_bundle(system, r)).collect()
}
