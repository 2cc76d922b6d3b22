//! Metadata cleaning applied before prompting.
//!
//! Rejections are checked in a fixed order and the first failing rule is reported:
//! `malformed`, `generic_tag`, `multi_tag`, `label_tag_conflict`. Name and tag
//! sanitization and the five-language cap are transformations on kept records.

use crate::corpus::{BuildingRecord, CorpusError, Label, MAX_TWEETS_PER_BUILDING};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CleanError {
    #[error("building has no tweet languages to generate")]
    NoLanguages,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionRule {
    GenericTag,
    MultiTag,
    LabelTagConflict,
    Malformed,
}

impl RejectionRule {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectionRule::GenericTag => "generic_tag",
            RejectionRule::MultiTag => "multi_tag",
            RejectionRule::LabelTagConflict => "label_tag_conflict",
            RejectionRule::Malformed => "malformed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub building_id: String,
    pub rule: RejectionRule,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub entries: Vec<Rejection>,
}

impl RejectionReport {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, rule: RejectionRule) -> usize {
        self.entries.iter().filter(|e| e.rule == rule).count()
    }

    /// Writes one JSON object per rejection.
    pub fn write_jsonl(&self, path: &Path) -> Result<(), CorpusError> {
        crate::corpus::write_jsonl(path, &self.entries)
    }
}

/// What a tag implies about a building's label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedLabel {
    Commercial,
    Residential,
    /// Says nothing about the label.
    Neutral,
    /// Fits neither class (religious buildings); conflicts with any label.
    #[serde(alias = "neutral-conflict", alias = "neutral_conflict")]
    Conflict,
}

impl ExpectedLabel {
    fn agrees_with(self, label: Label) -> bool {
        match self {
            ExpectedLabel::Neutral => true,
            ExpectedLabel::Conflict => false,
            ExpectedLabel::Commercial => label == Label::Commercial,
            ExpectedLabel::Residential => label == Label::Residential,
        }
    }
}

const DEFAULT_TAG_LABELS: &[(&str, ExpectedLabel)] = &[
    ("retail", ExpectedLabel::Commercial),
    ("commercial", ExpectedLabel::Commercial),
    ("restaurant", ExpectedLabel::Commercial),
    ("supermarket", ExpectedLabel::Commercial),
    ("shop", ExpectedLabel::Commercial),
    ("kiosk", ExpectedLabel::Commercial),
    ("office", ExpectedLabel::Commercial),
    ("hotel", ExpectedLabel::Commercial),
    ("cafe", ExpectedLabel::Commercial),
    ("residential", ExpectedLabel::Residential),
    ("apartment", ExpectedLabel::Residential),
    ("apartments", ExpectedLabel::Residential),
    ("house", ExpectedLabel::Residential),
    ("detached", ExpectedLabel::Residential),
    ("semidetached house", ExpectedLabel::Residential),
    ("terrace", ExpectedLabel::Residential),
    ("bungalow", ExpectedLabel::Residential),
    ("dormitory", ExpectedLabel::Residential),
    ("mosque", ExpectedLabel::Conflict),
    ("church", ExpectedLabel::Conflict),
    ("temple", ExpectedLabel::Conflict),
    ("synagogue", ExpectedLabel::Conflict),
    ("chapel", ExpectedLabel::Conflict),
    ("cathedral", ExpectedLabel::Conflict),
    ("shrine", ExpectedLabel::Conflict),
];

pub const DEFAULT_GENERIC_TAGS: &[&str] = &["yes", "roof"];

fn tag_key(tag: &str) -> String {
    sanitize_text(tag).to_lowercase()
}

/// Lowercase tag to expected label. Lookup is total: unmapped tags are neutral.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagLabelMap {
    entries: BTreeMap<String, ExpectedLabel>,
}

impl Default for TagLabelMap {
    fn default() -> Self {
        TagLabelMap {
            entries: DEFAULT_TAG_LABELS.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

impl TagLabelMap {
    pub fn empty() -> Self {
        TagLabelMap {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, tag: &str, expected: ExpectedLabel) {
        self.entries.insert(tag_key(tag), expected);
    }

    pub fn lookup(&self, tag: &str) -> ExpectedLabel {
        self.entries
            .get(&tag_key(tag))
            .copied()
            .unwrap_or(ExpectedLabel::Neutral)
    }

    pub fn entries(&self) -> &BTreeMap<String, ExpectedLabel> {
        &self.entries
    }
}

/// The configurable parts of cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CleanerRules {
    pub generic_tags: BTreeSet<String>,
    pub tag_label_map: TagLabelMap,
}

impl Default for CleanerRules {
    fn default() -> Self {
        CleanerRules {
            generic_tags: DEFAULT_GENERIC_TAGS.iter().map(|s| s.to_string()).collect(),
            tag_label_map: TagLabelMap::default(),
        }
    }
}

impl CleanerRules {
    pub fn is_generic_tag(&self, tag: &str) -> bool {
        self.generic_tags.contains(&tag.to_lowercase())
    }
}

/// All tags known for each building, for the single-tag rule. Buildings missing
/// from the index count as single-tag.
pub type MultiTagIndex = HashMap<String, BTreeSet<String>>;

#[derive(Deserialize)]
struct MultiTagLine {
    building_id: String,
    tags: Vec<String>,
}

/// Reads `{"building_id": ..., "tags": [...]}` lines.
pub fn load_multi_tag_index(path: impl AsRef<Path>) -> Result<MultiTagIndex, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut index = MultiTagIndex::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: MultiTagLine = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        index.entry(entry.building_id).or_default().extend(entry.tags);
    }
    Ok(index)
}

/// Replaces underscores and slashes with spaces, collapses whitespace runs and trims.
pub fn sanitize_text(s: &str) -> String {
    s.replace(['_', '/'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// True iff the lowercased tag is one of the default generic tags (`yes`, `roof`).
pub fn is_generic_tag(tag: &str) -> bool {
    let tag = tag.to_lowercase();
    DEFAULT_GENERIC_TAGS.contains(&tag.as_str())
}

/// False iff the tag maps to a non-neutral expectation that differs from the label.
pub fn check_label_consistency(record: &BuildingRecord, map: &TagLabelMap) -> bool {
    map.lookup(&record.tag).agrees_with(record.label)
}

/// Keeps the first five languages, in order.
pub fn cap_languages(langs: &[String]) -> Result<Vec<String>, CleanError> {
    if langs.is_empty() {
        return Err(CleanError::NoLanguages);
    }
    Ok(langs.iter().take(MAX_TWEETS_PER_BUILDING).cloned().collect())
}

fn distinct_tags(tags: &BTreeSet<String>) -> BTreeSet<String> {
    tags.iter().map(|t| tag_key(t)).filter(|t| !t.is_empty()).collect()
}

fn check(
    record: &BuildingRecord,
    rules: &CleanerRules,
    index: &MultiTagIndex,
) -> Result<BuildingRecord, (RejectionRule, String)> {
    let malformed = |detail: &str| (RejectionRule::Malformed, detail.to_string());
    let tag = sanitize_text(&record.tag);
    let name = sanitize_text(&record.name);
    if record.building_id.trim().is_empty() {
        return Err(malformed("empty building_id"));
    }
    if tag.is_empty() {
        return Err(malformed("empty tag after sanitization"));
    }
    if name.is_empty() {
        return Err(malformed("empty name after sanitization"));
    }
    if record.tweet_languages.iter().any(|l| l.trim().is_empty()) {
        return Err(malformed("blank entry in tweet_languages"));
    }
    let languages = cap_languages(&record.tweet_languages).map_err(|_| malformed("empty tweet_languages"))?;

    if rules.is_generic_tag(&tag) {
        return Err((RejectionRule::GenericTag, format!("generic tag {tag:?}")));
    }
    if let Some(tags) = index.get(&record.building_id) {
        let distinct = distinct_tags(tags);
        if distinct.len() > 1 {
            let list: Vec<&str> = distinct.iter().map(String::as_str).collect();
            return Err((RejectionRule::MultiTag, format!("tags {list:?}")));
        }
    }
    let cleaned = BuildingRecord {
        tag,
        name,
        tweet_languages: languages,
        ..record.clone()
    };
    if !check_label_consistency(&cleaned, &rules.tag_label_map) {
        return Err((
            RejectionRule::LabelTagConflict,
            format!(
                "tag {:?} expects {:?}, label is {}",
                cleaned.tag,
                rules.tag_label_map.lookup(&cleaned.tag),
                cleaned.label
            ),
        ));
    }
    Ok(cleaned)
}

/// Partitions `buildings` into kept (sanitized, capped) records and rejections.
/// Output order follows input order on both sides.
pub fn clean(
    buildings: &[BuildingRecord],
    rules: &CleanerRules,
    multi_tag_index: &MultiTagIndex,
) -> (Vec<BuildingRecord>, RejectionReport) {
    let mut kept = Vec::new();
    let mut report = RejectionReport::default();
    for record in buildings {
        match check(record, rules, multi_tag_index) {
            Ok(cleaned) => kept.push(cleaned),
            Err((rule, detail)) => report.entries.push(Rejection {
                building_id: record.building_id.clone(),
                rule,
                detail,
            }),
        }
    }
    (kept, report)
}
