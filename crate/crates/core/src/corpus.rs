//! Building and tweet records, their JSONL on-disk form, and the joined [`Corpus`].
//!
//! Both files are UTF-8, one JSON object per line, `\n` terminated. Blank lines are
//! skipped on load. Fields not known to the record types are kept in `extra` and
//! written back on save.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const BUILDINGS_FILE: &str = "buildings.jsonl";
pub const TWEETS_FILE: &str = "tweets.jsonl";
pub const PROVENANCE_FILE: &str = "provenance.txt";

/// Upper bound on tweets per building once languages are capped.
pub const MAX_TWEETS_PER_BUILDING: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("{path}:{line}: unknown label {value:?} (expected \"commercial\" or \"residential\")")]
    UnknownLabel { path: PathBuf, line: usize, value: String },
    #[error("{path}:{line}: tweet text is empty")]
    EmptyText { path: PathBuf, line: usize },
    #[error("duplicate building_id {0:?}")]
    DuplicateId(String),
    #[error("empty building_id")]
    EmptyId,
    #[error("tweets reference unknown buildings: {}", .0.join(", "))]
    DanglingTweets(Vec<String>),
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Binary building function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Commercial,
    Residential,
}

impl Label {
    /// Both labels, in tie-break order.
    pub const ALL: [Label; 2] = [Label::Commercial, Label::Residential];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Commercial => "commercial",
            Label::Residential => "residential",
        }
    }

    pub fn toggled(self) -> Label {
        match self {
            Label::Commercial => Label::Residential,
            Label::Residential => Label::Commercial,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commercial" => Ok(Label::Commercial),
            "residential" => Ok(Label::Residential),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Real,
    Synthetic,
}

/// One building's metadata.
///
/// The spaced and underscored key spellings used in metadata dumps
/// (`"Building tag"`, `"Building_tag"`, `"Tweets distribution"`, ...) are accepted
/// on load and normalized to the snake_case names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingRecord {
    pub building_id: String,
    #[serde(alias = "Building city", alias = "Building_city")]
    pub city: String,
    #[serde(alias = "Building tag", alias = "Building_tag")]
    pub tag: String,
    #[serde(alias = "Building name", alias = "Building_name")]
    pub name: String,
    pub label: Label,
    #[serde(
        alias = "Tweets distribution",
        alias = "Tweets_distribution",
        alias = "Tweets_language_distribution"
    )]
    pub tweet_languages: Vec<String>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl BuildingRecord {
    pub fn new(
        building_id: impl Into<String>,
        city: impl Into<String>,
        tag: impl Into<String>,
        name: impl Into<String>,
        label: Label,
        tweet_languages: Vec<String>,
    ) -> Self {
        BuildingRecord {
            building_id: building_id.into(),
            city: city.into(),
            tag: tag.into(),
            name: name.into(),
            label,
            tweet_languages,
            extra: Map::new(),
        }
    }
}

/// One tweet attached to a building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub building_id: String,
    pub text: String,
    pub language: String,
    pub source: Source,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl TweetRecord {
    pub fn new(
        building_id: impl Into<String>,
        text: impl Into<String>,
        language: impl Into<String>,
        source: Source,
    ) -> Self {
        TweetRecord {
            building_id: building_id.into(),
            text: text.into(),
            language: language.into(),
            source,
            extra: Map::new(),
        }
    }
}

/// Buildings joined with their tweets. Every tweet resolves to a building.
///
/// Immutable once built; the noise and generation modules construct new values
/// rather than editing in place.
#[derive(Debug, Clone)]
pub struct Corpus {
    buildings: Vec<BuildingRecord>,
    tweets: Vec<TweetRecord>,
    provenance: String,
    index: HashMap<String, usize>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.buildings == other.buildings && self.tweets == other.tweets && self.provenance == other.provenance
    }
}

/// A corpus invariant that does not hold for a completed generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub building_id: String,
    pub problem: String,
}

impl Corpus {
    pub fn buildings(&self) -> &[BuildingRecord] {
        &self.buildings
    }

    pub fn tweets(&self) -> &[TweetRecord] {
        &self.tweets
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn building(&self, building_id: &str) -> Option<&BuildingRecord> {
        self.index.get(building_id).map(|&i| &self.buildings[i])
    }

    pub fn label_of(&self, building_id: &str) -> Option<Label> {
        self.building(building_id).map(|b| b.label)
    }

    pub fn building_ids(&self) -> impl Iterator<Item = &str> {
        self.buildings.iter().map(|b| b.building_id.as_str())
    }

    /// Tweets of the given buildings paired with their owning building's label,
    /// in corpus tweet order.
    pub fn labeled_texts<'a>(&'a self, ids: &HashSet<&str>) -> Vec<(&'a str, Label)> {
        self.tweets
            .iter()
            .filter(|t| ids.contains(t.building_id.as_str()))
            .map(|t| {
                let label = self.index[&t.building_id];
                (t.text.as_str(), self.buildings[label].label)
            })
            .collect()
    }

    /// Rebuilds a corpus from parts that are known to satisfy referential integrity.
    pub(crate) fn from_parts_unchecked(
        buildings: Vec<BuildingRecord>,
        tweets: Vec<TweetRecord>,
        provenance: String,
    ) -> Self {
        let index = buildings
            .iter()
            .enumerate()
            .map(|(i, b)| (b.building_id.clone(), i))
            .collect();
        Corpus {
            buildings,
            tweets,
            provenance,
            index,
        }
    }

    /// Checks the invariants of a completed generation: at most five tweets per
    /// building, and tweet languages equal to the building's language list as a
    /// multiset.
    pub fn completed_violations(&self) -> Vec<Violation> {
        let mut langs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for t in &self.tweets {
            langs
                .entry(t.building_id.as_str())
                .or_default()
                .push(t.language.as_str());
        }
        let mut out = Vec::new();
        for b in &self.buildings {
            let mut got = langs.remove(b.building_id.as_str()).unwrap_or_default();
            if got.len() > MAX_TWEETS_PER_BUILDING {
                out.push(Violation {
                    building_id: b.building_id.clone(),
                    problem: format!("{} tweets (max {MAX_TWEETS_PER_BUILDING})", got.len()),
                });
            }
            let mut want: Vec<&str> = b.tweet_languages.iter().map(String::as_str).collect();
            got.sort_unstable();
            want.sort_unstable();
            if got != want {
                out.push(Violation {
                    building_id: b.building_id.clone(),
                    problem: format!("tweet languages {got:?} do not match distribution {want:?}"),
                });
            }
        }
        out
    }
}

fn jsonl_lines(path: &Path) -> Result<Vec<(usize, String)>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn parse_object(path: &Path, line_no: usize, line: &str) -> Result<Map<String, Value>, CorpusError> {
    let malformed = |reason: String| CorpusError::Malformed {
        path: path.to_path_buf(),
        line: line_no,
        reason,
    };
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(malformed("record must be a JSON object".into())),
        Err(e) => Err(malformed(e.to_string())),
    }
}

/// Parses one building line. `line_no` is only used for error reporting.
pub fn parse_building(path: &Path, line_no: usize, line: &str) -> Result<BuildingRecord, CorpusError> {
    let object = parse_object(path, line_no, line)?;
    if let Some(value) = object.get("label") {
        let known = value.as_str().map(|s| s.parse::<Label>().is_ok()).unwrap_or(false);
        if !known {
            return Err(CorpusError::UnknownLabel {
                path: path.to_path_buf(),
                line: line_no,
                value: match value {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                },
            });
        }
    }
    let record: BuildingRecord = serde_json::from_value(Value::Object(object)).map_err(|e| CorpusError::Malformed {
        path: path.to_path_buf(),
        line: line_no,
        reason: e.to_string(),
    })?;
    if record.building_id.is_empty() {
        return Err(CorpusError::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            reason: "building_id is empty".into(),
        });
    }
    Ok(record)
}

/// Loads `buildings.jsonl`-style records. Duplicate ids are an error.
pub fn load_buildings(path: impl AsRef<Path>) -> Result<Vec<BuildingRecord>, CorpusError> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line_no, line) in jsonl_lines(path)? {
        let record = parse_building(path, line_no, &line)?;
        if !seen.insert(record.building_id.clone()) {
            return Err(CorpusError::DuplicateId(record.building_id));
        }
        out.push(record);
    }
    Ok(out)
}

/// Loads `tweets.jsonl`-style records in file order.
pub fn load_tweets(path: impl AsRef<Path>) -> Result<Vec<TweetRecord>, CorpusError> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for (line_no, line) in jsonl_lines(path)? {
        let object = parse_object(path, line_no, &line)?;
        let record: TweetRecord =
            serde_json::from_value(Value::Object(object)).map_err(|e| CorpusError::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                reason: e.to_string(),
            })?;
        if record.text.trim().is_empty() {
            return Err(CorpusError::EmptyText {
                path: path.to_path_buf(),
                line: line_no,
            });
        }
        out.push(record);
    }
    Ok(out)
}

/// Joins buildings and tweets, rejecting duplicate building ids and collecting
/// every dangling tweet reference before failing.
pub fn join_corpus(buildings: Vec<BuildingRecord>, tweets: Vec<TweetRecord>) -> Result<Corpus, CorpusError> {
    let mut ids = HashSet::with_capacity(buildings.len());
    for b in &buildings {
        if b.building_id.is_empty() {
            return Err(CorpusError::EmptyId);
        }
        if !ids.insert(b.building_id.as_str()) {
            return Err(CorpusError::DuplicateId(b.building_id.clone()));
        }
    }
    let mut dangling: Vec<String> = Vec::new();
    for t in &tweets {
        if !ids.contains(t.building_id.as_str()) && !dangling.contains(&t.building_id) {
            dangling.push(t.building_id.clone());
        }
    }
    if !dangling.is_empty() {
        return Err(CorpusError::DanglingTweets(dangling));
    }
    Ok(Corpus::from_parts_unchecked(buildings, tweets, String::new()))
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize to JSON");
        w.write_all(line.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| CorpusError::io(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

/// Writes `buildings.jsonl`, `tweets.jsonl` and `provenance.txt` into `dir`.
pub fn save_corpus(corpus: &Corpus, dir: impl AsRef<Path>) -> Result<(), CorpusError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| CorpusError::io(dir, e))?;
    write_jsonl(&dir.join(BUILDINGS_FILE), corpus.buildings())?;
    write_jsonl(&dir.join(TWEETS_FILE), corpus.tweets())?;
    let prov = dir.join(PROVENANCE_FILE);
    fs::write(&prov, corpus.provenance()).map_err(|e| CorpusError::io(&prov, e))
}

/// Inverse of [`save_corpus`]. A missing tweets or provenance file reads as empty.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let dir = dir.as_ref();
    let buildings = load_buildings(dir.join(BUILDINGS_FILE))?;
    let tweets_path = dir.join(TWEETS_FILE);
    let tweets = if tweets_path.exists() {
        load_tweets(&tweets_path)?
    } else {
        Vec::new()
    };
    let prov = dir.join(PROVENANCE_FILE);
    let provenance = match fs::read_to_string(&prov) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(CorpusError::io(&prov, e)),
    };
    Ok(join_corpus(buildings, tweets)?.with_provenance(provenance))
}
