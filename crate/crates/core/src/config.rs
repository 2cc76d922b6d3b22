//! TOML run configuration.
//!
//! ```toml
//! generic_tags = ["yes", "roof", "building"]
//!
//! [tag_label_map]
//! parking = "commercial"
//! chapel = "neutral"
//!
//! [generation]
//! backend = "mock"
//! temperature = 0.7
//!
//! [classifier]
//! seeds = [0, 1, 2]
//! ```
//!
//! Every key is optional. `generic_tags` replaces the default list;
//! `tag_label_map` entries are added on top of the default map. Command-line flags
//! override whatever the file says.

use crate::classifier::{RunOptions, DEFAULT_ALPHA, DEFAULT_SEEDS, DEFAULT_TRAIN_FRACTION};
use crate::cleaner::{CleanerRules, ExpectedLabel, TagLabelMap};
use crate::gateway::{BackendKind, GenerationConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationOverrides {
    pub endpoint_url: Option<String>,
    pub model_name: Option<String>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub max_retries: Option<u32>,
    pub max_concurrency: Option<usize>,
    pub backend: Option<BackendKind>,
    pub request_budget: Option<u64>,
    pub backoff_ms: Option<u64>,
    pub timeout_secs: Option<u64>,
    pub api_key_env: Option<String>,
}

impl GenerationOverrides {
    /// Fields set in `self` win over `base`.
    pub fn apply(&self, base: GenerationConfig) -> GenerationConfig {
        GenerationConfig {
            endpoint_url: self.endpoint_url.clone().unwrap_or(base.endpoint_url),
            model_name: self.model_name.clone().unwrap_or(base.model_name),
            temperature: self.temperature.unwrap_or(base.temperature),
            max_tokens: self.max_tokens.unwrap_or(base.max_tokens),
            max_retries: self.max_retries.unwrap_or(base.max_retries),
            max_concurrency: self.max_concurrency.unwrap_or(base.max_concurrency),
            backend: self.backend.unwrap_or(base.backend),
            request_budget: self.request_budget.or(base.request_budget),
            backoff_ms: self.backoff_ms.unwrap_or(base.backoff_ms),
            timeout_secs: self.timeout_secs.unwrap_or(base.timeout_secs),
            api_key_env: self.api_key_env.clone().unwrap_or(base.api_key_env),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierOverrides {
    pub alpha: Option<f64>,
    pub train_fraction: Option<f64>,
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub generic_tags: Option<Vec<String>>,
    pub tag_label_map: BTreeMap<String, ExpectedLabel>,
    pub generation: GenerationOverrides,
    pub classifier: ClassifierOverrides,
}

impl RunConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    /// `None` yields the all-defaults config.
    pub fn load_optional(path: Option<&Path>) -> Result<Self, ConfigError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn cleaner_rules(&self) -> CleanerRules {
        let mut rules = CleanerRules::default();
        if let Some(tags) = &self.generic_tags {
            rules.generic_tags = tags.iter().map(|t| t.to_lowercase()).collect();
        }
        let mut map = TagLabelMap::default();
        for (tag, expected) in &self.tag_label_map {
            map.insert(tag, *expected);
        }
        rules.tag_label_map = map;
        rules
    }

    pub fn generation(&self) -> GenerationConfig {
        self.generation.apply(GenerationConfig::default())
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            alpha: self.classifier.alpha.unwrap_or(DEFAULT_ALPHA),
            train_fraction: self.classifier.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION),
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.classifier.seeds.clone().unwrap_or_else(|| DEFAULT_SEEDS.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_toml_str(s, Path::new("test.toml"))
    }

    #[test]
    fn empty_is_defaults() {
        let c = parse("").unwrap();
        assert_eq!(c.cleaner_rules(), CleanerRules::default());
        assert_eq!(c.generation(), GenerationConfig::default());
        assert_eq!(c.run_options(), RunOptions::default());
        assert_eq!(c.seeds(), DEFAULT_SEEDS.to_vec());
        assert_eq!(RunConfig::load_optional(None).unwrap(), c);
    }

    #[test]
    fn overrides() {
        let c = parse(
            r#"
generic_tags = ["Building"]

[tag_label_map]
parking = "commercial"
Chapel = "neutral"
"place_of_worship" = "neutral-conflict"

[generation]
backend = "mock"
temperature = 0.2
request_budget = 50

[classifier]
seeds = [7]
alpha = 0.5
"#,
        )
        .unwrap();
        let rules = c.cleaner_rules();
        assert!(rules.is_generic_tag("building"));
        assert!(!rules.is_generic_tag("yes"));
        assert_eq!(rules.tag_label_map.lookup("Parking"), ExpectedLabel::Commercial);
        assert_eq!(rules.tag_label_map.lookup("chapel"), ExpectedLabel::Neutral);
        assert_eq!(rules.tag_label_map.lookup("place of worship"), ExpectedLabel::Conflict);
        assert_eq!(rules.tag_label_map.lookup("retail"), ExpectedLabel::Commercial);
        let g = c.generation();
        assert_eq!(g.backend, BackendKind::Mock);
        assert_eq!(g.temperature, 0.2);
        assert_eq!(g.request_budget, Some(50));
        assert_eq!(g.max_tokens, GenerationConfig::default().max_tokens);
        assert_eq!(c.seeds(), vec![7]);
        assert_eq!(c.run_options().alpha, 0.5);
        assert_eq!(c.run_options().train_fraction, DEFAULT_TRAIN_FRACTION);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_files() {
        assert!(matches!(
            parse("[generation]\ntemprature = 1.0"),
            Err(ConfigError::Parse { .. })
        ));
        assert!(matches!(
            parse("[tag_label_map]\nshop = \"industrial\""),
            Err(ConfigError::Parse { .. })
        ));
        assert!(matches!(
            RunConfig::load("/nonexistent/run.toml"),
            Err(ConfigError::Io { .. })
        ));
    }
}
