//! Chat-completion client for tweet generation.
//!
//! Requests use the common chat-completions wire shape: a POST with a JSON body
//! holding `model`, a two-message `messages` list (system, then user),
//! `temperature` and `max_tokens`. The first choice's `message.content` must be a
//! JSON array of strings, one per requested language.
//!
//! Backends are pluggable through [`ChatBackend`]. [`MockBackend`] answers with
//! templated tweets derived from the prompt and a seed, so whole pipelines can run
//! offline and reproducibly.

use crate::corpus::{BuildingRecord, Corpus, Source, TweetRecord};
use crate::prompt::{self, PromptBundle};
use crate::seeding::keyed_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

pub const DEFAULT_MODEL: &str = "unsloth/Llama-3.3-70B-Instruct-bnb-4bit";
pub const DEFAULT_ENDPOINT: &str = "http://localhost:8000/v1/chat/completions";
pub const DEFAULT_API_KEY_ENV: &str = "LLM_API_KEY";
pub const MAX_RETRIES_LIMIT: u32 = 10;

#[derive(Debug, thiserror::Error)]
pub enum GenerationError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("cannot write audit transcript {path}: {source}")]
    Audit {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Failure of one request attempt.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttemptError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("HTTP status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unparseable response: {0}")]
    Parse(String),
    #[error("expected {expected} tweets, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("request budget of {0} exhausted")]
    BudgetExceeded(u64),
}

impl AttemptError {
    fn is_transport(&self) -> bool {
        matches!(self, AttemptError::Transport(_) | AttemptError::Status { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Http,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub max_retries: u32,
    pub max_concurrency: usize,
    pub backend: BackendKind,
    /// Total requests allowed across a run, retries included.
    pub request_budget: Option<u64>,
    /// Base delay before retrying a transport failure; doubles per attempt.
    pub backoff_ms: u64,
    pub timeout_secs: u64,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            endpoint_url: DEFAULT_ENDPOINT.into(),
            model_name: DEFAULT_MODEL.into(),
            temperature: 0.8,
            max_tokens: 1024,
            max_retries: 3,
            max_concurrency: 4,
            backend: BackendKind::Http,
            request_budget: None,
            backoff_ms: 500,
            timeout_secs: 120,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: String| Err(GenerationError::InvalidConfig(m));
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if self.max_tokens == 0 {
            return bad("max_tokens must be positive".into());
        }
        if self.max_retries > MAX_RETRIES_LIMIT {
            return bad(format!(
                "max_retries must be <= {MAX_RETRIES_LIMIT}, got {}",
                self.max_retries
            ));
        }
        if self.max_concurrency == 0 {
            return bad("max_concurrency must be >= 1".into());
        }
        if self.backend == BackendKind::Http && self.endpoint_url.trim().is_empty() {
            return bad("endpoint_url is required for the http backend".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub fn new(bundle: &PromptBundle, cfg: &GenerationConfig) -> Self {
        ChatRequest {
            model: cfg.model_name.clone(),
            messages: vec![
                ChatMessage {
                    role: "system".into(),
                    content: bundle.system.clone(),
                },
                ChatMessage {
                    role: "user".into(),
                    content: bundle.user.clone(),
                },
            ],
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
        }
    }
}

/// Something that turns a chat request into a raw chat-completions response body.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, building_id: &str, request: &ChatRequest) -> Result<String, AttemptError>;
}

/// Blocking HTTP backend.
pub struct HttpBackend {
    url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend")
            .field("url", &self.url)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpBackend {
    pub fn new(url: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpBackend {
            url: url.into(),
            api_key,
            agent,
        }
    }

    /// Reads the key from the configured environment variable, if set.
    pub fn from_config(cfg: &GenerationConfig) -> Self {
        let key = std::env::var(&cfg.api_key_env).ok().filter(|k| !k.is_empty());
        HttpBackend::new(&cfg.endpoint_url, key, Duration::from_secs(cfg.timeout_secs))
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, _building_id: &str, request: &ChatRequest) -> Result<String, AttemptError> {
        let body = serde_json::to_string(request).expect("request serializes");
        let mut req = self.agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send(body.as_bytes())
            .map_err(|e| AttemptError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| AttemptError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            let body: String = text.chars().take(500).collect();
            return Err(AttemptError::Status { status, body });
        }
        Ok(text)
    }
}

const MOCK_TEMPLATES: &[&str] = &[
    "Spent the afternoon at {name}, easily the best {tag} in {city}.",
    "{name} never disappoints. Every {tag} should be run like this one!",
    "Quick stop at {name} today, this {tag} is always buzzing.",
    "First time at this {tag} in {city}. Any tips for {name}?",
    "Morning routine: coffee, then {name}. Love this {tag}.",
    "Honest take on {name}: solid {tag}, friendly people, would come back.",
    "The view from {name} tonight, {city} at its finest. What a {tag}.",
    "Rainy day in {city} but {name} keeps it cosy. Best {tag} around.",
];

const MOCK_PERSONAS: &[&str] = &["tourist", "local", "family", "student", "professional", "critic"];

/// Offline backend producing template tweets that embed the building name, the tag
/// and a variation index drawn from `(seed, building_id, position)`.
#[derive(Debug, Clone)]
pub struct MockBackend {
    pub seed: u64,
}

impl MockBackend {
    pub fn new(seed: u64) -> Self {
        MockBackend { seed }
    }

    pub fn tweets_for(&self, building_id: &str, fields: &prompt::UserPromptFields) -> Vec<String> {
        let tag = fields.tag.to_lowercase();
        let hashtag: String = tag.chars().filter(|c| !c.is_whitespace()).collect();
        (0..fields.languages.len())
            .map(|i| {
                let mut rng = keyed_rng(self.seed, &format!("{building_id}\u{1f}{i}"));
                let template = MOCK_TEMPLATES[rng.random_range(0..MOCK_TEMPLATES.len())];
                let persona = MOCK_PERSONAS[rng.random_range(0..MOCK_PERSONAS.len())];
                let variation: u32 = rng.random_range(0..1000);
                let body = template
                    .replace("{name}", &fields.name)
                    .replace("{tag}", &tag)
                    .replace("{city}", &fields.city);
                format!("{body} #{hashtag} #{persona} v{variation}")
            })
            .collect()
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, building_id: &str, request: &ChatRequest) -> Result<String, AttemptError> {
        let user = request
            .messages
            .iter()
            .find(|m| m.role == "user")
            .ok_or_else(|| AttemptError::Transport("mock: request has no user message".into()))?;
        let fields =
            prompt::parse_user_prompt(&user.content).map_err(|e| AttemptError::Transport(format!("mock: {e}")))?;
        let content = serde_json::to_string(&self.tweets_for(building_id, &fields)).expect("strings serialize");
        Ok(json!({
            "object": "chat.completion",
            "model": request.model,
            "choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]
        })
        .to_string())
    }
}

/// Extracts and validates the tweet array from a chat-completions body.
///
/// Markdown code fences around the array are stripped, and if the content has
/// leading or trailing prose the outermost `[...]` span is tried.
pub fn parse_tweet_array(body: &str, expected: usize) -> Result<Vec<String>, AttemptError> {
    let value: Value = serde_json::from_str(body).map_err(|e| AttemptError::Parse(format!("body: {e}")))?;
    let content = value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| AttemptError::Parse("missing choices[0].message.content".into()))?;
    let trimmed = strip_fences(content.trim());
    let tweets: Vec<String> = match serde_json::from_str(trimmed) {
        Ok(t) => t,
        Err(first) => {
            let span = trimmed
                .find('[')
                .zip(trimmed.rfind(']'))
                .filter(|(a, b)| a < b)
                .map(|(a, b)| &trimmed[a..=b]);
            match span.and_then(|s| serde_json::from_str(s).ok()) {
                Some(t) => t,
                None => {
                    return Err(AttemptError::Parse(format!(
                        "content is not a JSON string array: {first}"
                    )))
                }
            }
        }
    };
    if tweets.len() != expected {
        return Err(AttemptError::LengthMismatch {
            expected,
            got: tweets.len(),
        });
    }
    if tweets.iter().any(|t| t.trim().is_empty()) {
        return Err(AttemptError::Parse("empty tweet in array".into()));
    }
    Ok(tweets)
}

fn strip_fences(s: &str) -> &str {
    let Some(rest) = s.strip_prefix("```") else {
        return s;
    };
    let rest = rest.split_once('\n').map(|(_, r)| r).unwrap_or(rest);
    rest.trim_end().strip_suffix("```").unwrap_or(rest).trim()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedTweet {
    pub text: String,
    pub language: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub building_id: String,
    /// Tweet `i` carries requested language `i`.
    pub tweets: Vec<GeneratedTweet>,
    pub raw_response: String,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationFailure {
    pub building_id: String,
    pub reason: String,
    pub attempts: u32,
}

/// Shared request counter for a run.
#[derive(Debug, Default)]
pub struct RequestBudget {
    limit: Option<u64>,
    used: AtomicU64,
}

impl RequestBudget {
    pub fn new(limit: Option<u64>) -> Self {
        RequestBudget {
            limit,
            used: AtomicU64::new(0),
        }
    }

    fn take(&self) -> Result<(), AttemptError> {
        let Some(limit) = self.limit else {
            return Ok(());
        };
        let prev = self.used.fetch_add(1, Ordering::SeqCst);
        if prev >= limit {
            return Err(AttemptError::BudgetExceeded(limit));
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::SeqCst).min(self.limit.unwrap_or(u64::MAX))
    }
}

/// One attempt's request and outcome, for the audit directory.
#[derive(Debug, Serialize)]
struct Transcript<'a> {
    building_id: &'a str,
    request: &'a ChatRequest,
    attempts: Vec<TranscriptAttempt>,
}

#[derive(Debug, Serialize)]
struct TranscriptAttempt {
    response: Option<String>,
    error: Option<String>,
}

/// Generates one building's tweets, retrying transport failures with exponential
/// backoff and malformed or wrong-length responses immediately.
pub fn generate(
    bundle: &PromptBundle,
    record: &BuildingRecord,
    cfg: &GenerationConfig,
    backend: &dyn ChatBackend,
    budget: &RequestBudget,
) -> Result<GenerationResult, GenerationFailure> {
    generate_logged(bundle, record, cfg, backend, budget, None)
}

fn generate_logged(
    bundle: &PromptBundle,
    record: &BuildingRecord,
    cfg: &GenerationConfig,
    backend: &dyn ChatBackend,
    budget: &RequestBudget,
    mut log: Option<&mut Vec<TranscriptAttempt>>,
) -> Result<GenerationResult, GenerationFailure> {
    let request = ChatRequest::new(bundle, cfg);
    let expected = record.tweet_languages.len();
    let mut attempts = 0u32;
    loop {
        if let Err(e) = budget.take() {
            return Err(GenerationFailure {
                building_id: record.building_id.clone(),
                reason: e.to_string(),
                attempts,
            });
        }
        attempts += 1;
        let outcome = backend
            .complete(&record.building_id, &request)
            .and_then(|body| parse_tweet_array(&body, expected).map(|t| (t, body)));
        let err = match outcome {
            Ok((texts, body)) => {
                if let Some(log) = log.as_deref_mut() {
                    log.push(TranscriptAttempt {
                        response: Some(body.clone()),
                        error: None,
                    });
                }
                let tweets = texts
                    .into_iter()
                    .zip(&record.tweet_languages)
                    .map(|(text, language)| GeneratedTweet {
                        text,
                        language: language.clone(),
                    })
                    .collect();
                return Ok(GenerationResult {
                    building_id: record.building_id.clone(),
                    tweets,
                    raw_response: body,
                    attempts,
                });
            }
            Err(e) => e,
        };
        if let Some(log) = log.as_deref_mut() {
            log.push(TranscriptAttempt {
                response: None,
                error: Some(err.to_string()),
            });
        }
        if attempts > cfg.max_retries {
            return Err(GenerationFailure {
                building_id: record.building_id.clone(),
                reason: err.to_string(),
                attempts,
            });
        }
        if err.is_transport() && cfg.backoff_ms > 0 {
            let factor = 1u64 << (attempts - 1).min(16);
            std::thread::sleep(Duration::from_millis(cfg.backoff_ms.saturating_mul(factor)));
        }
    }
}

/// Builds the backend named by the config. The seed only affects the mock.
pub fn backend_for(cfg: &GenerationConfig, seed: u64) -> Box<dyn ChatBackend> {
    match cfg.backend {
        BackendKind::Mock => Box::new(MockBackend::new(seed)),
        BackendKind::Http => Box::new(HttpBackend::from_config(cfg)),
    }
}

/// Output of a corpus generation run.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRun {
    /// Successfully generated buildings and their synthetic tweets.
    pub corpus: Corpus,
    pub failures: Vec<GenerationFailure>,
}

/// [`generate_corpus_with`] using the default system prompt and the configured backend.
pub fn generate_corpus(
    buildings: &[BuildingRecord],
    cfg: &GenerationConfig,
    seed: u64,
) -> Result<GenerationRun, GenerationError> {
    cfg.validate()?;
    let backend = backend_for(cfg, seed);
    generate_corpus_with(
        buildings,
        prompt::DEFAULT_SYSTEM_PROMPT,
        cfg,
        backend.as_ref(),
        seed,
        None,
    )
}

/// Generates tweets for every building with up to `max_concurrency` requests in
/// flight. Results are assembled in input order regardless of completion order.
/// A building contributes all of its tweets or a failure entry, never a subset.
pub fn generate_corpus_with(
    buildings: &[BuildingRecord],
    system_prompt: &str,
    cfg: &GenerationConfig,
    backend: &dyn ChatBackend,
    seed: u64,
    audit_dir: Option<&Path>,
) -> Result<GenerationRun, GenerationError> {
    cfg.validate()?;
    if let Some(dir) = audit_dir {
        std::fs::create_dir_all(dir).map_err(|source| GenerationError::Audit {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let budget = RequestBudget::new(cfg.request_budget);
    let slots: Vec<Mutex<Option<Result<GenerationResult, GenerationFailure>>>> =
        buildings.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let audit_errors = Mutex::new(Vec::new());
    let workers = cfg.max_concurrency.min(buildings.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(record) = buildings.get(i) else {
                    break;
                };
                let bundle = prompt::build_bundle(system_prompt, record);
                let mut log = audit_dir.map(|_| Vec::new());
                let outcome = generate_logged(&bundle, record, cfg, backend, &budget, log.as_mut());
                if let (Some(dir), Some(log)) = (audit_dir, log) {
                    let path = dir.join(format!("{i:06}.json"));
                    let transcript = Transcript {
                        building_id: &record.building_id,
                        request: &ChatRequest::new(&bundle, cfg),
                        attempts: log,
                    };
                    let text = serde_json::to_string_pretty(&transcript).expect("transcript serializes");
                    if let Err(source) = std::fs::write(&path, text) {
                        audit_errors
                            .lock()
                            .unwrap()
                            .push(GenerationError::Audit { path, source });
                    }
                }
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    if let Some(err) = audit_errors.into_inner().unwrap().into_iter().next() {
        return Err(err);
    }

    let mut kept = Vec::new();
    let mut tweets = Vec::new();
    let mut failures = Vec::new();
    for (record, slot) in buildings.iter().zip(slots) {
        match slot.into_inner().unwrap().expect("every slot is filled") {
            Ok(result) => {
                kept.push(record.clone());
                tweets.extend(
                    result
                        .tweets
                        .into_iter()
                        .map(|t| TweetRecord::new(&record.building_id, t.text, t.language, Source::Synthetic)),
                );
            }
            Err(failure) => failures.push(failure),
        }
    }
    let provenance = json!({
        "generator": "bfc-oracle",
        "version": env!("CARGO_PKG_VERSION"),
        "backend": cfg.backend,
        "model": cfg.model_name,
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
        "max_retries": cfg.max_retries,
        "seed": seed,
        "buildings_requested": buildings.len(),
        "buildings_failed": failures.len(),
    })
    .to_string();
    let corpus = crate::corpus::join_corpus(kept, tweets)
        .expect("generated tweets reference generated buildings")
        .with_provenance(provenance);
    Ok(GenerationRun { corpus, failures })
}
