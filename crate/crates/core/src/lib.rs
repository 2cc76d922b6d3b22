//! Synthetic "oracle" tweet corpora for building function classification.
//!
//! The crate covers the whole offline pipeline:
//!
//! - [`corpus`]: building and tweet records, JSONL load/save, referential joins
//! - [`cleaner`]: metadata sanitization and the rejection rules applied before generation
//! - [`prompt`]: the constant system prompt and per-building user prompts
//! - [`gateway`]: chat-completion client (HTTP or deterministic mock) with retries
//! - [`metrics`]: shared tokenizer, 4-gram Self-BLEU and unigram log10 perplexity
//! - [`classifier`]: building-level splits, multinomial Naive Bayes and the three
//!   train/test configurations
//! - [`noise`]: label flipping, irrelevant-tweet injection and rate sweeps
//! - [`report`]: run manifests and text tables

pub mod classifier;
pub mod cleaner;
pub mod config;
pub mod corpus;
pub mod gateway;
pub mod metrics;
pub mod mock;
pub mod noise;
pub mod prompt;
pub mod report;
mod seeding;

pub use classifier::{ClassMetrics, Configuration, NaiveBayesModel, SplitSpec};
pub use cleaner::{RejectionReport, RejectionRule, TagLabelMap};
pub use corpus::{BuildingRecord, Corpus, Label, Source, TweetRecord};
pub use metrics::{DiversityReport, TokenSeq, UnigramModel};
pub use noise::{NoiseKind, NoiseSpec};
pub use prompt::PromptBundle;

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Clean(#[from] cleaner::CleanError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Prompt(#[from] prompt::PromptError),
    #[error(transparent)]
    Generation(#[from] gateway::GenerationError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Classifier(#[from] classifier::ClassifierError),
    #[error(transparent)]
    Noise(#[from] noise::NoiseError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
