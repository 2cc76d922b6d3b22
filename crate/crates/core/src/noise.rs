//! Controlled corruption of a clean corpus.
//!
//! Label flipping works per building: a flipped building's tweets all carry the
//! new label. Irrelevant-content injection replaces tweet texts with distractors
//! from a pool while keeping ids, labels and languages, so the corpus size never
//! changes. Sample sizes are `round_half_up(rate * n)`.

use crate::classifier::{self, ClassifierError, Configuration, RunOptions};
use crate::corpus::{Corpus, CorpusError};
use crate::seeding::{keyed_rng, round_half_up};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum NoiseError {
    #[error("noise rate must be in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("distractor pool is empty")]
    EmptyPool,
    #[error("irrelevant_injection needs a distractor pool")]
    MissingPool,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    LabelFlip,
    IrrelevantInjection,
}

impl NoiseKind {
    pub fn key(self) -> &'static str {
        match self {
            NoiseKind::LabelFlip => "label_flip",
            NoiseKind::IrrelevantInjection => "irrelevant_injection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub rate: f64,
    pub seed: u64,
    pub pool_path: Option<PathBuf>,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), NoiseError> {
        check_rate(self.rate)?;
        if self.kind == NoiseKind::IrrelevantInjection && self.pool_path.is_none() {
            return Err(NoiseError::MissingPool);
        }
        Ok(())
    }

    /// Loads the pool (if any) and applies the corruption.
    pub fn apply(&self, corpus: &Corpus) -> Result<Corpus, NoiseError> {
        self.validate()?;
        let pool = match &self.pool_path {
            Some(p) if self.kind == NoiseKind::IrrelevantInjection => load_pool(p)?,
            _ => Vec::new(),
        };
        corrupt(corpus, self.kind, self.rate, &pool, self.seed)
    }
}

fn check_rate(rate: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(NoiseError::InvalidRate(rate))
    }
}

/// Reads distractor tweets: one per line, either a JSON object with a `text`
/// field (a tweets file) or plain text.
pub fn load_pool(path: impl AsRef<Path>) -> Result<Vec<String>, NoiseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| NoiseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let pool: Vec<String> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            serde_json::from_str::<serde_json::Value>(line)
                .ok()
                .and_then(|v| v.get("text").and_then(|t| t.as_str()).map(str::to_string))
                .unwrap_or_else(|| line.trim().to_string())
        })
        .collect();
    if pool.is_empty() {
        return Err(NoiseError::EmptyPool);
    }
    Ok(pool)
}

/// Toggles the label of a seeded uniform sample of buildings.
pub fn flip_labels(corpus: &Corpus, rate: f64, seed: u64) -> Result<Corpus, NoiseError> {
    check_rate(rate)?;
    let n = corpus.buildings().len();
    let k = round_half_up(rate, n);
    if k == 0 {
        return Ok(corpus.clone());
    }
    let mut rng = keyed_rng(seed, "label_flip");
    let mut buildings = corpus.buildings().to_vec();
    for i in index::sample(&mut rng, n, k) {
        buildings[i].label = buildings[i].label.toggled();
    }
    Ok(Corpus::from_parts_unchecked(
        buildings,
        corpus.tweets().to_vec(),
        corpus.provenance().to_string(),
    ))
}

/// Replaces the text of a seeded sample of tweets with pool tweets, drawn without
/// replacement until the pool is used up and with replacement after that.
pub fn inject_irrelevant(corpus: &Corpus, rate: f64, pool: &[String], seed: u64) -> Result<Corpus, NoiseError> {
    check_rate(rate)?;
    if pool.is_empty() {
        return Err(NoiseError::EmptyPool);
    }
    let n = corpus.tweets().len();
    let k = round_half_up(rate, n);
    if k == 0 {
        return Ok(corpus.clone());
    }
    let mut rng = keyed_rng(seed, "irrelevant_injection");
    let slots = index::sample(&mut rng, n, k);
    let order = index::sample(&mut rng, pool.len(), pool.len());
    let mut tweets = corpus.tweets().to_vec();
    for (j, slot) in slots.iter().enumerate() {
        let pick = if j < pool.len() {
            order.index(j)
        } else {
            rng.random_range(0..pool.len())
        };
        tweets[slot].text = pool[pick].clone();
    }
    Ok(Corpus::from_parts_unchecked(
        corpus.buildings().to_vec(),
        tweets,
        corpus.provenance().to_string(),
    ))
}

pub fn corrupt(corpus: &Corpus, kind: NoiseKind, rate: f64, pool: &[String], seed: u64) -> Result<Corpus, NoiseError> {
    match kind {
        NoiseKind::LabelFlip => flip_labels(corpus, rate, seed),
        NoiseKind::IrrelevantInjection => inject_irrelevant(corpus, rate, pool, seed),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationRow {
    pub kind: NoiseKind,
    pub rate: f64,
    pub mean_accuracy: f64,
    pub std: f64,
    pub seeds: Vec<u64>,
    pub accuracies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationTable {
    pub rows: Vec<DegradationRow>,
}

impl DegradationTable {
    /// `kind,rate,mean_accuracy,std,seeds` with seeds joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,rate,mean_accuracy,std,seeds\n");
        for r in &self.rows {
            let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
            let _ = writeln!(
                s,
                "{},{},{:.6},{:.6},{}",
                r.kind.key(),
                r.rate,
                r.mean_accuracy,
                r.std,
                seeds.join(";")
            );
        }
        s
    }
}

/// Accuracy of the synthetic-style configuration (train and test on the same,
/// possibly corrupted, corpus) for one split seed.
pub fn synthetic_accuracy(corpus: &Corpus, seed: u64, opts: RunOptions) -> Result<f64, ClassifierError> {
    Ok(classifier::run_seed(Configuration::Synthetic, corpus, corpus, seed, opts)?.accuracy)
}

/// Corrupts the corpus at every `(rate, seed)` cell and records `eval(corrupted, seed)`.
/// Cells run in parallel; rows keep the order of `rates`.
pub fn sweep<F>(
    corpus: &Corpus,
    kind: NoiseKind,
    rates: &[f64],
    seeds: &[u64],
    pool: &[String],
    eval: F,
) -> Result<DegradationTable, NoiseError>
where
    F: Fn(&Corpus, u64) -> Result<f64, ClassifierError> + Sync,
{
    if seeds.is_empty() {
        return Err(ClassifierError::NoSeeds.into());
    }
    for &r in rates {
        check_rate(r)?;
    }
    if kind == NoiseKind::IrrelevantInjection && pool.is_empty() {
        return Err(NoiseError::EmptyPool);
    }
    let cells: Vec<(usize, u64)> = (0..rates.len())
        .flat_map(|r| seeds.iter().map(move |&s| (r, s)))
        .collect();
    let results: Vec<f64> = cells
        .par_iter()
        .map(|&(r, seed)| {
            let noisy = corrupt(corpus, kind, rates[r], pool, seed)?;
            Ok(eval(&noisy, seed)?)
        })
        .collect::<Result<_, NoiseError>>()?;
    let rows = rates
        .iter()
        .enumerate()
        .map(|(r, &rate)| {
            let accuracies = results[r * seeds.len()..(r + 1) * seeds.len()].to_vec();
            let n = accuracies.len() as f64;
            let mean = accuracies.iter().sum::<f64>() / n;
            let std = if accuracies.len() < 2 {
                0.0
            } else {
                (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            DegradationRow {
                kind,
                rate,
                mean_accuracy: mean,
                std,
                seeds: seeds.to_vec(),
                accuracies,
            }
        })
        .collect();
    Ok(DegradationTable { rows })
}
