//! Building-level splits, multinomial Naive Bayes, per-class evaluation and the
//! three train/test configurations (real-world, synthetic, cross-domain).

use crate::corpus::{Corpus, Label};
use crate::metrics::tokenize;
use crate::seeding::{rng, round_half_up};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("corpus has no buildings")]
    EmptyCorpus,
    #[error("train fraction must be in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("class {label} has {count} building(s); at least 2 are needed to split")]
    ClassTooSmall { label: Label, count: usize },
    #[error("no training tweets for class {0}")]
    MissingClass(Label),
    #[error("smoothing alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("no seeds given")]
    NoSeeds,
    #[error("no runs to aggregate")]
    NoRuns,
    #[error("real and synthetic corpora cover different buildings ({only_real} only in real, {only_synthetic} only in synthetic; e.g. {example})")]
    MismatchedBuildings {
        only_real: usize,
        only_synthetic: usize,
        example: String,
    },
    #[error("unknown configuration {0:?} (expected real_world, synthetic or cross_domain)")]
    UnknownConfiguration(String),
    #[error("{path}: {reason}")]
    File { path: PathBuf, reason: String },
}

fn file_error(path: &Path, reason: impl ToString) -> ClassifierError {
    ClassifierError::File {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), ClassifierError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| file_error(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ClassifierError> {
    let text = std::fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| file_error(path, e))
}

/// Disjoint train/test building sets. Id lists are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
    pub train_fraction: f64,
    pub train_building_ids: Vec<String>,
    pub test_building_ids: Vec<String>,
}

impl SplitSpec {
    pub fn train_set(&self) -> HashSet<&str> {
        self.train_building_ids.iter().map(String::as_str).collect()
    }

    pub fn test_set(&self) -> HashSet<&str> {
        self.test_building_ids.iter().map(String::as_str).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ClassifierError> {
        write_json(self, path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassifierError> {
        let spec: SplitSpec = read_json(path.as_ref())?;
        let train = spec.train_set();
        if let Some(id) = spec.test_building_ids.iter().find(|id| train.contains(id.as_str())) {
            return Err(file_error(
                path.as_ref(),
                format!("building {id:?} is on both sides of the split"),
            ));
        }
        Ok(spec)
    }
}

/// Shuffles each label's buildings with a seeded generator and puts
/// `round(fraction * n_class)` of them on the train side, keeping at least one
/// building of every class on each side.
pub fn split_by_building(corpus: &Corpus, fraction: f64, seed: u64) -> Result<SplitSpec, ClassifierError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(ClassifierError::InvalidFraction(fraction));
    }
    if corpus.buildings().is_empty() {
        return Err(ClassifierError::EmptyCorpus);
    }
    let mut by_label: BTreeMap<Label, Vec<&str>> = BTreeMap::new();
    for b in corpus.buildings() {
        by_label.entry(b.label).or_default().push(&b.building_id);
    }
    let mut gen = rng(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in Label::ALL {
        let mut ids = by_label.remove(&label).unwrap_or_default();
        if ids.len() < 2 {
            return Err(ClassifierError::ClassTooSmall {
                label,
                count: ids.len(),
            });
        }
        ids.sort_unstable();
        ids.shuffle(&mut gen);
        let n_train = round_half_up(fraction, ids.len()).clamp(1, ids.len() - 1);
        train.extend(ids[..n_train].iter().map(|s| s.to_string()));
        test.extend(ids[n_train..].iter().map(|s| s.to_string()));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitSpec {
        seed,
        train_fraction: fraction,
        train_building_ids: train,
        test_building_ids: test,
    })
}

/// Multinomial Naive Bayes over the shared tokenizer's unigram counts with
/// additive smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    pub class_log_priors: BTreeMap<Label, f64>,
    /// `ln((count(w, c) + alpha) / (tokens(c) + alpha * |V|))` for every `w` in the vocabulary.
    pub token_log_likelihoods: BTreeMap<Label, BTreeMap<String, f64>>,
    pub vocabulary: BTreeSet<String>,
}

impl NaiveBayesModel {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ClassifierError> {
        write_json(self, path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassifierError> {
        read_json(path.as_ref())
    }
}

/// Trains on `(text, label)` pairs. Priors come from tweet counts per class.
pub fn train_nb(docs: &[(&str, Label)], alpha: f64) -> Result<NaiveBayesModel, ClassifierError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(ClassifierError::InvalidAlpha(alpha));
    }
    let mut doc_counts = [0usize; 2];
    let mut token_totals = [0u64; 2];
    let mut counts: [HashMap<String, u64>; 2] = Default::default();
    for (text, label) in docs {
        let c = label.index();
        doc_counts[c] += 1;
        for token in tokenize(text).0 {
            token_totals[c] += 1;
            *counts[c].entry(token).or_insert(0) += 1;
        }
    }
    for label in Label::ALL {
        if doc_counts[label.index()] == 0 {
            return Err(ClassifierError::MissingClass(label));
        }
    }
    let vocabulary: BTreeSet<String> = counts.iter().flat_map(|m| m.keys().cloned()).collect();
    let v = vocabulary.len() as f64;
    let n_docs = docs.len() as f64;
    let mut class_log_priors = BTreeMap::new();
    let mut token_log_likelihoods = BTreeMap::new();
    for label in Label::ALL {
        let c = label.index();
        class_log_priors.insert(label, (doc_counts[c] as f64 / n_docs).ln());
        let denom = token_totals[c] as f64 + alpha * v;
        let table = vocabulary
            .iter()
            .map(|w| {
                let count = counts[c].get(w).copied().unwrap_or(0) as f64;
                (w.clone(), ((count + alpha) / denom).ln())
            })
            .collect();
        token_log_likelihoods.insert(label, table);
    }
    Ok(NaiveBayesModel {
        alpha,
        class_log_priors,
        token_log_likelihoods,
        vocabulary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: Label,
    pub log_scores: BTreeMap<Label, f64>,
}

/// Argmax of log prior plus summed token log likelihoods; tokens outside the
/// vocabulary are skipped and exact ties go to `commercial`.
pub fn predict_nb(model: &NaiveBayesModel, text: &str) -> Prediction {
    let tokens = tokenize(text);
    let mut log_scores = BTreeMap::new();
    let mut best: Option<(Label, f64)> = None;
    for label in Label::ALL {
        let table = &model.token_log_likelihoods[&label];
        let mut score = model.class_log_priors[&label];
        for t in tokens.tokens() {
            if let Some(ll) = table.get(t) {
                score += ll;
            }
        }
        log_scores.insert(label, score);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((label, score));
        }
    }
    Prediction {
        label: best.expect("two classes").0,
        log_scores,
    }
}

/// Class posterior from the log scores (normalized with log-sum-exp).
pub fn posterior(model: &NaiveBayesModel, text: &str) -> BTreeMap<Label, f64> {
    let scores = predict_nb(model, text).log_scores;
    let max = scores.values().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scores.values().map(|s| (s - max).exp()).sum();
    scores.into_iter().map(|(l, s)| (l, (s - max).exp() / z)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// True instances of the class in the test set(s).
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation across runs; 0 for a single run.
    pub std: f64,
}

/// Per-class precision/recall/F1 and overall accuracy.
///
/// For aggregated runs the point values are means across runs, `support` is summed
/// across runs, and `mean_std` holds mean and sample standard deviation keyed by
/// `"<class>.<metric>"` and `"accuracy"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub model: String,
    #[serde(default)]
    pub configuration: Option<Configuration>,
    pub per_class: BTreeMap<Label, ClassScores>,
    pub accuracy: f64,
    pub runs: usize,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub mean_std: BTreeMap<String, MeanStd>,
}

impl ClassMetrics {
    fn flat(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (label, s) in &self.per_class {
            out.push((format!("{label}.precision"), s.precision));
            out.push((format!("{label}.recall"), s.recall));
            out.push((format!("{label}.f1"), s.f1));
        }
        out.push(("accuracy".into(), self.accuracy));
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ClassifierError> {
        write_json(self, path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassifierError> {
        read_json(path.as_ref())
    }

    pub fn metric(&self, key: &str) -> Option<MeanStd> {
        self.mean_std.get(key).copied()
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Metrics from `(actual, predicted)` pairs.
pub fn metrics_from_pairs(pairs: &[(Label, Label)], model: &str) -> Result<ClassMetrics, ClassifierError> {
    if pairs.is_empty() {
        return Err(ClassifierError::EmptyTestSet);
    }
    // confusion[actual][predicted]
    let mut confusion = [[0usize; 2]; 2];
    for (actual, predicted) in pairs {
        confusion[actual.index()][predicted.index()] += 1;
    }
    let mut per_class = BTreeMap::new();
    for label in Label::ALL {
        let c = label.index();
        let tp = confusion[c][c];
        let predicted = confusion[0][c] + confusion[1][c];
        let support = confusion[c][0] + confusion[c][1];
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        per_class.insert(
            label,
            ClassScores {
                precision,
                recall,
                f1: harmonic(precision, recall),
                support,
            },
        );
    }
    let accuracy = ratio(confusion[0][0] + confusion[1][1], pairs.len());
    let mut m = ClassMetrics {
        model: model.to_string(),
        configuration: None,
        per_class,
        accuracy,
        runs: 1,
        seeds: Vec::new(),
        mean_std: BTreeMap::new(),
    };
    m.mean_std = m
        .flat()
        .into_iter()
        .map(|(k, v)| (k, MeanStd { mean: v, std: 0.0 }))
        .collect();
    Ok(m)
}

pub fn evaluate(model: &NaiveBayesModel, test: &[(&str, Label)]) -> Result<ClassMetrics, ClassifierError> {
    let pairs: Vec<(Label, Label)> = test
        .iter()
        .map(|(text, actual)| (*actual, predict_nb(model, text).label))
        .collect();
    metrics_from_pairs(&pairs, "NB")
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    MeanStd { mean, std }
}

/// Averages single runs into one report with per-metric mean and sample std.
pub fn aggregate(runs: &[ClassMetrics]) -> Result<ClassMetrics, ClassifierError> {
    let first = runs.first().ok_or(ClassifierError::NoRuns)?;
    let flats: Vec<Vec<(String, f64)>> = runs.iter().map(ClassMetrics::flat).collect();
    let mut mean_std_map = BTreeMap::new();
    for (k, (key, _)) in flats[0].iter().enumerate() {
        let values: Vec<f64> = flats.iter().map(|f| f[k].1).collect();
        mean_std_map.insert(key.clone(), mean_std(&values));
    }
    let mut per_class = BTreeMap::new();
    for label in Label::ALL {
        let get = |metric: &str| mean_std_map[&format!("{label}.{metric}")].mean;
        per_class.insert(
            label,
            ClassScores {
                precision: get("precision"),
                recall: get("recall"),
                f1: get("f1"),
                support: runs.iter().map(|r| r.per_class[&label].support).sum(),
            },
        );
    }
    Ok(ClassMetrics {
        model: first.model.clone(),
        configuration: first.configuration,
        per_class,
        accuracy: mean_std_map["accuracy"].mean,
        runs: runs.len(),
        seeds: runs.iter().flat_map(|r| r.seeds.iter().copied()).collect(),
        mean_std: mean_std_map,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Configuration {
    RealWorld,
    Synthetic,
    CrossDomain,
}

impl Configuration {
    pub const ALL: [Configuration; 3] = [
        Configuration::RealWorld,
        Configuration::Synthetic,
        Configuration::CrossDomain,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Configuration::RealWorld => "real_world",
            Configuration::Synthetic => "synthetic",
            Configuration::CrossDomain => "cross_domain",
        }
    }

    /// Row label in comparison tables.
    pub fn title(self) -> &'static str {
        match self {
            Configuration::RealWorld => "Real-world",
            Configuration::Synthetic => "Synthetic",
            Configuration::CrossDomain => "Cross-Domain",
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl std::str::FromStr for Configuration {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Configuration::ALL
            .into_iter()
            .find(|c| c.key() == s)
            .ok_or_else(|| ClassifierError::UnknownConfiguration(s.to_string()))
    }
}

fn check_same_buildings(real: &Corpus, synthetic: &Corpus) -> Result<(), ClassifierError> {
    let r: BTreeSet<&str> = real.building_ids().collect();
    let s: BTreeSet<&str> = synthetic.building_ids().collect();
    if r == s {
        return Ok(());
    }
    let only_real: Vec<&&str> = r.difference(&s).collect();
    let only_synthetic: Vec<&&str> = s.difference(&r).collect();
    let example = only_real
        .first()
        .or(only_synthetic.first())
        .map(|s| s.to_string())
        .unwrap_or_default();
    Err(ClassifierError::MismatchedBuildings {
        only_real: only_real.len(),
        only_synthetic: only_synthetic.len(),
        example,
    })
}

/// Options shared by configuration runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub alpha: f64,
    pub train_fraction: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            alpha: DEFAULT_ALPHA,
            train_fraction: DEFAULT_TRAIN_FRACTION,
        }
    }
}

/// One seed of a configuration: split the buildings once, then train and test on
/// the sides the configuration names.
pub fn run_seed(
    cfg: Configuration,
    real: &Corpus,
    synthetic: &Corpus,
    seed: u64,
    opts: RunOptions,
) -> Result<ClassMetrics, ClassifierError> {
    check_same_buildings(real, synthetic)?;
    let split = split_by_building(real, opts.train_fraction, seed)?;
    let (train_corpus, test_corpus) = match cfg {
        Configuration::RealWorld => (real, real),
        Configuration::Synthetic => (synthetic, synthetic),
        Configuration::CrossDomain => (synthetic, real),
    };
    let train = train_corpus.labeled_texts(&split.train_set());
    let test = test_corpus.labeled_texts(&split.test_set());
    let model = train_nb(&train, opts.alpha)?;
    let mut m = evaluate(&model, &test)?;
    m.configuration = Some(cfg);
    m.seeds = vec![seed];
    Ok(m)
}

/// Runs every seed (in parallel) and aggregates mean and sample std.
pub fn run_configuration(
    cfg: Configuration,
    real: &Corpus,
    synthetic: &Corpus,
    seeds: &[u64],
    opts: RunOptions,
) -> Result<ClassMetrics, ClassifierError> {
    use rayon::prelude::*;
    if seeds.is_empty() {
        return Err(ClassifierError::NoSeeds);
    }
    check_same_buildings(real, synthetic)?;
    let runs = seeds
        .par_iter()
        .map(|&seed| run_seed(cfg, real, synthetic, seed, opts))
        .collect::<Result<Vec<_>, _>>()?;
    aggregate(&runs)
}
