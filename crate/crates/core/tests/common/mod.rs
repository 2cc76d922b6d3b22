//! Independent reference implementations and fixtures shared by integration tests.
#![allow(dead_code)]

pub mod cli;

use bfc_oracle::corpus::{BuildingRecord, Corpus, Label};
use bfc_oracle::gateway::{self, BackendKind, GenerationConfig};
use bfc_oracle::{cleaner, mock, noise};
use std::collections::BTreeMap;

/// Sentence BLEU by direct enumeration: every candidate n-gram is compared against
/// every window of every reference.
pub fn brute_sentence_bleu(candidate: &[String], references: &[Vec<String>], max_n: usize) -> f64 {
    let c = candidate.len();
    if c == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    let orders = max_n.min(c);
    for n in 1..=orders {
        let windows: Vec<&[String]> = candidate.windows(n).collect();
        let total = windows.len();
        let mut seen: Vec<&[String]> = Vec::new();
        let mut clipped = 0usize;
        for g in &windows {
            if seen.contains(g) {
                continue;
            }
            seen.push(g);
            let in_candidate = windows.iter().filter(|w| *w == g).count();
            let mut best_ref = 0;
            for r in references {
                let in_ref = if r.len() >= n {
                    r.windows(n).filter(|w| w == g).count()
                } else {
                    0
                };
                best_ref = best_ref.max(in_ref);
            }
            clipped += in_candidate.min(best_ref);
        }
        let p = if clipped == 0 {
            0.1 / total as f64
        } else {
            clipped as f64 / total as f64
        };
        log_sum += p.ln();
    }
    let mut r = references[0].len();
    for ref_ in references {
        let (d_new, d_old) = (ref_.len().abs_diff(c), r.abs_diff(c));
        if d_new < d_old || (d_new == d_old && ref_.len() < r) {
            r = ref_.len();
        }
    }
    let bp = f64::min(1.0, (1.0 - r as f64 / c as f64).exp());
    bp * (log_sum / orders as f64).exp()
}

/// Self-BLEU percentage: each sentence scored against all the others.
pub fn brute_self_bleu(sentences: &[Vec<String>], max_n: usize) -> f64 {
    let mut total = 0.0;
    for (i, s) in sentences.iter().enumerate() {
        let refs: Vec<Vec<String>> = sentences
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| r.clone())
            .collect();
        total += brute_sentence_bleu(s, &refs, max_n);
    }
    100.0 * total / sentences.len() as f64
}

/// Class posterior by Bayes' rule with plain products of Laplace-smoothed
/// probabilities. Texts are whitespace-separated lowercase tokens.
pub fn brute_posterior(train: &[(&str, Label)], alpha: f64, text: &str) -> BTreeMap<Label, f64> {
    let mut vocab: Vec<&str> = train.iter().flat_map(|(t, _)| t.split_whitespace()).collect();
    vocab.sort();
    vocab.dedup();
    let v = vocab.len() as f64;
    let mut joint = BTreeMap::new();
    for label in Label::ALL {
        let docs: Vec<&str> = train.iter().filter(|(_, l)| *l == label).map(|(t, _)| *t).collect();
        let prior = docs.len() as f64 / train.len() as f64;
        let tokens: Vec<&str> = docs.iter().flat_map(|d| d.split_whitespace()).collect();
        let mut p = prior;
        for w in text.split_whitespace() {
            if !vocab.contains(&w) {
                continue;
            }
            let count = tokens.iter().filter(|t| **t == w).count() as f64;
            p *= (count + alpha) / (tokens.len() as f64 + alpha * v);
        }
        joint.insert(label, p);
    }
    let z: f64 = joint.values().sum();
    joint.into_iter().map(|(l, p)| (l, p / z)).collect()
}

/// Cleaned mock buildings.
pub fn cleaned_buildings(n: usize, seed: u64) -> Vec<BuildingRecord> {
    let raw = mock::mock_buildings(n, seed);
    let (kept, rejected) = cleaner::clean(&raw, &Default::default(), &Default::default());
    assert!(rejected.is_empty());
    kept
}

/// Synthetic corpus from the offline mock backend; its tweets embed the tag word.
pub fn mock_synthetic(buildings: &[BuildingRecord], seed: u64) -> Corpus {
    let cfg = GenerationConfig {
        backend: BackendKind::Mock,
        backoff_ms: 0,
        ..Default::default()
    };
    let run = gateway::generate_corpus(buildings, &cfg, seed).expect("mock generation");
    assert!(run.failures.is_empty());
    run.corpus
}

/// The constructed pair: synthetic tweets, and a "real" corpus equal to the
/// synthetic one with half of its tweets replaced by generic distractors.
pub fn separability_pair(n_buildings: usize, seed: u64) -> (Corpus, Corpus) {
    let buildings = cleaned_buildings(n_buildings, seed);
    let synthetic = mock_synthetic(&buildings, seed);
    let pool = mock::distractor_pool(500, seed);
    let real = noise::inject_irrelevant(&synthetic, 0.5, &pool, seed).expect("injection");
    (real, synthetic)
}
