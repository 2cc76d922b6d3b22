//! Corpus diversity and lexical realism: shared tokenizer, sentence BLEU,
//! Self-BLEU and a unigram language model scored by log10 perplexity.
//!
//! # Self-BLEU
//!
//! Each sentence is scored with BLEU against every other sentence of the corpus
//! as references, and the scores are averaged (reported as a percentage). For
//! n = 1..=min(max_n, |c|) the modified precision clips each candidate n-gram count
//! by its maximum count in any single reference. A zero numerator is replaced by
//! `ε / (|c| - n + 1)` with `ε = 0.1`. The brevity penalty uses the reference length
//! closest to the candidate length, preferring the shorter one on ties.
//!
//! Clipping against "all other sentences" only needs, per n-gram, the largest and
//! second-largest per-sentence counts and which sentence holds the largest. The
//! corpus-wide pass is therefore linear in the number of tokens, and the result is
//! identical to the pairwise definition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

/// Identifies the tokenizer and BLEU smoothing, for comparing reports.
pub const TOKENIZER_ID: &str = "nfc-lower-ws-punct-v1;bleu-eps-0.1";
pub const BLEU_EPSILON: f64 = 0.1;
pub const DEFAULT_MAX_N: usize = 4;
pub const URL_TOKEN: &str = "<url>";

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("self-BLEU needs at least 2 texts, got {0}")]
    TooFewTexts(usize),
    #[error("BLEU needs at least one reference")]
    NoReferences,
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
    #[error("cannot train a unigram model on an empty corpus")]
    EmptyCorpus,
    #[error("texts contain no tokens to score")]
    NoTokens,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unigram model line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },
}

/// Tokens produced by [`tokenize`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSeq(pub Vec<String>);

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().map(Into::into).collect())
    }
}

fn is_split_char(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

fn is_dropped(c: char) -> bool {
    use GeneralCategory::*;
    matches!(get_general_category(c), Format | Control) || ('\u{fe00}'..='\u{fe0f}').contains(&c)
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !is_split_char(c) && !is_dropped(c)
}

fn is_url(chunk: &str) -> bool {
    chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")
}

/// Lowercases and NFC-normalizes, splits on whitespace, then splits every
/// punctuation or symbol character into its own token. `#` and `@` directly
/// followed by a word stay attached to it (underscores included), and URLs become
/// `<url>`. Format and control characters are dropped.
pub fn tokenize(text: &str) -> TokenSeq {
    let normalized: String = text.to_lowercase().nfc().collect();
    let mut out = Vec::new();
    for chunk in normalized.split_whitespace() {
        if is_url(chunk) {
            out.push(URL_TOKEN.to_string());
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if (c == '#' || c == '@') && chars.get(i + 1).is_some_and(|&n| is_word_char(n)) {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                let mut tag = String::from(c);
                i += 1;
                while i < chars.len() && (is_word_char(chars[i]) || chars[i] == '_') {
                    tag.push(chars[i]);
                    i += 1;
                }
                out.push(tag);
                continue;
            }
            if is_dropped(c) {
                // skipped
            } else if is_split_char(c) {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            } else {
                word.push(c);
            }
            i += 1;
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    TokenSeq(out)
}

type NgramCounts<'a> = HashMap<&'a [String], u32>;

fn ngram_counts(tokens: &[String], n: usize) -> NgramCounts<'_> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Combines clipped counts and lengths into a BLEU score.
fn bleu_from_counts(clipped: &[u32], candidate_len: usize, closest_ref_len: usize) -> f64 {
    if candidate_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for (k, &hits) in clipped.iter().enumerate() {
        let total = (candidate_len - k) as f64;
        let p = if hits == 0 {
            BLEU_EPSILON / total
        } else {
            hits as f64 / total
        };
        log_sum += p.ln();
    }
    let bp = if candidate_len >= closest_ref_len {
        1.0
    } else {
        (1.0 - closest_ref_len as f64 / candidate_len as f64).exp()
    };
    bp * (log_sum / clipped.len() as f64).exp()
}

/// Sentence BLEU of `candidate` against `references`, in `[0, 1]`.
///
/// An empty candidate scores 0. Orders above the candidate length are skipped.
pub fn sentence_bleu(candidate: &TokenSeq, references: &[TokenSeq], max_n: usize) -> Result<f64, MetricsError> {
    if max_n == 0 {
        return Err(MetricsError::InvalidOrder);
    }
    if references.is_empty() {
        return Err(MetricsError::NoReferences);
    }
    let c = candidate.len();
    if c == 0 {
        return Ok(0.0);
    }
    let orders = max_n.min(c);
    let mut clipped = Vec::with_capacity(orders);
    for n in 1..=orders {
        let cand = ngram_counts(candidate.tokens(), n);
        let mut max_ref: NgramCounts = HashMap::new();
        for r in references {
            for (g, cnt) in ngram_counts(r.tokens(), n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(cnt);
            }
        }
        clipped.push(
            cand.iter()
                .map(|(g, &cnt)| cnt.min(max_ref.get(g).copied().unwrap_or(0)))
                .sum(),
        );
    }
    let r = references
        .iter()
        .map(TokenSeq::len)
        .min_by_key(|&len| (len.abs_diff(c), len))
        .expect("references are nonempty");
    Ok(bleu_from_counts(&clipped, c, r))
}

#[derive(Clone, Copy, Default)]
struct TopTwo {
    best: u32,
    holder: usize,
    second: u32,
}

impl TopTwo {
    fn offer(&mut self, count: u32, sentence: usize) {
        if count > self.best {
            self.second = self.best;
            self.best = count;
            self.holder = sentence;
        } else if count > self.second {
            self.second = count;
        }
    }

    /// Largest count among sentences other than `sentence`.
    fn excluding(&self, sentence: usize) -> u32 {
        if self.holder == sentence {
            self.second
        } else {
            self.best
        }
    }
}

/// Length of the closest other sentence (shorter on ties), given all lengths sorted.
fn closest_other_len(sorted: &[usize], c: usize) -> usize {
    let lo = sorted.partition_point(|&l| l < c);
    let hi = sorted.partition_point(|&l| l <= c);
    if hi - lo >= 2 {
        return c;
    }
    let below = lo.checked_sub(1).map(|i| sorted[i]);
    let above = sorted.get(hi).copied();
    match (below, above) {
        (Some(b), Some(a)) => {
            if c - b <= a - c {
                b
            } else {
                a
            }
        }
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => unreachable!("at least two sentences"),
    }
}

/// Per-sentence BLEU against all other sentences, in input order.
pub fn self_bleu_scores(sentences: &[TokenSeq], max_n: usize) -> Result<Vec<f64>, MetricsError> {
    if max_n == 0 {
        return Err(MetricsError::InvalidOrder);
    }
    if sentences.len() < 2 {
        return Err(MetricsError::TooFewTexts(sentences.len()));
    }
    // counts[i][n - 1]: n-gram counts of sentence i
    let counts: Vec<Vec<NgramCounts>> = sentences
        .par_iter()
        .map(|s| (1..=max_n).map(|n| ngram_counts(s.tokens(), n)).collect())
        .collect();
    let mut index: Vec<HashMap<&[String], TopTwo>> = vec![HashMap::new(); max_n];
    for (i, per_order) in counts.iter().enumerate() {
        for (k, grams) in per_order.iter().enumerate() {
            for (&g, &cnt) in grams {
                index[k].entry(g).or_default().offer(cnt, i);
            }
        }
    }
    let mut lengths: Vec<usize> = sentences.iter().map(TokenSeq::len).collect();
    lengths.sort_unstable();

    Ok(sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let c = s.len();
            if c == 0 {
                return 0.0;
            }
            let clipped: Vec<u32> = counts[i][..max_n.min(c)]
                .iter()
                .enumerate()
                .map(|(k, grams)| grams.iter().map(|(g, &cnt)| cnt.min(index[k][g].excluding(i))).sum())
                .collect();
            bleu_from_counts(&clipped, c, closest_other_len(&lengths, c))
        })
        .collect())
}

/// Self-BLEU of pre-tokenized sentences, as a percentage in `[0, 100]`.
pub fn self_bleu_tokens(sentences: &[TokenSeq], max_n: usize) -> Result<f64, MetricsError> {
    let scores = self_bleu_scores(sentences, max_n)?;
    // Summed sequentially in input order for reproducible rounding.
    let total: f64 = scores.iter().sum();
    Ok(100.0 * total / scores.len() as f64)
}

/// Self-BLEU of raw texts using the shared tokenizer, as a percentage.
pub fn self_bleu<S: AsRef<str> + Sync>(texts: &[S], max_n: usize) -> Result<f64, MetricsError> {
    let sentences: Vec<TokenSeq> = texts.par_iter().map(|t| tokenize(t.as_ref())).collect();
    self_bleu_tokens(&sentences, max_n)
}

/// Unigram counts with add-one smoothing over the vocabulary plus one unknown slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnigramModel {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl UnigramModel {
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let total = counts.values().sum();
        UnigramModel { counts, total }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    fn denominator(&self) -> f64 {
        (self.total + self.vocab_size() as u64 + 1) as f64
    }

    /// `(count(w) + 1) / (total + vocab_size + 1)`; unseen tokens take the unknown slot.
    pub fn probability(&self, token: &str) -> f64 {
        (self.count(token) + 1) as f64 / self.denominator()
    }

    pub fn unknown_probability(&self) -> f64 {
        1.0 / self.denominator()
    }

    /// `token<TAB>count` lines, sorted by token.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for (token, count) in &self.counts {
            let _ = writeln!(s, "{token}\t{count}");
        }
        s
    }

    pub fn from_tsv(text: &str) -> Result<Self, MetricsError> {
        let mut counts = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| MetricsError::ModelFormat {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (token, count) = line.rsplit_once('\t').ok_or_else(|| bad("expected token<TAB>count"))?;
            if token.is_empty() {
                return Err(bad("empty token"));
            }
            let count: u64 = count.parse().map_err(|_| bad("count is not a non-negative integer"))?;
            if counts.insert(token.to_string(), count).is_some() {
                return Err(bad("duplicate token"));
            }
        }
        Ok(UnigramModel::from_counts(counts))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MetricsError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|source| MetricsError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MetricsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| MetricsError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        UnigramModel::from_tsv(&text)
    }
}

pub fn train_unigram<S: AsRef<str>>(texts: &[S]) -> Result<UnigramModel, MetricsError> {
    let mut counts = BTreeMap::new();
    for t in texts {
        for token in tokenize(t.as_ref()).0 {
            *counts.entry(token).or_insert(0u64) += 1;
        }
    }
    if counts.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(UnigramModel::from_counts(counts))
}

/// Mean negative log10 probability per token over all tokens of `texts`.
pub fn log10_perplexity<S: AsRef<str>>(model: &UnigramModel, texts: &[S]) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    let mut tokens = 0usize;
    for t in texts {
        for token in tokenize(t.as_ref()).0 {
            sum += model.probability(&token).log10();
            tokens += 1;
        }
    }
    if tokens == 0 {
        return Err(MetricsError::NoTokens);
    }
    Ok(-sum / tokens as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    /// Row name in comparison tables, e.g. "Synthetic".
    #[serde(default)]
    pub dataset: String,
    pub self_bleu_percent: f64,
    pub log10_perplexity: f64,
    pub corpus_size: usize,
    pub tokenizer_id: String,
    #[serde(default = "default_max_n")]
    pub max_n: usize,
}

fn default_max_n() -> usize {
    DEFAULT_MAX_N
}

pub fn diversity_report<S: AsRef<str> + Sync>(
    dataset: &str,
    texts: &[S],
    model: &UnigramModel,
    max_n: usize,
) -> Result<DiversityReport, MetricsError> {
    Ok(DiversityReport {
        dataset: dataset.to_string(),
        self_bleu_percent: self_bleu(texts, max_n)?,
        log10_perplexity: log10_perplexity(model, texts)?,
        corpus_size: texts.len(),
        tokenizer_id: TOKENIZER_ID.to_string(),
        max_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> TokenSeq {
        s.split_whitespace().collect()
    }

    #[test]
    fn tokenizer_examples() {
        assert_eq!(
            tokenize("Great coffee at this café!"),
            seq("great coffee at this café !")
        );
        assert_eq!(
            tokenize("#CarShopping @merlexautogroup"),
            seq("#carshopping @merlexautogroup")
        );
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn tokenizer_details() {
        assert_eq!(
            tokenize("See https://t.co/abc and www.x.org, ok?"),
            seq("see <url> and <url> ok ?")
        );
        assert_eq!(tokenize("The staff? Super."), seq("the staff ? super ."));
        assert_eq!(tokenize("#phd_life rocks!!"), seq("#phd_life rocks ! !"));
        assert_eq!(tokenize("a # b"), seq("a # b"));
        assert_eq!(tokenize("mail@home"), seq("mail @home"));
        // decomposed e + combining acute normalizes to the composed form
        assert_eq!(tokenize("cafe\u{301}"), tokenize("café"));
        assert_eq!(tokenize("you’re"), seq("you ’ re"));
        assert_eq!(tokenize("fun😀\u{fe0f}"), seq("fun 😀"));
    }

    #[test]
    fn bleu_identical_and_disjoint() {
        let a = seq("a b c d e");
        assert!((sentence_bleu(&a, &[a.clone(), seq("x y")], 4).unwrap() - 1.0).abs() < 1e-15);
        // no matches: smoothed precisions 0.1/4, 0.1/3, 0.1/2, 0.1/1, BP = exp(1 - 5/4)
        let s = sentence_bleu(&seq("p q r s"), std::slice::from_ref(&a), 4).unwrap();
        let expected = (1.0f64 - 1.25).exp() * (0.1f64.powi(4) / 24.0).powf(0.25);
        assert!((s - expected).abs() < 1e-15, "{s}");
        assert_eq!(
            sentence_bleu(&TokenSeq::default(), std::slice::from_ref(&a), 4).unwrap(),
            0.0
        );
        assert!(matches!(sentence_bleu(&a, &[], 4), Err(MetricsError::NoReferences)));
        assert!(matches!(
            sentence_bleu(&a, std::slice::from_ref(&a), 0),
            Err(MetricsError::InvalidOrder)
        ));
    }

    #[test]
    fn bleu_short_candidate_skips_high_orders() {
        // Two tokens, both orders match; refs of length 3 and 1 tie, the shorter wins, BP = 1.
        let c = seq("hi there");
        assert!((sentence_bleu(&c, &[seq("hi there friend"), seq("hi")], 4).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn brevity_penalty_prefers_shorter_on_tie() {
        // c = 2; refs of length 1 and 3 are equally close; the shorter one gives BP = 1.
        let c = seq("a b");
        let s = sentence_bleu(&c, &[seq("a"), seq("a b z")], 2).unwrap();
        let p1: f64 = 1.0;
        let p2: f64 = 1.0;
        assert!((s - (p1.ln() + p2.ln()).exp()).abs() < 1e-15);
        // Only a longer reference: BP = exp(1 - 3/2).
        let s = sentence_bleu(&c, &[seq("a b z")], 2).unwrap();
        assert!((s - (1.0f64 - 1.5).exp()).abs() < 1e-15);
    }

    #[test]
    fn closest_other_length() {
        let sorted = [1, 3, 3, 7];
        assert_eq!(closest_other_len(&sorted, 3), 3);
        assert_eq!(closest_other_len(&sorted, 1), 3);
        assert_eq!(closest_other_len(&sorted, 7), 3);
        assert_eq!(closest_other_len(&[2, 4, 6], 4), 2);
        assert_eq!(closest_other_len(&[2, 4, 7], 4), 2);
        assert_eq!(closest_other_len(&[3, 4, 5], 4), 3);
        assert_eq!(closest_other_len(&[1, 4, 5], 4), 5);
    }

    #[test]
    fn self_bleu_basic_cases() {
        let same = vec!["the cat sat on the mat"; 4];
        assert!((self_bleu(&same, 4).unwrap() - 100.0).abs() < 1e-9);
        let disjoint = ["a b c d", "e f g h", "i j k l"];
        let expected = 100.0 * (0.1f64.powi(4) / 24.0).powf(0.25);
        assert!((self_bleu(&disjoint, 4).unwrap() - expected).abs() < 1e-12);
        assert!(matches!(self_bleu(&["one"], 4), Err(MetricsError::TooFewTexts(1))));
    }

    #[test]
    fn self_bleu_matches_sentence_bleu_against_others() {
        let texts = ["a b c d", "b c d a", "a b c d e", "a a b", "", "c d"];
        let toks: Vec<TokenSeq> = texts.iter().map(|t| tokenize(t)).collect();
        let scores = self_bleu_scores(&toks, 4).unwrap();
        for (i, cand) in toks.iter().enumerate() {
            let refs: Vec<TokenSeq> = toks
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, t)| t.clone())
                .collect();
            let expected = sentence_bleu(cand, &refs, 4).unwrap();
            assert!((scores[i] - expected).abs() < 1e-15, "sentence {i}");
        }
    }

    #[test]
    fn unigram_hand_case() {
        let m = train_unigram(&["a"]).unwrap();
        let v = log10_perplexity(&m, &["a"]).unwrap();
        assert!((v - (-(2.0f64 / 3.0).log10())).abs() < 1e-9);
        assert!((v - 0.176_091_259_055_681_2).abs() < 1e-9);
    }

    #[test]
    fn unigram_counts_and_determinism() {
        let m = train_unigram(&["a a b"]).unwrap();
        assert_eq!(m.count("a"), 2);
        assert_eq!(m.count("b"), 1);
        assert_eq!(m.total(), 3);
        assert_eq!(m.vocab_size(), 2);
        assert_eq!(m, train_unigram(&["a a b"]).unwrap());
        assert!(matches!(train_unigram::<&str>(&[]), Err(MetricsError::EmptyCorpus)));
        assert!(matches!(train_unigram(&[" "]), Err(MetricsError::EmptyCorpus)));
        assert!(matches!(log10_perplexity(&m, &[""]), Err(MetricsError::NoTokens)));
    }

    #[test]
    fn training_text_scores_lower_than_unseen_text() {
        let train = ["the food here is great", "great coffee and food"];
        let m = train_unigram(&train).unwrap();
        let seen = log10_perplexity(&m, &train).unwrap();
        let unseen = log10_perplexity(&m, &["zebra quantum violin"]).unwrap();
        assert!(seen < unseen);
        let frequent = log10_perplexity(&m, &["great food"]).unwrap();
        let rare = log10_perplexity(&m, &["here is"]).unwrap();
        assert!(frequent < rare);
    }

    #[test]
    fn tsv_round_trip_and_errors() {
        let m = train_unigram(&["b a a #tag !"]).unwrap();
        let back = UnigramModel::from_tsv(&m.to_tsv()).unwrap();
        assert_eq!(back, m);
        assert_eq!(m.to_tsv(), "!\t1\n#tag\t1\na\t2\nb\t1\n");
        assert!(matches!(
            UnigramModel::from_tsv("a 1\n"),
            Err(MetricsError::ModelFormat { line: 1, .. })
        ));
        assert!(matches!(
            UnigramModel::from_tsv("a\t1\na\tx\n"),
            Err(MetricsError::ModelFormat { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn smoothed_probabilities_sum_to_one(texts in prop::collection::vec("[a-e ]{1,20}", 1..10)) {
            if let Ok(m) = train_unigram(&texts) {
                let sum: f64 = m.counts().keys().map(|t| m.probability(t)).sum::<f64>() + m.unknown_probability();
                prop_assert!((sum - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn sentence_bleu_bounded_and_reference_order_free(
            cand in prop::collection::vec("[a-d]", 0..7),
            mut refs in prop::collection::vec(prop::collection::vec("[a-d]", 0..7), 1..5),
        ) {
            let c: TokenSeq = cand.into_iter().collect();
            let rs: Vec<TokenSeq> = refs.iter().cloned().map(|r| r.into_iter().collect()).collect();
            let s = sentence_bleu(&c, &rs, 4).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
            refs.reverse();
            let rs2: Vec<TokenSeq> = refs.into_iter().map(|r| r.into_iter().collect()).collect();
            prop_assert_eq!(s, sentence_bleu(&c, &rs2, 4).unwrap());
        }

        #[test]
        fn self_bleu_bounded_and_permutation_free(
            mut texts in prop::collection::vec("[a-d ]{0,14}", 2..8),
        ) {
            let s = self_bleu(&texts, 4).unwrap();
            prop_assert!((0.0..=100.0).contains(&s));
            texts.reverse();
            prop_assert!((s - self_bleu(&texts, 4).unwrap()).abs() < 1e-9);
        }
    }
}
