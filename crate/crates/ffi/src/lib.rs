//! C ABI over `bfc_oracle`.
//!
//! Every function returns a [`BfcStatus`]; results come back through out-pointers.
//! On failure the message is kept per thread and read with
//! [`bfc_last_error_message`]. Handles are opaque and released with their
//! matching `_free` function. Strings returned to the caller are released with
//! [`bfc_string_free`].

use bfc_oracle::classifier::{self, Configuration, NaiveBayesModel, RunOptions};
use bfc_oracle::corpus::{self, Corpus, Label};
use bfc_oracle::metrics::{self, UnigramModel};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Data = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfcLabel {
    Commercial = 0,
    Residential = 1,
}

impl From<Label> for BfcLabel {
    fn from(l: Label) -> Self {
        match l {
            Label::Commercial => BfcLabel::Commercial,
            Label::Residential => BfcLabel::Residential,
        }
    }
}

impl From<BfcLabel> for Label {
    fn from(l: BfcLabel) -> Self {
        match l {
            BfcLabel::Commercial => Label::Commercial,
            BfcLabel::Residential => Label::Residential,
        }
    }
}

/// A loaded corpus directory.
pub struct BfcCorpus(Corpus);

/// Add-one smoothed unigram model.
pub struct BfcUnigramModel(UnigramModel);

/// Trained multinomial Naive Bayes model.
pub struct BfcNbModel(NaiveBayesModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail {
    status: BfcStatus,
    message: String,
}

impl Fail {
    fn new(status: BfcStatus, message: impl Into<String>) -> Self {
        Fail {
            status,
            message: message.into(),
        }
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn io_or_data(e: impl std::fmt::Display, io: bool) -> Fail {
    Fail::new(if io { BfcStatus::Io } else { BfcStatus::Data }, e.to_string())
}

impl From<corpus::CorpusError> for Fail {
    fn from(e: corpus::CorpusError) -> Self {
        let io = matches!(e, corpus::CorpusError::Io { .. });
        io_or_data(e, io)
    }
}

impl From<metrics::MetricsError> for Fail {
    fn from(e: metrics::MetricsError) -> Self {
        let io = matches!(e, metrics::MetricsError::Io { .. });
        io_or_data(e, io)
    }
}

impl From<classifier::ClassifierError> for Fail {
    fn from(e: classifier::ClassifierError) -> Self {
        match e {
            classifier::ClassifierError::InvalidAlpha(_)
            | classifier::ClassifierError::InvalidFraction(_)
            | classifier::ClassifierError::NoSeeds
            | classifier::ClassifierError::UnknownConfiguration(_) => {
                Fail::new(BfcStatus::InvalidArgument, e.to_string())
            }
            classifier::ClassifierError::File { .. } => io_or_data(e, true),
            _ => io_or_data(e, false),
        }
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BfcStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            BfcStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail::new(BfcStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::new(BfcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn str_array<'a>(p: *const *const c_char, n: usize, what: &str) -> Result<Vec<&'a str>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    non_null(p, what)?;
    std::slice::from_raw_parts(p, n)
        .iter()
        .enumerate()
        .map(|(i, &s)| str_arg(s, &format!("{what}[{i}]")))
        .collect()
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    ptr::write(out, value);
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail::new(BfcStatus::Data, "output contains a nul byte"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bfc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bfc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bfc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Self-BLEU (percent) of `n` UTF-8 texts using `max_n`-gram precision.
///
/// # Safety
/// `texts` must point to `n` valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_self_bleu(
    texts: *const *const c_char,
    n: usize,
    max_n: usize,
    out: *mut f64,
) -> BfcStatus {
    guard(|| {
        non_null(out, "out")?;
        let texts = str_array(texts, n, "texts")?;
        let v = metrics::self_bleu(&texts, max_n).map_err(|e| Fail::new(BfcStatus::InvalidArgument, e.to_string()))?;
        write_out(out, v);
        Ok(())
    })
}

/// # Safety
/// `texts` must point to `n` valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_unigram_train(
    texts: *const *const c_char,
    n: usize,
    out: *mut *mut BfcUnigramModel,
) -> BfcStatus {
    guard(|| {
        non_null(out, "out")?;
        let texts = str_array(texts, n, "texts")?;
        let model = metrics::train_unigram(&texts)?;
        write_out(out, Box::into_raw(Box::new(BfcUnigramModel(model))));
        Ok(())
    })
}

/// Loads a `token<TAB>count` model file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_unigram_load(path: *const c_char, out: *mut *mut BfcUnigramModel) -> BfcStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = UnigramModel::load(str_arg(path, "path")?)?;
        write_out(out, Box::into_raw(Box::new(BfcUnigramModel(model))));
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bfc_unigram_save(model: *const BfcUnigramModel, path: *const c_char) -> BfcStatus {
    guard(|| {
        non_null(model, "model")?;
        (*model).0.save(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Per-token log10 perplexity of `n` texts.
///
/// # Safety
/// `model` must be a live handle, `texts` must point to `n` valid strings and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_unigram_log10_perplexity(
    model: *const BfcUnigramModel,
    texts: *const *const c_char,
    n: usize,
    out: *mut f64,
) -> BfcStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let texts = str_array(texts, n, "texts")?;
        let v = metrics::log10_perplexity(&(*model).0, &texts)?;
        write_out(out, v);
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bfc_unigram_free(model: *mut BfcUnigramModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Loads a corpus directory (`buildings.jsonl`, `tweets.jsonl`).
///
/// # Safety
/// `dir` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_corpus_load(dir: *const c_char, out: *mut *mut BfcCorpus) -> BfcStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = corpus::load_corpus(str_arg(dir, "dir")?)?;
        write_out(out, Box::into_raw(Box::new(BfcCorpus(c))));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfc_corpus_building_count(corpus: *const BfcCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.buildings().len())
}

/// # Safety
/// `corpus` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfc_corpus_tweet_count(corpus: *const BfcCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.tweets().len())
}

/// # Safety
/// `corpus` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bfc_corpus_free(corpus: *mut BfcCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Trains Naive Bayes on `n` (text, label) pairs with smoothing `alpha`.
///
/// # Safety
/// `texts` and `labels` must each point to `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_nb_train(
    texts: *const *const c_char,
    labels: *const BfcLabel,
    n: usize,
    alpha: f64,
    out: *mut *mut BfcNbModel,
) -> BfcStatus {
    guard(|| {
        non_null(out, "out")?;
        let texts = str_array(texts, n, "texts")?;
        let labels: &[BfcLabel] = if n == 0 {
            &[]
        } else {
            non_null(labels, "labels")?;
            std::slice::from_raw_parts(labels, n)
        };
        let docs: Vec<(&str, Label)> = texts.into_iter().zip(labels.iter().map(|&l| l.into())).collect();
        let model = classifier::train_nb(&docs, alpha)?;
        write_out(out, Box::into_raw(Box::new(BfcNbModel(model))));
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle, `text` a valid string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_nb_predict(
    model: *const BfcNbModel,
    text: *const c_char,
    out: *mut BfcLabel,
) -> BfcStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let p = classifier::predict_nb(&(*model).0, str_arg(text, "text")?);
        write_out(out, p.label.into());
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bfc_nb_free(model: *mut BfcNbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs a configuration (`"real_world"`, `"synthetic"` or `"cross_domain"`) over
/// `n_seeds` seeds with default options and returns the aggregated metrics as
/// JSON in `*out_json`, to be released with [`bfc_string_free`].
///
/// # Safety
/// `mode` must be a valid string, `real` and `synthetic` live handles, `seeds`
/// must point to `n_seeds` values and `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_run_configuration(
    mode: *const c_char,
    real: *const BfcCorpus,
    synthetic: *const BfcCorpus,
    seeds: *const u64,
    n_seeds: usize,
    out_json: *mut *mut c_char,
) -> BfcStatus {
    guard(|| {
        non_null(out_json, "out_json")?;
        non_null(real, "real")?;
        non_null(synthetic, "synthetic")?;
        let cfg: Configuration = str_arg(mode, "mode")?.parse()?;
        let seeds: &[u64] = if n_seeds == 0 {
            &[]
        } else {
            non_null(seeds, "seeds")?;
            std::slice::from_raw_parts(seeds, n_seeds)
        };
        let m = classifier::run_configuration(cfg, &(*real).0, &(*synthetic).0, seeds, RunOptions::default())?;
        let json = serde_json::to_string(&m).expect("metrics serialize");
        write_out(out_json, into_c_string(json)?);
        Ok(())
    })
}
