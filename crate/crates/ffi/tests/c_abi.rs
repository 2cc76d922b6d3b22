use bfc_oracle::corpus::{save_corpus, Label};
use bfc_oracle::{cleaner, mock};
use bfc_oracle_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

fn cstrings(texts: &[&str]) -> (Vec<CString>, Vec<*const c_char>) {
    let owned: Vec<CString> = texts.iter().map(|t| CString::new(*t).unwrap()).collect();
    let ptrs = owned.iter().map(|c| c.as_ptr()).collect();
    (owned, ptrs)
}

fn last_error() -> String {
    let p = bfc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(bfc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn self_bleu_matches_library() {
    let texts = ["the cat sat on the mat", "the dog sat on the log", "a bird flew by"];
    let (_owned, ptrs) = cstrings(&texts);
    let mut out = f64::NAN;
    let s = unsafe { bfc_self_bleu(ptrs.as_ptr(), ptrs.len(), 4, &mut out) };
    assert_eq!(s, BfcStatus::Ok);
    assert_eq!(out, bfc_oracle::metrics::self_bleu(&texts, 4).unwrap());

    let s = unsafe { bfc_self_bleu(ptrs.as_ptr(), 1, 4, &mut out) };
    assert_eq!(s, BfcStatus::InvalidArgument);
    assert!(last_error().contains("at least"), "{}", last_error());

    let s = unsafe { bfc_self_bleu(ptr::null(), 3, 4, &mut out) };
    assert_eq!(s, BfcStatus::NullPointer);
    let s = unsafe { bfc_self_bleu(ptrs.as_ptr(), 3, 4, ptr::null_mut()) };
    assert_eq!(s, BfcStatus::NullPointer);
}

#[test]
fn invalid_utf8_is_reported() {
    let bad = [0xffu8, 0xfe, 0];
    let ptrs = [bad.as_ptr().cast::<c_char>(), bad.as_ptr().cast::<c_char>()];
    let mut out = 0.0;
    let s = unsafe { bfc_self_bleu(ptrs.as_ptr(), 2, 4, &mut out) };
    assert_eq!(s, BfcStatus::InvalidUtf8);
    assert!(last_error().contains("texts[0]"));
}

#[test]
fn unigram_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (_o, train) = cstrings(&["a"]);
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { bfc_unigram_train(train.as_ptr(), 1, &mut model) },
        BfcStatus::Ok
    );
    let mut ppl = 0.0;
    let (_o2, eval) = cstrings(&["a"]);
    assert_eq!(
        unsafe { bfc_unigram_log10_perplexity(model, eval.as_ptr(), 1, &mut ppl) },
        BfcStatus::Ok
    );
    assert!((ppl - -(2.0f64 / 3.0).log10()).abs() < 1e-12);

    let path = CString::new(dir.path().join("m.tsv").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { bfc_unigram_save(model, path.as_ptr()) }, BfcStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { bfc_unigram_load(path.as_ptr(), &mut loaded) }, BfcStatus::Ok);
    let mut again = 0.0;
    assert_eq!(
        unsafe { bfc_unigram_log10_perplexity(loaded, eval.as_ptr(), 1, &mut again) },
        BfcStatus::Ok
    );
    assert_eq!(ppl, again);
    unsafe {
        bfc_unigram_free(model);
        bfc_unigram_free(loaded);
        bfc_unigram_free(ptr::null_mut());
    }

    let missing = CString::new("/nonexistent/model.tsv").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { bfc_unigram_load(missing.as_ptr(), &mut m) }, BfcStatus::Io);
}

#[test]
fn naive_bayes_train_and_predict() {
    let (_o, texts) = cstrings(&["great food and coffee", "quiet home and garden"]);
    let labels = [BfcLabel::Commercial, BfcLabel::Residential];
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { bfc_nb_train(texts.as_ptr(), labels.as_ptr(), 2, 1.0, &mut model) },
        BfcStatus::Ok
    );
    let mut label = BfcLabel::Residential;
    let q = CString::new("coffee please").unwrap();
    assert_eq!(unsafe { bfc_nb_predict(model, q.as_ptr(), &mut label) }, BfcStatus::Ok);
    assert_eq!(label, BfcLabel::Commercial);
    let q = CString::new("and").unwrap();
    assert_eq!(unsafe { bfc_nb_predict(model, q.as_ptr(), &mut label) }, BfcStatus::Ok);
    assert_eq!(Label::from(label), Label::Commercial);
    unsafe { bfc_nb_free(model) };

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { bfc_nb_train(texts.as_ptr(), labels.as_ptr(), 2, 0.0, &mut bad) },
        BfcStatus::InvalidArgument
    );
    assert!(bad.is_null());
}

fn write_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let raw = mock::mock_buildings(30, 5);
    let (cleaned, _) = cleaner::clean(&raw, &Default::default(), &Default::default());
    let real = mock::mock_real_corpus(&cleaned, 0.3, 5);
    let synthetic = mock::mock_real_corpus(&cleaned, 0.0, 6);
    let (r, s) = (dir.join("real"), dir.join("synthetic"));
    save_corpus(&real, &r).unwrap();
    save_corpus(&synthetic, &s).unwrap();
    (r, s)
}

#[test]
fn run_configuration_returns_metrics_json() {
    let dir = tempfile::tempdir().unwrap();
    let (r, s) = write_fixture(dir.path());
    let (r, s) = (
        CString::new(r.to_str().unwrap()).unwrap(),
        CString::new(s.to_str().unwrap()).unwrap(),
    );
    let (mut real, mut syn) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { bfc_corpus_load(r.as_ptr(), &mut real) }, BfcStatus::Ok);
    assert_eq!(unsafe { bfc_corpus_load(s.as_ptr(), &mut syn) }, BfcStatus::Ok);
    assert_eq!(unsafe { bfc_corpus_building_count(real) }, 30);
    assert!(unsafe { bfc_corpus_tweet_count(syn) } >= 30);

    let mode = CString::new("cross_domain").unwrap();
    let seeds = [0u64, 1, 2];
    let mut json = ptr::null_mut();
    let s = unsafe { bfc_run_configuration(mode.as_ptr(), real, syn, seeds.as_ptr(), 3, &mut json) };
    assert_eq!(s, BfcStatus::Ok, "{}", last_error());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { bfc_string_free(json) };
    let m: bfc_oracle::ClassMetrics = serde_json::from_str(&text).unwrap();
    assert_eq!(m.runs, 3);
    assert_eq!(m.seeds, seeds);

    let bad = CString::new("sideways").unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { bfc_run_configuration(bad.as_ptr(), real, syn, seeds.as_ptr(), 3, &mut out) };
    assert_eq!(s, BfcStatus::InvalidArgument);
    let s = unsafe { bfc_run_configuration(mode.as_ptr(), real, syn, ptr::null(), 0, &mut out) };
    assert_eq!(s, BfcStatus::InvalidArgument);

    unsafe {
        bfc_corpus_free(real);
        bfc_corpus_free(syn);
    }
    assert_eq!(unsafe { bfc_corpus_building_count(ptr::null()) }, 0);
}

#[test]
fn missing_corpus_is_io_error() {
    let p = CString::new("/nonexistent/corpus").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { bfc_corpus_load(p.as_ptr(), &mut c) }, BfcStatus::Io);
    assert!(c.is_null());
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("bfc_oracle.h")
}

fn c_compiler() -> Option<&'static str> {
    ["cc", "clang", "gcc"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "bfc_oracle.h"

int main(void) {
    const char *texts[] = {"a b c d", "a b c d", "a b c d"};
    double v = 0.0;
    if (bfc_self_bleu(texts, 3, 4, &v) != BFC_STATUS_OK) return 1;
    if (v < 99.999999 || v > 100.000001) return 2;
    if (bfc_self_bleu(texts, 1, 4, &v) != BFC_STATUS_INVALID_ARGUMENT) return 3;
    if (bfc_last_error_message() == NULL) return 4;
    BfcUnigramModel *m = NULL;
    if (bfc_unigram_train(texts, 3, &m) != BFC_STATUS_OK) return 5;
    bfc_unigram_free(m);
    printf("%s\n", bfc_version());
    return 0;
}
"#;

#[test]
fn header_compiles_as_c() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let out = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// Links the C program against the static library when cargo has built it.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libbfc_oracle_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let out = Command::new(cc)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
