//! Helpers for driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bfc-oracle"));
    c.env_remove("LLM_API_KEY");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn read(path: impl AsRef<Path>) -> Vec<u8> {
    let path = path.as_ref();
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Files the mock pipeline writes that must not change between identical runs.
pub const PIPELINE_ARTIFACTS: &[&str] = &[
    "cleaned.jsonl",
    "prompts.jsonl",
    "synthetic/buildings.jsonl",
    "synthetic/tweets.jsonl",
    "synthetic/provenance.txt",
    "synthetic/failures.jsonl",
    "cross.json",
];

/// mock -> clean -> prompt -> generate(mock) -> validate -> run-config, timed.
pub fn pipeline(dir: &Path, buildings: usize) -> Duration {
    let start = Instant::now();
    let m = dir.join("fixture");
    let n = buildings.to_string();
    ok(&["mock", "--buildings", &n, "--seed", "5", "--out", p(&m)]);
    let cleaned = dir.join("cleaned.jsonl");
    let rejects = dir.join("rejects.jsonl");
    ok(&[
        "clean",
        "--in",
        p(&m.join("buildings.jsonl")),
        "--out",
        p(&cleaned),
        "--report",
        p(&rejects),
    ]);
    ok(&["prompt", "--in", p(&cleaned), "--out", p(&dir.join("prompts.jsonl"))]);
    let syn = dir.join("synthetic");
    ok(&[
        "generate",
        "--backend",
        "mock",
        "--seed",
        "7",
        "--in",
        p(&cleaned),
        "--out",
        p(&syn),
    ]);
    ok(&["validate", "--corpus", p(&syn), "--buildings", p(&cleaned)]);
    ok(&[
        "run-config",
        "--mode",
        "cross_domain",
        "--real",
        p(&m.join("real")),
        "--synthetic",
        p(&syn),
        "--seeds",
        "0,1,2,3,4",
        "--out",
        p(&dir.join("cross.json")),
    ]);
    start.elapsed()
}
