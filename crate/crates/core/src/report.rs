//! Run manifests and plain-text comparison tables.

use crate::classifier::{ClassMetrics, MeanStd};
use crate::corpus::Label;
use crate::metrics::DiversityReport;
use crate::noise::DegradationTable;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("no metric files given")]
    NoInputs,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Lowercase hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String, ReportError> {
    let mut file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(io_err(path))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Written next to every output so a run can be reproduced and audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub timestamp: String,
    pub seeds: Vec<u64>,
    /// Effective settings after config file and flags are merged.
    pub config: Value,
    /// Input path to SHA-256. Directories expand to the files inside them.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: Value, seeds: Vec<u64>) -> Self {
        RunManifest {
            tool: "bfc-oracle".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seeds,
            config,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Hashes a file, or every regular file directly inside a directory.
    pub fn add_input(&mut self, path: &Path) -> Result<(), ReportError> {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(io_err(path))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            for p in entries {
                let digest = sha256_file(&p)?;
                self.inputs.insert(p.display().to_string(), digest);
            }
        } else {
            self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        }
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(io_err(path))
    }
}

/// `<dir>/manifest.json` for directory outputs, `<file>.manifest.json` otherwise.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    if output.is_dir() {
        output.join("manifest.json")
    } else {
        let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        output.with_file_name(name)
    }
}

/// A metrics file, recognised by its fields.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricsFile {
    Diversity(DiversityReport),
    Classification(ClassMetrics),
    Degradation(DegradationTable),
}

pub fn parse_metrics(text: &str, path: &Path) -> Result<MetricsFile, ReportError> {
    let fmt = |reason: String| ReportError::Format {
        path: path.to_path_buf(),
        reason,
    };
    let value: Value = serde_json::from_str(text).map_err(|e| fmt(e.to_string()))?;
    let has = |k: &str| value.get(k).is_some();
    if has("self_bleu_percent") {
        serde_json::from_value(value).map(MetricsFile::Diversity)
    } else if has("per_class") {
        serde_json::from_value(value).map(MetricsFile::Classification)
    } else if has("rows") {
        serde_json::from_value(value).map(MetricsFile::Degradation)
    } else {
        return Err(fmt("not a diversity, classification or degradation metrics file".into()));
    }
    .map_err(|e| fmt(e.to_string()))
}

pub fn load_metrics(path: &Path) -> Result<MetricsFile, ReportError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_metrics(&text, path)
}

fn pad_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

/// Dataset | Self-BLEU ↓ | Perplexity (log10) ↓
pub fn diversity_table(reports: &[DiversityReport]) -> String {
    let header = ["Dataset", "Self-BLEU ↓", "Perplexity (log10) ↓"].map(String::from);
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.dataset.clone(),
                format!("{:.2}", r.self_bleu_percent),
                format!("{:.2}", r.log10_perplexity),
            ]
        })
        .collect();
    pad_table(&header, &rows)
}

fn mean_std(m: &ClassMetrics, key: &str, point: f64) -> String {
    let MeanStd { mean, std } = m.metric(key).unwrap_or(MeanStd { mean: point, std: 0.0 });
    format!("{mean:.2} ± {std:.2}")
}

/// Configurations | Model | Commercial P R F1 | Residential P R F1 | Overall Accuracy,
/// each cell `mean ± std`.
pub fn classification_table(metrics: &[ClassMetrics]) -> String {
    let mut header = vec!["Configurations".to_string(), "Model".to_string()];
    for label in Label::ALL {
        let title = match label {
            Label::Commercial => "Commercial",
            Label::Residential => "Residential",
        };
        for m in ["P", "R", "F1"] {
            header.push(format!("{title} {m}"));
        }
    }
    header.push("Overall Accuracy".into());
    let rows: Vec<Vec<String>> = metrics
        .iter()
        .map(|m| {
            let mut row = vec![
                m.configuration
                    .map(|c| c.title().to_string())
                    .unwrap_or_else(|| "-".into()),
                m.model.clone(),
            ];
            for label in Label::ALL {
                let s = m.per_class.get(&label);
                for (name, point) in [
                    ("precision", s.map(|s| s.precision)),
                    ("recall", s.map(|s| s.recall)),
                    ("f1", s.map(|s| s.f1)),
                ] {
                    row.push(mean_std(m, &format!("{label}.{name}"), point.unwrap_or(0.0)));
                }
            }
            row.push(mean_std(m, "accuracy", m.accuracy));
            row
        })
        .collect();
    pad_table(&header, &rows)
}

pub fn degradation_table(table: &DegradationTable) -> String {
    let header = ["Noise", "Rate", "Accuracy"].map(String::from);
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.kind.key().to_string(),
                format!("{:.2}", r.rate),
                format!("{:.2} ± {:.2}", r.mean_accuracy, r.std),
            ]
        })
        .collect();
    pad_table(&header, &rows)
}

/// Renders every file, grouping diversity and classification inputs into one
/// table each (in input order). Degradation tables are rendered separately.
pub fn render_report(files: &[MetricsFile]) -> Result<String, ReportError> {
    if files.is_empty() {
        return Err(ReportError::NoInputs);
    }
    let mut diversity = Vec::new();
    let mut classification = Vec::new();
    let mut degradation = Vec::new();
    for f in files {
        match f {
            MetricsFile::Diversity(d) => diversity.push(d.clone()),
            MetricsFile::Classification(c) => classification.push(c.clone()),
            MetricsFile::Degradation(t) => degradation.push(t),
        }
    }
    let mut sections = Vec::new();
    if !diversity.is_empty() {
        sections.push(diversity_table(&diversity));
    }
    if !classification.is_empty() {
        sections.push(classification_table(&classification));
    }
    for t in degradation {
        sections.push(degradation_table(t));
    }
    let mut out = String::new();
    for (i, s) in sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(out, "{s}");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{metrics_from_pairs, Configuration};
    use crate::noise::{DegradationRow, NoiseKind};

    fn diversity(name: &str) -> DiversityReport {
        DiversityReport {
            dataset: name.into(),
            self_bleu_percent: 12.345,
            log10_perplexity: 3.0,
            corpus_size: 10,
            tokenizer_id: crate::metrics::TOKENIZER_ID.into(),
            max_n: 4,
        }
    }

    #[test]
    fn detects_file_kinds() {
        let p = Path::new("m.json");
        let d = serde_json::to_string(&diversity("Real-world")).unwrap();
        assert!(matches!(parse_metrics(&d, p).unwrap(), MetricsFile::Diversity(_)));
        let c = metrics_from_pairs(&[(Label::Commercial, Label::Commercial)], "NB").unwrap();
        let c = serde_json::to_string(&c).unwrap();
        assert!(matches!(parse_metrics(&c, p).unwrap(), MetricsFile::Classification(_)));
        assert!(matches!(
            parse_metrics("{\"x\": 1}", p),
            Err(ReportError::Format { .. })
        ));
        assert!(matches!(parse_metrics("[", p), Err(ReportError::Format { .. })));
        assert!(matches!(render_report(&[]), Err(ReportError::NoInputs)));
    }

    #[test]
    fn tables() {
        let t = diversity_table(&[diversity("Synthetic")]);
        assert!(t.starts_with("| Dataset   | Self-BLEU ↓ | Perplexity (log10) ↓ |\n"));
        assert!(t.contains("| Synthetic | 12.35       | 3.00                 |"));

        let mut m = metrics_from_pairs(
            &[
                (Label::Commercial, Label::Commercial),
                (Label::Residential, Label::Commercial),
                (Label::Residential, Label::Residential),
            ],
            "NB",
        )
        .unwrap();
        m.configuration = Some(Configuration::CrossDomain);
        m.mean_std.insert(
            "accuracy".into(),
            MeanStd {
                mean: 0.6667,
                std: 0.031,
            },
        );
        let t = classification_table(&[m]);
        assert!(t.contains("Overall Accuracy"));
        assert!(t.contains("Cross-Domain"));
        assert!(t.contains("0.67 ± 0.03"));
        assert!(t.contains("0.50 ± 0.00"));

        let d = DegradationTable {
            rows: vec![DegradationRow {
                kind: NoiseKind::LabelFlip,
                rate: 0.2,
                mean_accuracy: 0.8,
                std: 0.05,
                seeds: vec![0],
                accuracies: vec![0.8],
            }],
        };
        assert!(degradation_table(&d).contains("| label_flip | 0.20 | 0.80 ± 0.05 |"));
    }

    #[test]
    fn manifest_hashes_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("a.txt");
        std::fs::write(&f, "abc").unwrap();
        assert_eq!(
            sha256_file(&f).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let mut m = RunManifest::new("clean", serde_json::json!({"k": 1}), vec![3]);
        m.add_input(dir.path()).unwrap();
        assert_eq!(m.inputs.len(), 1);
        let out = manifest_path_for(dir.path());
        assert_eq!(out, dir.path().join("manifest.json"));
        assert_eq!(manifest_path_for(&f), dir.path().join("a.txt.manifest.json"));
        m.write(&out).unwrap();
        let back: RunManifest = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
