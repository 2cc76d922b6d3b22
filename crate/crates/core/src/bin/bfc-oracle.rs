use bfc_oracle::classifier::{self, Configuration, NaiveBayesModel, RunOptions, SplitSpec};
use bfc_oracle::cleaner::{self, RejectionRule};
use bfc_oracle::config::RunConfig;
use bfc_oracle::corpus::{self, MAX_TWEETS_PER_BUILDING, TWEETS_FILE};
use bfc_oracle::gateway::{self, BackendKind, GenerationConfig};
use bfc_oracle::metrics::{self, UnigramModel, DEFAULT_MAX_N};
use bfc_oracle::noise::{self, NoiseKind};
use bfc_oracle::report::{self, RunManifest};
use bfc_oracle::{mock, prompt};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "bfc-oracle",
    version,
    about = "Synthetic tweet corpora for building function classification"
)]
struct Cli {
    /// TOML config; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sanitize building metadata and reject unusable records.
    Clean(CleanArgs),
    /// Write the prompt bundles for a building file, for review.
    Prompt(PromptArgs),
    /// Generate a synthetic corpus from cleaned buildings.
    Generate(GenerateArgs),
    /// Check a corpus directory for referential and distribution errors.
    Validate(ValidateArgs),
    /// Self-BLEU and unigram perplexity of a tweet set.
    Diversity(DiversityArgs),
    /// Building-level train/test split.
    Split(SplitArgs),
    /// Train Naive Bayes on the train side of a split.
    TrainNb(TrainNbArgs),
    /// Score a trained model on the test side of a split.
    Evaluate(EvaluateArgs),
    /// Run one train/test configuration over several seeds.
    RunConfig(RunConfigArgs),
    /// Corrupt a corpus with label flips or irrelevant tweets.
    InjectNoise(InjectNoiseArgs),
    /// Accuracy across noise rates and seeds.
    Sweep(SweepArgs),
    /// Render metric JSON files as text tables.
    Report(ReportArgs),
    /// Write seeded fixture data: raw buildings, a matching real-world corpus and a distractor pool.
    Mock(MockArgs),
}

#[derive(Args, Debug, Serialize)]
struct CleanArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// JSONL of {"building_id", "tags"} listing every tag seen per building.
    #[arg(long)]
    multi_tags: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PromptArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    system_template: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum BackendArg {
    Http,
    Mock,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output corpus directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long)]
    system_template: Option<PathBuf>,
    /// Directory for per-building request/response transcripts.
    #[arg(long)]
    audit_dir: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    max_tokens: Option<u32>,
    #[arg(long)]
    max_retries: Option<u32>,
    #[arg(long)]
    concurrency: Option<usize>,
    /// Upper bound on requests for the whole run, retries included.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Cleaned building file the corpus was generated from.
    #[arg(long)]
    buildings: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DiversityArgs {
    /// Tweets file or corpus directory.
    #[arg(long)]
    tweets: PathBuf,
    /// Row name in reports.
    #[arg(long, default_value = "corpus")]
    dataset: String,
    /// Trained unigram model (token<TAB>count lines).
    #[arg(long, conflicts_with = "reference")]
    model: Option<PathBuf>,
    /// Tweets file or corpus directory to train the unigram model on.
    #[arg(long, required_unless_present = "model")]
    reference: Option<PathBuf>,
    /// Where to save the model trained from --reference.
    #[arg(long, requires = "reference")]
    save_model: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SplitArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct TrainNbArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    split: PathBuf,
    /// Configuration name recorded in the metrics.
    #[arg(long)]
    mode: Option<Configuration>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct RunConfigArgs {
    #[arg(long)]
    mode: Configuration,
    #[arg(long)]
    real: PathBuf,
    #[arg(long)]
    synthetic: PathBuf,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum NoiseArg {
    LabelFlip,
    IrrelevantInjection,
}

impl From<NoiseArg> for NoiseKind {
    fn from(k: NoiseArg) -> Self {
        match k {
            NoiseArg::LabelFlip => NoiseKind::LabelFlip,
            NoiseArg::IrrelevantInjection => NoiseKind::IrrelevantInjection,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct InjectNoiseArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    kind: NoiseArg,
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Distractor tweets (tweets file or one per line).
    #[arg(long)]
    pool: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    kind: NoiseArg,
    #[arg(long, value_delimiter = ',', required = true)]
    rates: Vec<f64>,
    /// Seeds for both the corruption and the split.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    pool: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// JSON output.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// Metric JSON files (diversity, classification or degradation).
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MockArgs {
    #[arg(long, default_value_t = 20)]
    buildings: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Share of real-world tweets replaced by generic posts.
    #[arg(long, default_value_t = 0.5)]
    distractor_rate: f64,
    #[arg(long, default_value_t = 200)]
    pool_size: usize,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl<E: Into<bfc_oracle::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into().to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> Failure {
    Failure::Data(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let config = RunConfig::load_optional(cli.config.as_deref())?;
    let ctx = Ctx {
        config,
        config_path: cli.config,
    };
    match cli.command {
        Command::Clean(a) => ctx.clean(a),
        Command::Prompt(a) => ctx.prompt(a),
        Command::Generate(a) => ctx.generate(a),
        Command::Validate(a) => ctx.validate(a),
        Command::Diversity(a) => ctx.diversity(a),
        Command::Split(a) => ctx.split(a),
        Command::TrainNb(a) => ctx.train_nb(a),
        Command::Evaluate(a) => ctx.evaluate(a),
        Command::RunConfig(a) => ctx.run_config(a),
        Command::InjectNoise(a) => ctx.inject_noise(a),
        Command::Sweep(a) => ctx.sweep(a),
        Command::Report(a) => ctx.report(a),
        Command::Mock(a) => ctx.mock(a),
    }
}

struct Ctx {
    config: RunConfig,
    config_path: Option<PathBuf>,
}

/// Refuses outputs that would overwrite an input.
fn check_distinct(inputs: &[&Path], outputs: &[&Path]) -> CliResult {
    let canon = |p: &Path| std::fs::canonicalize(p).ok();
    for o in outputs {
        let Some(co) = canon(o) else { continue };
        for i in inputs {
            if let Some(ci) = canon(i) {
                if ci == co || (ci.is_dir() && co.starts_with(&ci)) || (co.is_dir() && ci.starts_with(&co)) {
                    return Err(usage(format!(
                        "output {} would overwrite input {}",
                        o.display(),
                        i.display()
                    )));
                }
            }
        }
    }
    Ok(())
}

fn create_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    write_text(path, &(text + "\n"))
}

/// A tweets file, or the tweets file inside a corpus directory.
fn tweets_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(TWEETS_FILE)
    } else {
        p.to_path_buf()
    }
}

fn load_texts(p: &Path) -> CliResult<Vec<String>> {
    Ok(corpus::load_tweets(tweets_path(p))?
        .into_iter()
        .map(|t| t.text)
        .collect())
}

impl Ctx {
    fn manifest(&self, subcommand: &str, args: &impl Serialize, effective: Value, seeds: Vec<u64>) -> RunManifest {
        let config = json!({
            "config_file": self.config_path,
            "args": args,
            "effective": effective,
        });
        RunManifest::new(subcommand, config, seeds)
    }

    fn finish(&self, mut m: RunManifest, inputs: &[&Path], outputs: &[&Path]) -> CliResult {
        if let Some(p) = &self.config_path {
            m.add_input(p)?;
        }
        for i in inputs {
            m.add_input(i)?;
        }
        for o in outputs {
            m.add_output(o);
        }
        let primary = outputs.first().expect("every subcommand has an output");
        m.write(&report::manifest_path_for(primary))?;
        Ok(())
    }

    fn clean(&self, a: CleanArgs) -> CliResult {
        check_distinct(&[&a.input], &[&a.out, &a.report])?;
        let rules = self.config.cleaner_rules();
        let buildings = corpus::load_buildings(&a.input)?;
        let index = match &a.multi_tags {
            Some(p) => cleaner::load_multi_tag_index(p)?,
            None => Default::default(),
        };
        let (kept, rejected) = cleaner::clean(&buildings, &rules, &index);
        corpus::write_jsonl(&a.out, &kept)?;
        rejected.write_jsonl(&a.report)?;
        let counts: serde_json::Map<String, Value> = [
            RejectionRule::Malformed,
            RejectionRule::GenericTag,
            RejectionRule::MultiTag,
            RejectionRule::LabelTagConflict,
        ]
        .into_iter()
        .map(|r| (r.as_str().to_string(), json!(rejected.count(r))))
        .collect();
        eprintln!(
            "kept {} of {} buildings; rejected {}",
            kept.len(),
            buildings.len(),
            Value::Object(counts.clone())
        );
        let m = self.manifest("clean", &a, json!({ "rules": rules, "rejections": counts }), vec![]);
        let mut inputs: Vec<&Path> = vec![&a.input];
        if let Some(p) = &a.multi_tags {
            inputs.push(p);
        }
        self.finish(m, &inputs, &[&a.out, &a.report])
    }

    fn prompt(&self, a: PromptArgs) -> CliResult {
        check_distinct(&[&a.input], &[&a.out])?;
        let system = prompt::build_system_prompt(a.system_template.as_deref())?;
        let buildings = corpus::load_buildings(&a.input)?;
        let bundles = prompt::build_bundles(&system, &buildings);
        corpus::write_jsonl(&a.out, &bundles)?;
        let m = self.manifest("prompt", &a, json!({ "bundles": bundles.len() }), vec![]);
        let mut inputs: Vec<&Path> = vec![&a.input];
        if let Some(p) = &a.system_template {
            inputs.push(p);
        }
        self.finish(m, &inputs, &[&a.out])
    }

    fn generation_config(&self, a: &GenerateArgs) -> GenerationConfig {
        let mut cfg = self.config.generation();
        if let Some(b) = a.backend {
            cfg.backend = match b {
                BackendArg::Http => BackendKind::Http,
                BackendArg::Mock => BackendKind::Mock,
            };
        }
        if let Some(v) = &a.endpoint {
            cfg.endpoint_url = v.clone();
        }
        if let Some(v) = &a.model {
            cfg.model_name = v.clone();
        }
        cfg.temperature = a.temperature.unwrap_or(cfg.temperature);
        cfg.max_tokens = a.max_tokens.unwrap_or(cfg.max_tokens);
        cfg.max_retries = a.max_retries.unwrap_or(cfg.max_retries);
        cfg.max_concurrency = a.concurrency.unwrap_or(cfg.max_concurrency);
        cfg.request_budget = a.budget.or(cfg.request_budget);
        cfg
    }

    fn generate(&self, a: GenerateArgs) -> CliResult {
        check_distinct(&[&a.input], &[&a.out])?;
        let cfg = self.generation_config(&a);
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        let system = prompt::build_system_prompt(a.system_template.as_deref())?;
        let buildings = corpus::load_buildings(&a.input)?;
        if let Some(b) = buildings
            .iter()
            .find(|b| b.tweet_languages.len() > MAX_TWEETS_PER_BUILDING)
        {
            return Err(data(format!(
                "building {} lists {} tweets (max {MAX_TWEETS_PER_BUILDING}); run `clean` first",
                b.building_id,
                b.tweet_languages.len()
            )));
        }
        create_dir(&a.out)?;
        let backend = gateway::backend_for(&cfg, a.seed);
        let run = gateway::generate_corpus_with(
            &buildings,
            &system,
            &cfg,
            backend.as_ref(),
            a.seed,
            a.audit_dir.as_deref(),
        )?;
        corpus::save_corpus(&run.corpus, &a.out)?;
        let failures_path = a.out.join("failures.jsonl");
        corpus::write_jsonl(&failures_path, &run.failures)?;
        eprintln!(
            "generated {} tweets for {} buildings; {} failed",
            run.corpus.tweets().len(),
            run.corpus.buildings().len(),
            run.failures.len()
        );
        let m = self.manifest("generate", &a, json!({ "generation": cfg }), vec![a.seed]);
        let mut inputs: Vec<&Path> = vec![&a.input];
        if let Some(p) = &a.system_template {
            inputs.push(p);
        }
        self.finish(m, &inputs, &[&a.out])
    }

    fn validate(&self, a: ValidateArgs) -> CliResult {
        let c = corpus::load_corpus(&a.corpus)?;
        let mut problems: Vec<String> = c
            .completed_violations()
            .into_iter()
            .map(|v| format!("{}: {}", v.building_id, v.problem))
            .collect();
        if let Some(p) = &a.buildings {
            let expected = corpus::load_buildings(p)?;
            for b in &expected {
                match c.building(&b.building_id) {
                    None => problems.push(format!("{}: missing from corpus", b.building_id)),
                    Some(got) if got != b => {
                        problems.push(format!("{}: metadata differs from {}", b.building_id, p.display()))
                    }
                    Some(_) => {}
                }
            }
            if c.buildings().len() > expected.len() {
                problems.push(format!(
                    "corpus has {} buildings, {} lists {}",
                    c.buildings().len(),
                    p.display(),
                    expected.len()
                ));
            }
        }
        for p in &problems {
            println!("{p}");
        }
        if problems.is_empty() {
            eprintln!("ok: {} buildings, {} tweets", c.buildings().len(), c.tweets().len());
            Ok(())
        } else {
            Err(data(format!("{} problem(s) found", problems.len())))
        }
    }

    fn diversity(&self, a: DiversityArgs) -> CliResult {
        let mut inputs: Vec<&Path> = vec![&a.tweets];
        let mut outputs: Vec<&Path> = vec![&a.out];
        let model = match (&a.model, &a.reference) {
            (Some(p), _) => {
                inputs.push(p);
                UnigramModel::load(p)?
            }
            (None, Some(r)) => {
                inputs.push(r);
                let m = metrics::train_unigram(&load_texts(r)?)?;
                if let Some(p) = &a.save_model {
                    m.save(p)?;
                    outputs.push(p);
                }
                m
            }
            (None, None) => return Err(usage("one of --model or --reference is required")),
        };
        check_distinct(&inputs, &outputs)?;
        let texts = load_texts(&a.tweets)?;
        let r = metrics::diversity_report(&a.dataset, &texts, &model, a.max_n)?;
        write_json(&a.out, &r)?;
        print!("{}", report::diversity_table(std::slice::from_ref(&r)));
        let m = self.manifest(
            "diversity",
            &a,
            json!({ "max_n": a.max_n, "tokenizer_id": r.tokenizer_id }),
            vec![],
        );
        self.finish(m, &inputs, &outputs)
    }

    fn run_options(&self, alpha: Option<f64>, train_fraction: Option<f64>) -> RunOptions {
        let base = self.config.run_options();
        RunOptions {
            alpha: alpha.unwrap_or(base.alpha),
            train_fraction: train_fraction.unwrap_or(base.train_fraction),
        }
    }

    fn split(&self, a: SplitArgs) -> CliResult {
        check_distinct(&[&a.corpus], &[&a.out])?;
        let opts = self.run_options(None, a.train_fraction);
        let c = corpus::load_corpus(&a.corpus)?;
        let s = classifier::split_by_building(&c, opts.train_fraction, a.seed)?;
        s.save(&a.out)?;
        eprintln!(
            "train {} / test {} buildings",
            s.train_building_ids.len(),
            s.test_building_ids.len()
        );
        let m = self.manifest(
            "split",
            &a,
            json!({ "train_fraction": opts.train_fraction }),
            vec![a.seed],
        );
        self.finish(m, &[&a.corpus], &[&a.out])
    }

    fn train_nb(&self, a: TrainNbArgs) -> CliResult {
        check_distinct(&[&a.corpus, &a.split], &[&a.out])?;
        let opts = self.run_options(a.alpha, None);
        let c = corpus::load_corpus(&a.corpus)?;
        let s = SplitSpec::load(&a.split)?;
        let model = classifier::train_nb(&c.labeled_texts(&s.train_set()), opts.alpha)?;
        model.save(&a.out)?;
        let m = self.manifest("train-nb", &a, json!({ "alpha": opts.alpha }), vec![s.seed]);
        self.finish(m, &[&a.corpus, &a.split], &[&a.out])
    }

    fn evaluate(&self, a: EvaluateArgs) -> CliResult {
        check_distinct(&[&a.model, &a.corpus, &a.split], &[&a.out])?;
        let model = NaiveBayesModel::load(&a.model)?;
        let c = corpus::load_corpus(&a.corpus)?;
        let s = SplitSpec::load(&a.split)?;
        let mut metrics = classifier::evaluate(&model, &c.labeled_texts(&s.test_set()))?;
        metrics.configuration = a.mode;
        metrics.seeds = vec![s.seed];
        metrics.save(&a.out)?;
        print!("{}", report::classification_table(std::slice::from_ref(&metrics)));
        let m = self.manifest("evaluate", &a, json!({}), vec![s.seed]);
        self.finish(m, &[&a.model, &a.corpus, &a.split], &[&a.out])
    }

    fn run_config(&self, a: RunConfigArgs) -> CliResult {
        check_distinct(&[&a.real, &a.synthetic], &[&a.out])?;
        let opts = self.run_options(a.alpha, a.train_fraction);
        let seeds = a.seeds.clone().unwrap_or_else(|| self.config.seeds());
        let real = corpus::load_corpus(&a.real)?;
        let synthetic = corpus::load_corpus(&a.synthetic)?;
        let metrics = classifier::run_configuration(a.mode, &real, &synthetic, &seeds, opts)?;
        metrics.save(&a.out)?;
        print!("{}", report::classification_table(std::slice::from_ref(&metrics)));
        let m = self.manifest(
            "run-config",
            &a,
            json!({ "options": opts, "seeds": seeds }),
            seeds.clone(),
        );
        self.finish(m, &[&a.real, &a.synthetic], &[&a.out])
    }

    fn inject_noise(&self, a: InjectNoiseArgs) -> CliResult {
        let mut inputs: Vec<&Path> = vec![&a.corpus];
        if let Some(p) = &a.pool {
            inputs.push(p);
        }
        check_distinct(&inputs, &[&a.out])?;
        let spec = noise::NoiseSpec {
            kind: a.kind.into(),
            rate: a.rate,
            seed: a.seed,
            pool_path: a.pool.clone(),
        };
        spec.validate().map_err(|e| usage(e.to_string()))?;
        let c = corpus::load_corpus(&a.corpus)?;
        let noisy = spec.apply(&c)?;
        let provenance = json!({ "source": c.provenance(), "noise": spec }).to_string();
        create_dir(&a.out)?;
        corpus::save_corpus(&noisy.with_provenance(provenance), &a.out)?;
        let m = self.manifest("inject-noise", &a, json!({ "noise": spec }), vec![a.seed]);
        self.finish(m, &inputs, &[&a.out])
    }

    fn sweep(&self, a: SweepArgs) -> CliResult {
        let mut inputs: Vec<&Path> = vec![&a.corpus];
        if let Some(p) = &a.pool {
            inputs.push(p);
        }
        let mut outputs: Vec<&Path> = vec![&a.out];
        if let Some(p) = &a.csv {
            outputs.push(p);
        }
        check_distinct(&inputs, &outputs)?;
        let kind: NoiseKind = a.kind.into();
        let pool = match (&a.pool, kind) {
            (Some(p), NoiseKind::IrrelevantInjection) => noise::load_pool(p)?,
            (None, NoiseKind::IrrelevantInjection) => return Err(usage("--pool is required for irrelevant_injection")),
            _ => Vec::new(),
        };
        let opts = self.run_options(a.alpha, a.train_fraction);
        let seeds = a.seeds.clone().unwrap_or_else(|| self.config.seeds());
        let c = corpus::load_corpus(&a.corpus)?;
        let table = noise::sweep(&c, kind, &a.rates, &seeds, &pool, |noisy, seed| {
            noise::synthetic_accuracy(noisy, seed, opts)
        })?;
        write_json(&a.out, &table)?;
        if let Some(p) = &a.csv {
            write_text(p, &table.to_csv())?;
        }
        print!("{}", report::degradation_table(&table));
        let m = self.manifest("sweep", &a, json!({ "options": opts, "seeds": seeds }), seeds.clone());
        self.finish(m, &inputs, &outputs)
    }

    fn report(&self, a: ReportArgs) -> CliResult {
        let files = a
            .inputs
            .iter()
            .map(|p| report::load_metrics(p))
            .collect::<Result<Vec<_>, _>>()?;
        let text = report::render_report(&files)?;
        match &a.out {
            Some(out) => {
                let inputs: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
                check_distinct(&inputs, &[out])?;
                write_text(out, &text)?;
                let m = self.manifest("report", &a, json!({}), vec![]);
                self.finish(m, &inputs, &[out])
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn mock(&self, a: MockArgs) -> CliResult {
        if !(0.0..=1.0).contains(&a.distractor_rate) {
            return Err(usage(format!(
                "--distractor-rate must be in [0, 1], got {}",
                a.distractor_rate
            )));
        }
        create_dir(&a.out)?;
        let raw = mock::mock_buildings(a.buildings, a.seed);
        let raw_path = a.out.join("buildings.jsonl");
        corpus::write_jsonl(&raw_path, &raw)?;
        let (cleaned, _) = cleaner::clean(&raw, &self.config.cleaner_rules(), &Default::default());
        let real = mock::mock_real_corpus(&cleaned, a.distractor_rate, a.seed);
        corpus::save_corpus(&real, a.out.join("real"))?;
        let pool_path = a.out.join("pool.txt");
        write_text(
            &pool_path,
            &(mock::distractor_pool(a.pool_size, a.seed).join("\n") + "\n"),
        )?;
        let m = self.manifest("mock", &a, json!({}), vec![a.seed]);
        self.finish(m, &[], &[&a.out])
    }
}
