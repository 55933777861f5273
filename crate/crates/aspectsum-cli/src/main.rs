//! Command-line front end for the aspect summarization pipeline.
//!
//! Every subcommand reads and writes JSON (JSONL for per-document streams).
//! `--config FILE` supplies values for flags the user did not pass (explicit
//! flags always win), and each run records its fully resolved configuration
//! next to its outputs — `<out>.config.json` for file outputs, `config.json`
//! inside `--out-dir`, or a single JSON line on stderr when the report goes
//! to stdout — so any run can be replayed exactly from that file.
//!
//! Exit codes: 0 success (including --help/--version), 1 usage error,
//! 2 data error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use aspectsum::corpus::{load_annotations, load_corpus, Corpus};
use aspectsum::embedding::{load_word_vectors, EmbeddingTable};
use aspectsum::error::Error as LibError;
use aspectsum::eval::{evaluate, sensitivity_report};
use aspectsum::keywords::{build_idf, extract_keywords, KeywordSet, DEFAULT_MAX_K};
use aspectsum::model::{
    load_model, load_summaries, predict, save_model, save_summaries, summaries_to_jsonl,
    SummaryRecord, TrainConfig,
};
use aspectsum::baselines::std_ref_oracle;
use aspectsum::oracle::{
    build_training_set, load_training_examples, save_training_examples, scorer_for, BuildOptions,
    Rouge2Scorer, ScorerKind, DEFAULT_BUDGET,
};
use aspectsum::retrieval::{
    default_exemplars, retrieve_top, ExemplarQuery, SentenceEncoder, TfIdfEncoder, WordVecEncoder,
};
use aspectsum::synth::{default_aspect_specs, generate_synthetic, write_synth_output};

const DEFAULT_TOP: usize = 5;
const DEFAULT_M: usize = 3;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_DOCS: usize = 50;

/// A problem with how the command was invoked (as opposed to bad data).
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Flag value if given, else the config-file value.
fn pick<T>(flag: Option<T>, cfg: Option<T>) -> Option<T> {
    flag.or(cfg)
}

/// A value that must come from the flag or the config file.
fn require<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required (pass it or put it in --config)")))
}

#[derive(Parser)]
#[command(
    name = "aspectsum",
    version,
    about = "Aspect-oriented extractive summarization pipeline",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Rank corpus documents by similarity to an exemplar sentence.
    Retrieve(RetrieveArgs),
    /// Extract per-document tf-idf keywords from reference summaries.
    Keywords(KeywordsArgs),
    /// Label sentences with the extractive oracle to build a training set.
    BuildTraining(BuildTrainingArgs),
    /// Fit the logistic sentence scorer on a training set.
    Train(TrainArgs),
    /// Select summary sentences with a trained model or a baseline.
    Summarize(SummarizeArgs),
    /// Score predictions against multi-annotator selections.
    Evaluate(EvaluateArgs),
    /// Compare two prediction runs: Jaccard overlap and exact matches.
    Sensitivity(SensitivityArgs),
    /// Generate a deterministic synthetic aspect corpus.
    Synth(SynthArgs),
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Commands::Retrieve(a) => run_retrieve(a),
        Commands::Keywords(a) => run_keywords(a),
        Commands::BuildTraining(a) => run_build_training(a),
        Commands::Train(a) => run_train(a),
        Commands::Summarize(a) => run_summarize(a),
        Commands::Evaluate(a) => run_evaluate(a),
        Commands::Sensitivity(a) => run_sensitivity(a),
        Commands::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => 0,
        Err(err) if err.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {err}");
            1
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

/// Load a partial configuration (same fields as the resolved record, all
/// optional) from --config. The subcommand tag is checked before the strict
/// field parse so a cross-wired file names its origin instead of an
/// arbitrary unknown field.
fn load_partial<T: DeserializeOwned + Default>(
    path: Option<&Path>,
    expect: &str,
) -> anyhow::Result<T> {
    #[derive(Default, Deserialize)]
    #[serde(default)]
    struct TagProbe {
        subcommand: Option<String>,
    }

    let Some(path) = path else {
        return Ok(T::default());
    };
    let raw = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let probe: TagProbe = serde_json::from_str(&raw)
        .with_context(|| format!("parsing config {}", path.display()))?;
    if let Some(tag) = probe.subcommand {
        if tag != expect {
            bail!(
                "config {} was written by `{tag}`, not `{expect}`",
                path.display()
            );
        }
    }
    serde_json::from_str(&raw).with_context(|| format!("parsing config {}", path.display()))
}

/// Write `text` to the path, or to stdout when none is given. Returns true
/// when stdout was used.
fn write_text(out: Option<&Path>, text: &str) -> anyhow::Result<bool> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            Ok(false)
        }
        None => {
            print!("{text}");
            Ok(true)
        }
    }
}

/// Record the resolved configuration: `<out>.config.json` next to a file
/// output, or one JSON line on stderr when the report went to stdout.
fn emit_resolved<T: Serialize>(resolved: &T, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let cfg_path = PathBuf::from(format!("{}.config.json", path.display()));
            let text = serde_json::to_string_pretty(resolved).expect("config serializes");
            fs::write(&cfg_path, text + "\n")
                .with_context(|| format!("writing {}", cfg_path.display()))?;
        }
        None => eprintln!(
            "{}",
            serde_json::to_string(resolved).expect("config serializes")
        ),
    }
    Ok(())
}

fn load_table(vectors: Option<&Path>) -> anyhow::Result<EmbeddingTable> {
    match vectors {
        Some(path) => Ok(load_word_vectors(path)?),
        None => Ok(EmbeddingTable::empty()),
    }
}

fn read_corpus(path: &Path) -> anyhow::Result<Corpus> {
    Ok(load_corpus(path)?)
}

/// Per-document selected index sets from a predictions file; duplicate
/// document ids are an error.
fn selection_map(records: &[SummaryRecord]) -> anyhow::Result<BTreeMap<String, BTreeSet<usize>>> {
    let mut map = BTreeMap::new();
    for r in records {
        let set: BTreeSet<usize> = r.indices.iter().copied().collect();
        if map.insert(r.doc_id.clone(), set).is_some() {
            bail!("duplicate prediction for document {:?}", r.doc_id);
        }
    }
    Ok(map)
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    out.push('\n');
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// retrieve

#[derive(Args)]
struct RetrieveArgs {
    /// Corpus JSONL file.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Exemplar sentence; omit to run every built-in domain exemplar.
    #[arg(long, value_name = "TEXT")]
    exemplar: Option<String>,
    /// How many documents to return.
    #[arg(long, value_name = "K")]
    top: Option<usize>,
    /// Word-vector file; omit to encode sentences with corpus tf-idf.
    #[arg(long, value_name = "FILE")]
    vectors: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print a table instead of JSON on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RetrieveConfig {
    subcommand: Option<String>,
    corpus: Option<PathBuf>,
    exemplar: Option<String>,
    top: Option<usize>,
    vectors: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RetrieveResolved {
    subcommand: &'static str,
    corpus: PathBuf,
    exemplar: Option<String>,
    top: usize,
    vectors: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScoredDoc {
    id: String,
    score: f64,
}

fn run_retrieve(args: RetrieveArgs) -> anyhow::Result<()> {
    let cfg: RetrieveConfig = load_partial(args.config.as_deref(), "retrieve")?;
    let resolved = RetrieveResolved {
        subcommand: "retrieve",
        corpus: require(pick(args.corpus, cfg.corpus), "corpus")?,
        exemplar: pick(args.exemplar, cfg.exemplar),
        top: pick(args.top, cfg.top).unwrap_or(DEFAULT_TOP),
        vectors: pick(args.vectors, cfg.vectors),
        out: pick(args.out, cfg.out),
    };

    let corpus = read_corpus(&resolved.corpus)?;
    let table;
    let encoder: Box<dyn SentenceEncoder> = match &resolved.vectors {
        Some(path) => {
            table = load_word_vectors(path)?;
            Box::new(WordVecEncoder::new(&table))
        }
        None => Box::new(TfIdfEncoder::new(&build_idf(&corpus)?)),
    };
    let queries = match &resolved.exemplar {
        Some(text) => vec![ExemplarQuery::new(text.clone(), "query")?],
        None => default_exemplars(),
    };

    let mut ranked: Vec<(String, Vec<ScoredDoc>)> = Vec::new();
    for query in &queries {
        let rows = retrieve_top(&corpus, query, resolved.top, encoder.as_ref())?
            .into_iter()
            .map(|(id, score)| ScoredDoc { id, score })
            .collect();
        ranked.push((query.domain_label.clone(), rows));
    }

    // One explicit exemplar -> plain list; built-in exemplars -> an object
    // keyed by domain label.
    let json = if resolved.exemplar.is_some() {
        serde_json::to_string_pretty(&ranked[0].1).expect("rows serialize")
    } else {
        let map: BTreeMap<&str, &Vec<ScoredDoc>> =
            ranked.iter().map(|(l, r)| (l.as_str(), r)).collect();
        serde_json::to_string_pretty(&map).expect("rows serialize")
    } + "\n";

    if args.pretty && resolved.out.is_none() {
        let rows: Vec<Vec<String>> = ranked
            .iter()
            .flat_map(|(label, docs)| {
                docs.iter().map(move |d| {
                    vec![label.clone(), d.id.clone(), format!("{:.6}", d.score)]
                })
            })
            .collect();
        print!("{}", render_table(&["exemplar", "id", "score"], &rows));
    } else {
        write_text(resolved.out.as_deref(), &json)?;
    }
    emit_resolved(&resolved, resolved.out.as_deref())
}

// ---------------------------------------------------------------------------
// keywords

#[derive(Args)]
struct KeywordsArgs {
    /// Corpus JSONL file (documents need reference summaries).
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Keep at most this many keywords per document.
    #[arg(long, value_name = "N")]
    max_k: Option<usize>,
    /// Output path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print a table instead of JSONL on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct KeywordsConfig {
    subcommand: Option<String>,
    corpus: Option<PathBuf>,
    max_k: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct KeywordsResolved {
    subcommand: &'static str,
    corpus: PathBuf,
    max_k: usize,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct KeywordLine<'a> {
    id: &'a str,
    keywords: &'a [String],
}

fn run_keywords(args: KeywordsArgs) -> anyhow::Result<()> {
    let cfg: KeywordsConfig = load_partial(args.config.as_deref(), "keywords")?;
    let resolved = KeywordsResolved {
        subcommand: "keywords",
        corpus: require(pick(args.corpus, cfg.corpus), "corpus")?,
        max_k: pick(args.max_k, cfg.max_k).unwrap_or(DEFAULT_MAX_K),
        out: pick(args.out, cfg.out),
    };

    let corpus = read_corpus(&resolved.corpus)?;
    let idf = build_idf(&corpus)?;
    let mut lines = String::new();
    let mut sets: Vec<(String, Vec<String>)> = Vec::new();
    let mut skipped = 0usize;
    for doc in &corpus.documents {
        match extract_keywords(doc, &idf, resolved.max_k) {
            Ok(set) => {
                let line = KeywordLine {
                    id: &doc.id,
                    keywords: &set.keywords,
                };
                lines.push_str(&serde_json::to_string(&line).expect("line serializes"));
                lines.push('\n');
                sets.push((doc.id.clone(), set.keywords));
            }
            Err(LibError::MissingReference { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} document(s) without a reference summary");
    }

    if args.pretty && resolved.out.is_none() {
        let rows: Vec<Vec<String>> = sets
            .iter()
            .map(|(id, kws)| vec![id.clone(), kws.join(", ")])
            .collect();
        print!("{}", render_table(&["id", "keywords"], &rows));
    } else {
        write_text(resolved.out.as_deref(), &lines)?;
    }
    emit_resolved(&resolved, resolved.out.as_deref())
}

// ---------------------------------------------------------------------------
// build-training

#[derive(Args)]
struct BuildTrainingArgs {
    /// Corpus JSONL file.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Keyword intensity: appended keyword tokens total about r times the
    /// reference length.
    #[arg(long, value_name = "X")]
    r: Option<f64>,
    /// Oracle similarity scorer: rouge2 or embed.
    #[arg(long, value_name = "NAME", value_parser = parse_scorer)]
    scorer: Option<ScorerKind>,
    /// Word-vector file backing the embed scorer.
    #[arg(long, value_name = "FILE")]
    vectors: Option<PathBuf>,
    /// Also emit a keywordless example per document (the default).
    #[arg(long, conflicts_with = "no_mixed")]
    mixed: bool,
    /// Emit only keyword-conditioned examples.
    #[arg(long)]
    no_mixed: bool,
    /// Oracle sentence budget.
    #[arg(long, value_name = "B")]
    budget: Option<usize>,
    /// Keywords extracted per document.
    #[arg(long, value_name = "K")]
    max_k: Option<usize>,
    /// Output JSONL path (required).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

fn parse_scorer(s: &str) -> Result<ScorerKind, String> {
    ScorerKind::from_str(s).map_err(|e| e.to_string())
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BuildTrainingConfig {
    subcommand: Option<String>,
    corpus: Option<PathBuf>,
    r: Option<f64>,
    scorer: Option<ScorerKind>,
    vectors: Option<PathBuf>,
    mixed: Option<bool>,
    budget: Option<usize>,
    max_k: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BuildTrainingResolved {
    subcommand: &'static str,
    corpus: PathBuf,
    r: f64,
    scorer: ScorerKind,
    vectors: Option<PathBuf>,
    mixed: bool,
    budget: usize,
    max_k: usize,
    out: PathBuf,
}

#[derive(Serialize)]
struct BuildSummary {
    examples: usize,
    docs_total: usize,
    docs_used: usize,
    docs_skipped_no_reference: usize,
    docs_with_empty_keywords: usize,
}

fn run_build_training(args: BuildTrainingArgs) -> anyhow::Result<()> {
    let cfg: BuildTrainingConfig = load_partial(args.config.as_deref(), "build-training")?;
    let mixed_flag = match (args.mixed, args.no_mixed) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    };
    let resolved = BuildTrainingResolved {
        subcommand: "build-training",
        corpus: require(pick(args.corpus, cfg.corpus), "corpus")?,
        r: pick(args.r, cfg.r).unwrap_or(1.0),
        scorer: pick(args.scorer, cfg.scorer).unwrap_or(ScorerKind::Rouge2),
        vectors: pick(args.vectors, cfg.vectors),
        mixed: pick(mixed_flag, cfg.mixed).unwrap_or(true),
        budget: pick(args.budget, cfg.budget).unwrap_or(DEFAULT_BUDGET),
        max_k: pick(args.max_k, cfg.max_k).unwrap_or(DEFAULT_MAX_K),
        out: require(pick(args.out, cfg.out), "out")?,
    };

    let corpus = read_corpus(&resolved.corpus)?;
    let table = load_table(resolved.vectors.as_deref())?;
    let scorer = scorer_for(resolved.scorer, &table);
    let opts = BuildOptions {
        r: resolved.r,
        mixed: resolved.mixed,
        budget: resolved.budget,
        max_k: resolved.max_k,
    };
    let report = build_training_set(&corpus, scorer.as_ref(), &opts)?;
    save_training_examples(&report.examples, &resolved.out)?;
    let summary = BuildSummary {
        examples: report.examples.len(),
        docs_total: report.docs_total,
        docs_used: report.docs_used,
        docs_skipped_no_reference: report.docs_skipped_no_reference,
        docs_with_empty_keywords: report.docs_with_empty_keywords,
    };
    eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    emit_resolved(&resolved, Some(&resolved.out))
}

// ---------------------------------------------------------------------------
// train

#[derive(Args)]
struct TrainArgs {
    /// Training examples JSONL (from build-training).
    #[arg(long, value_name = "FILE")]
    training: Option<PathBuf>,
    /// Corpus JSONL the examples refer to.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    #[arg(long, value_name = "X")]
    learning_rate: Option<f64>,
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,
    #[arg(long, value_name = "X")]
    l2: Option<f64>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Word-vector file for keyword-similarity features.
    #[arg(long, value_name = "FILE")]
    vectors: Option<PathBuf>,
    /// Model JSON output path (required).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainCliConfig {
    subcommand: Option<String>,
    training: Option<PathBuf>,
    corpus: Option<PathBuf>,
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    l2: Option<f64>,
    seed: Option<u64>,
    vectors: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TrainResolved {
    subcommand: &'static str,
    training: PathBuf,
    corpus: PathBuf,
    learning_rate: f64,
    epochs: usize,
    l2: f64,
    seed: u64,
    vectors: Option<PathBuf>,
    out: PathBuf,
}

#[derive(Serialize)]
struct TrainSummary {
    examples: usize,
    epochs: usize,
    initial_loss: f64,
    final_loss: Option<f64>,
}

fn run_train(args: TrainArgs) -> anyhow::Result<()> {
    let cfg: TrainCliConfig = load_partial(args.config.as_deref(), "train")?;
    let defaults = TrainConfig::default();
    let resolved = TrainResolved {
        subcommand: "train",
        training: require(pick(args.training, cfg.training), "training")?,
        corpus: require(pick(args.corpus, cfg.corpus), "corpus")?,
        learning_rate: pick(args.learning_rate, cfg.learning_rate)
            .unwrap_or(defaults.learning_rate),
        epochs: pick(args.epochs, cfg.epochs).unwrap_or(defaults.epochs),
        l2: pick(args.l2, cfg.l2).unwrap_or(defaults.l2),
        seed: pick(args.seed, cfg.seed).unwrap_or(defaults.seed),
        vectors: pick(args.vectors, cfg.vectors),
        out: require(pick(args.out, cfg.out), "out")?,
    };

    let examples = load_training_examples(&resolved.training)?;
    let corpus = read_corpus(&resolved.corpus)?;
    let table = load_table(resolved.vectors.as_deref())?;
    let train_config = TrainConfig {
        learning_rate: resolved.learning_rate,
        epochs: resolved.epochs,
        l2: resolved.l2,
        seed: resolved.seed,
    };
    let outcome = aspectsum::model::train(&examples, &corpus, &table, &train_config)?;
    save_model(&outcome.model, &resolved.out)?;
    let summary = TrainSummary {
        examples: examples.len(),
        epochs: outcome.loss_by_epoch.len().saturating_sub(1),
        initial_loss: outcome.loss_by_epoch[0],
        final_loss: outcome.model.final_loss,
    };
    eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    emit_resolved(&resolved, Some(&resolved.out))
}

// ---------------------------------------------------------------------------
// summarize

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BaselineKind {
    Keyword,
    Lead,
    Stdref,
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "keyword" => Ok(BaselineKind::Keyword),
            "lead" => Ok(BaselineKind::Lead),
            "stdref" => Ok(BaselineKind::Stdref),
            other => Err(format!(
                "unknown baseline {other:?}; expected keyword, lead, or stdref"
            )),
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::Keyword => "keyword",
            BaselineKind::Lead => "lead",
            BaselineKind::Stdref => "stdref",
        })
    }
}

#[derive(Args)]
struct SummarizeArgs {
    /// Corpus JSONL file.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Trained model JSON (mutually exclusive with --baseline).
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Baseline selector: keyword, lead, or stdref.
    #[arg(long, value_name = "NAME", value_parser = BaselineKind::from_str)]
    baseline: Option<BaselineKind>,
    /// Comma-separated aspect keywords (empty for keywordless runs).
    #[arg(long, value_name = "LIST")]
    keywords: Option<String>,
    /// Sentences to select per document.
    #[arg(long, value_name = "N")]
    m: Option<usize>,
    /// Word-vector file for keyword-similarity features.
    #[arg(long, value_name = "FILE")]
    vectors: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print a table instead of JSONL on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SummarizeConfig {
    subcommand: Option<String>,
    corpus: Option<PathBuf>,
    model: Option<PathBuf>,
    baseline: Option<BaselineKind>,
    keywords: Option<String>,
    m: Option<usize>,
    vectors: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SummarizeResolved {
    subcommand: &'static str,
    corpus: PathBuf,
    model: Option<PathBuf>,
    baseline: Option<BaselineKind>,
    keywords: Option<String>,
    m: usize,
    vectors: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn run_summarize(args: SummarizeArgs) -> anyhow::Result<()> {
    let cfg: SummarizeConfig = load_partial(args.config.as_deref(), "summarize")?;
    let resolved = SummarizeResolved {
        subcommand: "summarize",
        corpus: require(pick(args.corpus, cfg.corpus), "corpus")?,
        model: pick(args.model, cfg.model),
        baseline: pick(args.baseline, cfg.baseline),
        keywords: pick(args.keywords, cfg.keywords),
        m: pick(args.m, cfg.m).unwrap_or(DEFAULT_M),
        vectors: pick(args.vectors, cfg.vectors),
        out: pick(args.out, cfg.out),
    };
    if resolved.m == 0 {
        return Err(usage("--m must be at least 1"));
    }

    let corpus = read_corpus(&resolved.corpus)?;
    let keyword_list = resolved.keywords.as_deref().unwrap_or("");
    let keywords = KeywordSet::new("query", keyword_list.split(','));

    let records: Vec<SummaryRecord> = match (&resolved.model, resolved.baseline) {
        (Some(_), Some(_)) => {
            return Err(usage("--model and --baseline are mutually exclusive"));
        }
        (None, None) => {
            return Err(usage("pass either --model or --baseline"));
        }
        (Some(model_path), None) => {
            let model = load_model(model_path)?;
            let idf = build_idf(&corpus)?;
            let table = load_table(resolved.vectors.as_deref())?;
            corpus
                .documents
                .iter()
                .map(|doc| {
                    let indices = predict(&model, doc, &keywords, &idf, &table, resolved.m)?;
                    Ok(record_for(doc, indices))
                })
                .collect::<anyhow::Result<_>>()?
        }
        (None, Some(kind)) => corpus
            .documents
            .iter()
            .map(|doc| {
                let indices = match kind {
                    BaselineKind::Keyword => {
                        aspectsum::baselines::keyword_match_baseline(doc, &keywords, resolved.m)
                    }
                    BaselineKind::Lead => aspectsum::baselines::lead_baseline(doc, resolved.m),
                    BaselineKind::Stdref => std_ref_oracle(doc, &Rouge2Scorer, resolved.m)?,
                };
                Ok(record_for(doc, indices))
            })
            .collect::<anyhow::Result<_>>()?,
    };

    if args.pretty && resolved.out.is_none() {
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| {
                vec![
                    r.doc_id.clone(),
                    format!("{:?}", r.indices),
                    r.text.replace('\n', " / "),
                ]
            })
            .collect();
        print!("{}", render_table(&["doc_id", "indices", "summary"], &rows));
    } else {
        match resolved.out.as_deref() {
            Some(path) => save_summaries(&records, path)?,
            None => print!("{}", summaries_to_jsonl(&records)),
        }
    }
    emit_resolved(&resolved, resolved.out.as_deref())
}

fn record_for(doc: &aspectsum::corpus::Document, indices: Vec<usize>) -> SummaryRecord {
    let text = indices
        .iter()
        .map(|&i| doc.sentences[i].text.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    SummaryRecord {
        doc_id: doc.id.clone(),
        indices,
        text,
    }
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Args)]
struct EvaluateArgs {
    /// Predictions JSONL (from summarize).
    #[arg(long, value_name = "FILE")]
    pred: Option<PathBuf>,
    /// Annotation records JSONL.
    #[arg(long, value_name = "FILE")]
    annotations: Option<PathBuf>,
    /// Corpus JSONL (sentence text backs the ROUGE scores).
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Reference selection size for the max-F1 bound.
    #[arg(long, value_name = "N")]
    m: Option<usize>,
    /// Keep only annotators whose id starts with "LABEL:".
    #[arg(long, value_name = "LABEL")]
    aspect: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print a table instead of JSON on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvaluateConfig {
    subcommand: Option<String>,
    pred: Option<PathBuf>,
    annotations: Option<PathBuf>,
    corpus: Option<PathBuf>,
    m: Option<usize>,
    aspect: Option<String>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvaluateResolved {
    subcommand: &'static str,
    pred: PathBuf,
    annotations: PathBuf,
    corpus: PathBuf,
    m: usize,
    aspect: Option<String>,
    out: Option<PathBuf>,
}

fn run_evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let cfg: EvaluateConfig = load_partial(args.config.as_deref(), "evaluate")?;
    let resolved = EvaluateResolved {
        subcommand: "evaluate",
        pred: require(pick(args.pred, cfg.pred), "pred")?,
        annotations: require(pick(args.annotations, cfg.annotations), "annotations")?,
        corpus: require(pick(args.corpus, cfg.corpus), "corpus")?,
        m: pick(args.m, cfg.m).unwrap_or(DEFAULT_M),
        aspect: pick(args.aspect, cfg.aspect),
        out: pick(args.out, cfg.out),
    };

    let corpus = read_corpus(&resolved.corpus)?;
    let predictions = selection_map(&load_summaries(&resolved.pred)?)?;
    let mut records = load_annotations(&resolved.annotations)?;
    if let Some(aspect) = &resolved.aspect {
        let prefix = format!("{aspect}:");
        records.retain(|r| r.annotator_id.starts_with(&prefix));
        if records.is_empty() {
            bail!("no annotators with ids starting {prefix:?} in {}", resolved.annotations.display());
        }
    }
    let report = evaluate(&corpus, &records, &predictions, resolved.m)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";

    if args.pretty && resolved.out.is_none() {
        let rows = vec![
            vec!["docs_evaluated".into(), report.docs_evaluated.to_string()],
            vec!["docs_skipped".into(), report.docs_skipped.to_string()],
            vec![
                "annotators_discarded".into(),
                report.annotators_discarded.to_string(),
            ],
            vec!["mean_f1".into(), format!("{:.4}", report.mean_f1)],
            vec!["mean_max_f1".into(), format!("{:.4}", report.mean_max_f1)],
            vec!["rouge1".into(), format!("{:.4}", report.rouge1)],
            vec!["rouge2".into(), format!("{:.4}", report.rouge2)],
            vec!["rouge_l".into(), format!("{:.4}", report.rouge_l)],
        ];
        print!("{}", render_table(&["metric", "value"], &rows));
    } else {
        write_text(resolved.out.as_deref(), &json)?;
    }
    emit_resolved(&resolved, resolved.out.as_deref())
}

// ---------------------------------------------------------------------------
// sensitivity

#[derive(Args)]
struct SensitivityArgs {
    /// First predictions JSONL.
    #[arg(long, value_name = "FILE")]
    pred_a: Option<PathBuf>,
    /// Second predictions JSONL over the same documents.
    #[arg(long, value_name = "FILE")]
    pred_b: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print a table instead of JSON on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SensitivityConfig {
    subcommand: Option<String>,
    pred_a: Option<PathBuf>,
    pred_b: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SensitivityResolved {
    subcommand: &'static str,
    pred_a: PathBuf,
    pred_b: PathBuf,
    out: Option<PathBuf>,
}

fn run_sensitivity(args: SensitivityArgs) -> anyhow::Result<()> {
    let cfg: SensitivityConfig = load_partial(args.config.as_deref(), "sensitivity")?;
    let resolved = SensitivityResolved {
        subcommand: "sensitivity",
        pred_a: require(pick(args.pred_a, cfg.pred_a), "pred-a")?,
        pred_b: require(pick(args.pred_b, cfg.pred_b), "pred-b")?,
        out: pick(args.out, cfg.out),
    };

    let run_a = selection_map(&load_summaries(&resolved.pred_a)?)?;
    let run_b = selection_map(&load_summaries(&resolved.pred_b)?)?;
    let report = sensitivity_report(&run_a, &run_b)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";

    if args.pretty && resolved.out.is_none() {
        let rows = vec![
            vec!["docs".into(), report.docs.to_string()],
            vec!["mean_jaccard".into(), format!("{:.4}", report.mean_jaccard)],
            vec![
                "exact_match_percent".into(),
                format!("{:.4}", report.exact_match_percent),
            ],
        ];
        print!("{}", render_table(&["metric", "value"], &rows));
    } else {
        write_text(resolved.out.as_deref(), &json)?;
    }
    emit_resolved(&resolved, resolved.out.as_deref())
}

// ---------------------------------------------------------------------------
// synth

#[derive(Args)]
struct SynthArgs {
    /// Generator seed.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Documents to generate.
    #[arg(long, value_name = "N")]
    docs: Option<usize>,
    /// Directory receiving corpus.jsonl, annotations.jsonl, aspects.json.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// JSON config supplying any flag not passed explicitly.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SynthConfig {
    subcommand: Option<String>,
    seed: Option<u64>,
    docs: Option<usize>,
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct SynthResolved {
    subcommand: &'static str,
    seed: u64,
    docs: usize,
    out_dir: PathBuf,
}

fn run_synth(args: SynthArgs) -> anyhow::Result<()> {
    let cfg: SynthConfig = load_partial(args.config.as_deref(), "synth")?;
    let resolved = SynthResolved {
        subcommand: "synth",
        seed: pick(args.seed, cfg.seed).unwrap_or(DEFAULT_SEED),
        docs: pick(args.docs, cfg.docs).unwrap_or(DEFAULT_DOCS),
        out_dir: require(pick(args.out_dir, cfg.out_dir), "out-dir")?,
    };

    let (aspects, filler) = default_aspect_specs();
    let output = generate_synthetic(resolved.seed, resolved.docs, &aspects, &filler)?;
    write_synth_output(&output, &resolved.out_dir)?;
    let cfg_path = resolved.out_dir.join("config.json");
    let text = serde_json::to_string_pretty(&resolved).expect("config serializes") + "\n";
    fs::write(&cfg_path, text).with_context(|| format!("writing {}", cfg_path.display()))?;
    eprintln!(
        "wrote {} documents to {}",
        output.corpus.len(),
        resolved.out_dir.display()
    );
    Ok(())
}
