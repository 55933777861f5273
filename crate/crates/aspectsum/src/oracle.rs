//! Extractive oracle labels: pick the sentence subset that maximizes a
//! similarity scorer against a (possibly keyword-augmented) reference, then
//! emit training examples.

use std::fs;
use std::io::{BufRead, BufReader, Write as IoWrite};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::eval::rouge_n_fraction;
use crate::keywords::{build_idf, extract_keywords, KeywordSet};

/// Default sentence budget for oracle summaries.
pub const DEFAULT_BUDGET: usize = 3;

/// Per-sentence keep/drop decisions for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionVector {
    bits: Vec<bool>,
    budget: usize,
}

impl SelectionVector {
    /// `bits` must not select more sentences than `budget`.
    pub fn new(bits: Vec<bool>, budget: usize) -> Result<Self> {
        let count = bits.iter().filter(|&&b| b).count();
        if count > budget {
            return Err(Error::InvalidInput(format!(
                "selection of {count} sentences exceeds budget {budget}"
            )));
        }
        Ok(SelectionVector { bits, budget })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn is_selected(&self, index: usize) -> bool {
        self.bits.get(index).copied().unwrap_or(false)
    }

    pub fn selected_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Selected sentence indices in document order.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    /// 0/1 view used by the training JSONL format.
    pub fn as_binary(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }
}

/// Similarity between a candidate token sequence and a target token sequence,
/// in [0,1]. Implementations must be deterministic and score identical
/// nonempty sequences as 1.
pub trait SimilarityScorer: Sync {
    fn score(&self, candidate: &[&str], target: &[&str]) -> f64;
}

/// Bigram-overlap F1.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rouge2Scorer;

impl SimilarityScorer for Rouge2Scorer {
    fn score(&self, candidate: &[&str], target: &[&str]) -> f64 {
        score_rouge2(candidate, target)
    }
}

/// Greedy token-matching score over a word-vector table, with exact-match
/// fallback for tokens the table does not cover.
#[derive(Debug, Clone, Copy)]
pub struct EmbedScorer<'a> {
    table: &'a EmbeddingTable,
}

impl<'a> EmbedScorer<'a> {
    pub fn new(table: &'a EmbeddingTable) -> Self {
        EmbedScorer { table }
    }
}

impl SimilarityScorer for EmbedScorer<'_> {
    fn score(&self, candidate: &[&str], target: &[&str]) -> f64 {
        score_embed(candidate, target, self.table)
    }
}

/// Which similarity scorer drives oracle construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Rouge2,
    Embed,
}

impl FromStr for ScorerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rouge2" => Ok(ScorerKind::Rouge2),
            "embed" => Ok(ScorerKind::Embed),
            other => Err(Error::InvalidInput(format!(
                "unknown scorer {other:?}; expected rouge2 or embed"
            ))),
        }
    }
}

impl std::fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScorerKind::Rouge2 => "rouge2",
            ScorerKind::Embed => "embed",
        })
    }
}

/// Materialize a scorer. The embed scorer borrows the table; pass
/// `EmbeddingTable::empty()` to get pure exact-match semantics.
pub fn scorer_for(kind: ScorerKind, table: &EmbeddingTable) -> Box<dyn SimilarityScorer + '_> {
    match kind {
        ScorerKind::Rouge2 => Box::new(Rouge2Scorer),
        ScorerKind::Embed => Box::new(EmbedScorer::new(table)),
    }
}

/// Bigram-overlap F1 in [0,1]; 0 when either side has no bigram.
pub fn score_rouge2(candidate: &[&str], target: &[&str]) -> f64 {
    rouge_n_fraction(candidate, target, 2)
}

/// Greedy-matching F1 in [0,1]: precision is the mean over candidate tokens
/// of the best similarity to any target token, recall the mirror image, and
/// the score their harmonic mean clamped to [0,1]. Either side empty gives 0.
pub fn score_embed(candidate: &[&str], target: &[&str], table: &EmbeddingTable) -> f64 {
    if candidate.is_empty() || target.is_empty() {
        return 0.0;
    }
    let best_against = |tokens: &[&str], others: &[&str]| -> f64 {
        tokens
            .iter()
            .map(|a| {
                others
                    .iter()
                    .map(|b| table.token_similarity(a, b))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum::<f64>()
            / tokens.len() as f64
    };
    let p = best_against(candidate, target);
    let r = best_against(target, candidate);
    if p + r <= 0.0 {
        return 0.0;
    }
    (2.0 * p * r / (p + r)).clamp(0.0, 1.0)
}

/// Copies of each keyword to append: round-half-up of
/// r * summary_tokens / num_keywords, floored at 1 (r must be positive).
pub fn keyword_repeat_count(summary_tokens: usize, num_keywords: usize, r: f64) -> Result<usize> {
    if num_keywords == 0 {
        return Err(Error::NoKeywords);
    }
    assert!(r > 0.0, "keyword intensity must be positive");
    let raw = r * summary_tokens as f64 / num_keywords as f64;
    let rounded = (raw + 0.5).floor() as usize;
    Ok(rounded.max(1))
}

/// Append each keyword's tokens, repeated `keyword_repeat_count` times and
/// grouped per keyword, after the summary tokens.
pub fn augment_reference(
    summary_tokens: &[String],
    keywords: &KeywordSet,
    r: f64,
) -> Result<Vec<String>> {
    if keywords.is_empty() {
        return Err(Error::NoKeywords);
    }
    let n = keyword_repeat_count(summary_tokens.len(), keywords.len(), r)?;
    let mut out = summary_tokens.to_vec();
    for keyword in &keywords.keywords {
        let toks = crate::corpus::tokenize(keyword);
        for _ in 0..n {
            out.extend(toks.iter().cloned());
        }
    }
    Ok(out)
}

fn selection_tokens<'a>(doc: &'a Document, selected: &[bool]) -> Vec<&'a str> {
    doc.sentences
        .iter()
        .filter(|s| selected[s.index])
        .flat_map(|s| s.tokens.iter().map(String::as_str))
        .collect()
}

/// Greedy oracle with its accepted-score trajectory.
///
/// Starting empty, repeatedly add the sentence that most improves
/// `scorer(selected tokens in document order, target)`; stop at the budget or
/// when no addition strictly improves the score. Ties go to the lower index.
pub fn greedy_oracle_with_scores(
    doc: &Document,
    target: &[String],
    scorer: &dyn SimilarityScorer,
    budget: usize,
) -> (SelectionVector, Vec<f64>) {
    assert!(budget >= 1, "budget must be >= 1");
    let target_refs: Vec<&str> = target.iter().map(String::as_str).collect();
    let m = doc.sentences.len();
    let mut selected = vec![false; m];
    let mut trajectory = Vec::new();
    let mut current = 0.0;

    for _ in 0..budget {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            if selected[i] {
                continue;
            }
            selected[i] = true;
            let score = scorer.score(&selection_tokens(doc, &selected), &target_refs);
            selected[i] = false;
            if score > current && best.is_none_or(|(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        match best {
            Some((i, score)) => {
                selected[i] = true;
                current = score;
                trajectory.push(score);
            }
            None => break,
        }
    }

    let vector = SelectionVector::new(selected, budget).expect("greedy respects its budget");
    (vector, trajectory)
}

/// `greedy_oracle_with_scores` without the trajectory.
pub fn greedy_oracle(
    doc: &Document,
    target: &[String],
    scorer: &dyn SimilarityScorer,
    budget: usize,
) -> SelectionVector {
    greedy_oracle_with_scores(doc, target, scorer, budget).0
}

/// Best scorer value over every sentence subset of size <= budget, by full
/// enumeration. Bounded to 20 sentences.
pub fn exhaustive_oracle_score(
    doc: &Document,
    target: &[String],
    scorer: &dyn SimilarityScorer,
    budget: usize,
) -> Result<f64> {
    let m = doc.sentences.len();
    if m > 20 {
        return Err(Error::EnumerationTooLarge {
            n_sentences: m,
            limit: 20,
        });
    }
    let target_refs: Vec<&str> = target.iter().map(String::as_str).collect();
    let mut best = 0.0f64;
    let mut selected = vec![false; m];
    fn recurse(
        start: usize,
        remaining: usize,
        selected: &mut Vec<bool>,
        doc: &Document,
        target: &[&str],
        scorer: &dyn SimilarityScorer,
        best: &mut f64,
    ) {
        let score = scorer.score(&selection_tokens(doc, selected), target);
        if score > *best {
            *best = score;
        }
        if remaining == 0 {
            return;
        }
        for i in start..selected.len() {
            selected[i] = true;
            recurse(i + 1, remaining - 1, selected, doc, target, scorer, best);
            selected[i] = false;
        }
    }
    recurse(0, budget.min(m), &mut selected, doc, &target_refs, scorer, &mut best);
    Ok(best)
}

/// One supervised example: a document id, the keywords the model will be
/// conditioned on (possibly none), and the oracle selection.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub doc_id: String,
    pub keywords: Vec<String>,
    pub labels: SelectionVector,
}

#[derive(Serialize, Deserialize)]
struct TrainingExampleJson {
    doc_id: String,
    keywords: Vec<String>,
    labels: Vec<u8>,
}

/// Serialize examples as JSONL `{"doc_id","keywords","labels":[0/1]}` lines.
pub fn training_examples_to_jsonl(examples: &[TrainingExample]) -> String {
    let mut out = String::new();
    for ex in examples {
        let json = TrainingExampleJson {
            doc_id: ex.doc_id.clone(),
            keywords: ex.keywords.clone(),
            labels: ex.labels.as_binary(),
        };
        out.push_str(&serde_json::to_string(&json).expect("training example serializes"));
        out.push('\n');
    }
    out
}

pub fn save_training_examples(examples: &[TrainingExample], path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(training_examples_to_jsonl(examples).as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Load training examples. Label vectors must be strictly 0/1; the budget of
/// each loaded selection is reconstructed as its selected count.
pub fn load_training_examples(path: &Path) -> Result<Vec<TrainingExample>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: TrainingExampleJson =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: e.to_string(),
            })?;
        if raw.labels.iter().any(|&v| v > 1) {
            return Err(Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: "labels must be 0 or 1".into(),
            });
        }
        let bits: Vec<bool> = raw.labels.iter().map(|&v| v == 1).collect();
        let budget = bits.iter().filter(|&&b| b).count();
        out.push(TrainingExample {
            doc_id: raw.doc_id,
            keywords: raw.keywords,
            labels: SelectionVector::new(bits, budget)?,
        });
    }
    Ok(out)
}

/// Knobs for training-set construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Keyword intensity: appended keyword tokens total about r times the
    /// summary length.
    pub r: f64,
    /// Also emit a keywordless example per document.
    pub mixed: bool,
    pub budget: usize,
    pub max_k: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            r: 1.0,
            mixed: true,
            budget: DEFAULT_BUDGET,
            max_k: crate::keywords::DEFAULT_MAX_K,
        }
    }
}

/// Result of building a training set over a corpus.
#[derive(Debug, Clone)]
pub struct BuildReport {
    pub examples: Vec<TrainingExample>,
    pub docs_total: usize,
    pub docs_used: usize,
    /// Documents skipped because they carry no reference summary.
    pub docs_skipped_no_reference: usize,
    /// Documents whose keyword extraction came back empty; their keyworded
    /// example falls back to the unmodified reference.
    pub docs_with_empty_keywords: usize,
}

/// For every document with a reference: emit one example labeled by the
/// oracle against the keyword-augmented reference, plus (when mixed) one
/// keywordless example labeled against the reference alone. Keywords come
/// from tf-idf extraction over this corpus.
pub fn build_training_set(
    corpus: &Corpus,
    scorer: &dyn SimilarityScorer,
    opts: &BuildOptions,
) -> Result<BuildReport> {
    assert!(opts.budget >= 1, "budget must be >= 1");
    let idf = build_idf(corpus)?;
    let mut report = BuildReport {
        examples: Vec::new(),
        docs_total: corpus.len(),
        docs_used: 0,
        docs_skipped_no_reference: 0,
        docs_with_empty_keywords: 0,
    };

    for doc in &corpus.documents {
        let reference = match doc.reference_tokens() {
            Some(tokens) => tokens,
            None => {
                report.docs_skipped_no_reference += 1;
                continue;
            }
        };
        let keywords = extract_keywords(doc, &idf, opts.max_k)?;
        let target = if keywords.is_empty() {
            report.docs_with_empty_keywords += 1;
            reference.clone()
        } else {
            augment_reference(&reference, &keywords, opts.r)?
        };
        let labels = greedy_oracle(doc, &target, scorer, opts.budget);
        report.examples.push(TrainingExample {
            doc_id: doc.id.clone(),
            keywords: keywords.keywords.clone(),
            labels,
        });
        if opts.mixed {
            let labels = greedy_oracle(doc, &reference, scorer, opts.budget);
            report.examples.push(TrainingExample {
                doc_id: doc.id.clone(),
                keywords: Vec::new(),
                labels,
            });
        }
        report.docs_used += 1;
    }
    Ok(report)
}
