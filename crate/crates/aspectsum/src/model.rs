//! Keyword-conditioned sentence scorer: hand-rolled logistic regression over
//! a fixed 9-feature representation of (document, keywords, sentence).
//!
//! The interface is encoder-agnostic: anything that maps training examples to
//! per-sentence probabilities could replace the logistic model without
//! touching callers.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write as IoWrite};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::keywords::{IdfTable, KeywordSet};
use crate::oracle::TrainingExample;

pub const FEATURE_DIM: usize = 9;

/// Names for each feature slot, in order. Serialized into model files so a
/// stored weight vector stays interpretable.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "bias",
    "position",
    "keyword_match_rate",
    "keyword_max_sim",
    "keyword_mean_sim",
    "tfidf_salience",
    "centroid_cosine",
    "log_length",
    "has_keywords",
];

/// Fixed-order feature values for one sentence in context.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

fn sparse_tfidf(tokens: &[String], idf: &IdfTable) -> BTreeMap<String, f64> {
    let mut tf: BTreeMap<String, f64> = BTreeMap::new();
    for t in tokens {
        *tf.entry(t.clone()).or_insert(0.0) += 1.0;
    }
    for (t, v) in tf.iter_mut() {
        *v *= idf.idf(t);
    }
    tf
}

fn sparse_cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(t, &v)| b.get(t).map(|&w| v * w))
        .sum();
    let na: f64 = a.values().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Featurize sentence `i` of a document given a (possibly empty) keyword set.
///
/// An empty keyword set zeroes the three keyword features and the
/// has-keywords flag, which is what makes one model serve both generic and
/// keyword-conditioned summarization.
pub fn featurize(
    doc: &Document,
    keywords: &KeywordSet,
    idf: &IdfTable,
    emb: &EmbeddingTable,
    i: usize,
) -> Result<FeatureVector> {
    let n = doc.sentences.len();
    if i >= n {
        return Err(Error::InvalidInput(format!(
            "sentence index {i} out of range for document {:?} with {n} sentences",
            doc.id
        )));
    }
    let tokens = &doc.sentences[i].tokens;
    let len = tokens.len();
    let position = i as f64 / n as f64;

    let kw_tokens = keywords.tokens();
    let (match_rate, max_sim, mean_sim) = if kw_tokens.is_empty() || len == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let matches = tokens
            .iter()
            .filter(|t| kw_tokens.iter().any(|k| k == *t))
            .count();
        let best_for = |k: &str| {
            tokens
                .iter()
                .map(|t| emb.token_similarity(k, t))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let per_keyword: Vec<f64> = kw_tokens.iter().map(|k| best_for(k)).collect();
        let max_sim = per_keyword.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean_sim = per_keyword.iter().sum::<f64>() / per_keyword.len() as f64;
        (matches as f64 / len as f64, max_sim, mean_sim)
    };

    let sentence_vec = sparse_tfidf(tokens, idf);
    let salience = if len == 0 {
        0.0
    } else {
        sentence_vec.values().sum::<f64>() / len as f64
    };

    let mut centroid: BTreeMap<String, f64> = BTreeMap::new();
    for s in &doc.sentences {
        for (t, v) in sparse_tfidf(&s.tokens, idf) {
            *centroid.entry(t).or_insert(0.0) += v;
        }
    }
    for v in centroid.values_mut() {
        *v /= n as f64;
    }
    let centroid_cos = sparse_cosine(&sentence_vec, &centroid);

    Ok(FeatureVector([
        1.0,
        position,
        match_rate,
        max_sim,
        mean_sim,
        salience,
        centroid_cos,
        (1.0 + len as f64).ln(),
        if keywords.is_empty() { 0.0 } else { 1.0 },
    ]))
}

/// Training hyperparameters. The seed is recorded for provenance; training
/// itself is deterministic (zero init, full-batch descent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 300,
            l2: 1e-4,
            seed: 13,
        }
    }
}

/// A trained sentence scorer: one weight per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorerModel {
    pub weights: Vec<f64>,
    pub config: TrainConfig,
    pub final_loss: Option<f64>,
}

impl ScorerModel {
    /// Probability that sentence features `x` belong to the summary.
    pub fn probability(&self, x: &FeatureVector) -> f64 {
        sigmoid(dot(&self.weights, &x.0))
    }
}

fn dot(w: &[f64], x: &[f64; FEATURE_DIM]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy plus l2/2 * ||w||^2 (bias weight unpenalized),
/// in the overflow-safe form max(z,0) - y*z + ln(1 + exp(-|z|)).
pub fn logistic_loss(weights: &[f64], xs: &[FeatureVector], ys: &[f64], l2: f64) -> f64 {
    let n = xs.len() as f64;
    let data: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let z = dot(weights, &x.0);
            z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
        })
        .sum::<f64>()
        / n;
    let penalty: f64 = weights[1..].iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    data + penalty
}

/// Gradient of `logistic_loss` with respect to the weights.
pub fn logistic_gradient(weights: &[f64], xs: &[FeatureVector], ys: &[f64], l2: f64) -> Vec<f64> {
    let n = xs.len() as f64;
    let mut grad = vec![0.0; weights.len()];
    for (x, &y) in xs.iter().zip(ys) {
        let residual = sigmoid(dot(weights, &x.0)) - y;
        for (g, v) in grad.iter_mut().zip(&x.0) {
            *g += residual * v / n;
        }
    }
    for (j, g) in grad.iter_mut().enumerate() {
        if j > 0 {
            *g += l2 * weights[j];
        }
    }
    grad
}

/// A finished training run: the model plus the loss trajectory
/// (index 0 is the loss at initialization, then one entry per epoch).
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: ScorerModel,
    pub loss_by_epoch: Vec<f64>,
}

fn assemble_dataset(
    examples: &[TrainingExample],
    corpus: &Corpus,
    idf: &IdfTable,
    emb: &EmbeddingTable,
) -> Result<(Vec<FeatureVector>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for ex in examples {
        let doc = corpus.get(&ex.doc_id).ok_or_else(|| {
            Error::InvalidInput(format!(
                "training example references unknown document {:?}",
                ex.doc_id
            ))
        })?;
        if ex.labels.len() != doc.sentences.len() {
            return Err(Error::InvalidInput(format!(
                "labels for {:?} cover {} sentences but the document has {}",
                ex.doc_id,
                ex.labels.len(),
                doc.sentences.len()
            )));
        }
        let kws = KeywordSet::new(ex.doc_id.clone(), ex.keywords.iter().map(String::as_str));
        for i in 0..doc.sentences.len() {
            xs.push(featurize(doc, &kws, idf, emb, i)?);
            ys.push(if ex.labels.is_selected(i) { 1.0 } else { 0.0 });
        }
    }
    Ok((xs, ys))
}

/// Train by full-batch gradient descent from zero weights. Deterministic;
/// aborts if the loss ever goes non-finite (learning rate too high).
pub fn train(
    examples: &[TrainingExample],
    corpus: &Corpus,
    emb: &EmbeddingTable,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if examples.is_empty() {
        return Err(Error::InvalidInput("no training examples given".into()));
    }
    let idf = crate::keywords::build_idf(corpus)?;
    let (xs, ys) = assemble_dataset(examples, corpus, &idf, emb)?;

    let mut weights = vec![0.0; FEATURE_DIM];
    let mut loss_by_epoch = Vec::with_capacity(config.epochs + 1);
    loss_by_epoch.push(logistic_loss(&weights, &xs, &ys, config.l2));

    for epoch in 1..=config.epochs {
        let grad = logistic_gradient(&weights, &xs, &ys, config.l2);
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= config.learning_rate * g;
        }
        let loss = logistic_loss(&weights, &xs, &ys, config.l2);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        loss_by_epoch.push(loss);
    }

    let final_loss = *loss_by_epoch.last().expect("at least the initial loss");
    Ok(TrainOutcome {
        model: ScorerModel {
            weights,
            config: config.clone(),
            final_loss: Some(final_loss),
        },
        loss_by_epoch,
    })
}

/// Indices of the top-`m` sentences by predicted probability, ties broken
/// toward the lower index, returned in document order.
pub fn predict(
    model: &ScorerModel,
    doc: &Document,
    keywords: &KeywordSet,
    idf: &IdfTable,
    emb: &EmbeddingTable,
    m: usize,
) -> Result<Vec<usize>> {
    assert!(m >= 1, "m must be >= 1");
    let mut scored: Vec<(usize, f64)> = (0..doc.sentences.len())
        .map(|i| featurize(doc, keywords, idf, emb, i).map(|x| (i, model.probability(&x))))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut chosen: Vec<usize> = scored.into_iter().take(m).map(|(i, _)| i).collect();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Predicted sentences' raw text, newline-joined in document order.
pub fn summarize_text(
    model: &ScorerModel,
    doc: &Document,
    keywords: &KeywordSet,
    idf: &IdfTable,
    emb: &EmbeddingTable,
    m: usize,
) -> Result<String> {
    let indices = predict(model, doc, keywords, idf, emb, m)?;
    Ok(indices
        .iter()
        .map(|&i| doc.sentences[i].text.as_str())
        .collect::<Vec<_>>()
        .join("\n"))
}

#[derive(Serialize, Deserialize)]
struct HyperJson {
    learning_rate: f64,
    epochs: usize,
    l2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_loss: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    weights: Vec<f64>,
    feature_names: Vec<String>,
    hyper: HyperJson,
    seed: u64,
}

pub fn save_model(model: &ScorerModel, path: &Path) -> Result<()> {
    let json = ModelJson {
        weights: model.weights.clone(),
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        hyper: HyperJson {
            learning_rate: model.config.learning_rate,
            epochs: model.config.epochs,
            l2: model.config.l2,
            final_loss: model.final_loss,
        },
        seed: model.config.seed,
    };
    let text = serde_json::to_string_pretty(&json).expect("model serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ScorerModel> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let json: ModelJson = serde_json::from_str(&raw).map_err(|e| Error::MalformedLine {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if json.weights.len() != FEATURE_DIM {
        return Err(Error::DimensionMismatch {
            left: FEATURE_DIM,
            right: json.weights.len(),
        });
    }
    if json.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "model at {} contains non-finite weights",
            path.display()
        )));
    }
    if json.feature_names != FEATURE_NAMES {
        return Err(Error::InvalidInput(format!(
            "model at {} was built for features {:?}, expected {:?}",
            path.display(),
            json.feature_names,
            FEATURE_NAMES
        )));
    }
    Ok(ScorerModel {
        weights: json.weights,
        config: TrainConfig {
            learning_rate: json.hyper.learning_rate,
            epochs: json.hyper.epochs,
            l2: json.hyper.l2,
            seed: json.seed,
        },
        final_loss: json.hyper.final_loss,
    })
}

/// One document's predicted summary, as written by the summarize pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub doc_id: String,
    pub indices: Vec<usize>,
    pub text: String,
}

pub fn summaries_to_jsonl(records: &[SummaryRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("summary record serializes"));
        out.push('\n');
    }
    out
}

pub fn save_summaries(records: &[SummaryRecord], path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(summaries_to_jsonl(records).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn load_summaries(path: &Path) -> Result<Vec<SummaryRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SummaryRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::keywords::build_idf;
    use crate::oracle::SelectionVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn doc(id: &str, texts: &[&str]) -> Document {
        Document::new(id, texts.iter().map(|s| s.to_string()).collect(), None).unwrap()
    }

    fn toy_env() -> (Corpus, IdfTable, EmbeddingTable) {
        let corpus = Corpus::new(
            vec![
                doc(
                    "d1",
                    &[
                        "quake aid t3 t4 t5 t6 t7 t8 t9 t10.",
                        "markets were calm today overall.",
                        "weather reports continued as usual.",
                    ],
                ),
                doc("d2", &["filler text here.", "more filler text follows."]),
            ],
            "toy",
        )
        .unwrap();
        let idf = build_idf(&corpus).unwrap();
        (corpus, idf, EmbeddingTable::empty())
    }

    #[test]
    fn featurize_keyword_match_rate() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        // Sentence 0 has 10 tokens, 2 of which come from the 5-keyword set.
        let kws = KeywordSet::new("x", ["quake", "aid", "court", "bank", "storm"]);
        let f = featurize(d, &kws, &idf, &emb, 0).unwrap();
        assert!((f.0[2] - 0.2).abs() < 1e-12);
        // Exact-match fallback: best pair similarity is 1, mean is 2/5.
        assert_eq!(f.0[3], 1.0);
        assert!((f.0[4] - 0.4).abs() < 1e-12);
        assert_eq!(f.0[8], 1.0);
        assert_eq!(f.0[0], 1.0);
    }

    #[test]
    fn featurize_empty_keywords_zero_keyword_slots() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        let empty = KeywordSet::new("x", Vec::<String>::new());
        let f = featurize(d, &empty, &idf, &emb, 0).unwrap();
        assert_eq!((f.0[2], f.0[3], f.0[4], f.0[8]), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn featurize_position_normalization() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        let kws = KeywordSet::new("x", ["quake"]);
        let first = featurize(d, &kws, &idf, &emb, 0).unwrap();
        let last = featurize(d, &kws, &idf, &emb, 2).unwrap();
        assert_eq!(first.0[1], 0.0);
        assert!((last.0[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn featurize_rejects_bad_index() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        let kws = KeywordSet::new("x", ["quake"]);
        assert!(featurize(d, &kws, &idf, &emb, 3).is_err());
    }

    #[test]
    fn featurize_uses_embedding_similarity_when_available() {
        let (corpus, idf, _) = toy_env();
        let d = corpus.get("d1").unwrap();
        let emb = EmbeddingTable::from_pairs(vec![
            ("tremor".into(), vec![1.0, 0.0]),
            ("quake".into(), vec![1.0, 0.0]),
        ])
        .unwrap();
        // No exact match, but the vectors make tremor ~ quake.
        let kws = KeywordSet::new("x", ["tremor"]);
        let f = featurize(d, &kws, &idf, &emb, 0).unwrap();
        assert_eq!(f.0[2], 0.0);
        assert!((f.0[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn featurize_values_are_finite() {
        let (corpus, idf, emb) = toy_env();
        let kws = KeywordSet::new("x", ["quake", "filler"]);
        for d in &corpus.documents {
            for i in 0..d.sentences.len() {
                let f = featurize(d, &kws, &idf, &emb, i).unwrap();
                assert!(f.0.iter().all(|v| v.is_finite()), "{:?}", f);
            }
        }
    }

    fn separable_setup() -> (Corpus, Vec<TrainingExample>) {
        let mut docs = Vec::new();
        let mut examples = Vec::new();
        for k in 0..4 {
            let id = format!("d{k}");
            docs.push(doc(
                &id,
                &[
                    "the quake damaged the region badly.",
                    "unrelated chatter about sports results.",
                    "more chatter about television shows.",
                ],
            ));
            examples.push(TrainingExample {
                doc_id: id,
                keywords: vec!["quake".to_string()],
                labels: SelectionVector::new(vec![true, false, false], 1).unwrap(),
            });
        }
        (Corpus::new(docs, "sep").unwrap(), examples)
    }

    #[test]
    fn train_zero_epochs_gives_ln2_loss() {
        let (corpus, examples) = separable_setup();
        let config = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let outcome = train(&examples, &corpus, &EmbeddingTable::empty(), &config).unwrap();
        assert!(outcome.model.weights.iter().all(|&w| w == 0.0));
        assert_eq!(outcome.loss_by_epoch.len(), 1);
        assert!((outcome.loss_by_epoch[0] - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(outcome.model.final_loss, Some(outcome.loss_by_epoch[0]));
    }

    #[test]
    fn train_separates_keyword_sentences() {
        let (corpus, examples) = separable_setup();
        let config = TrainConfig {
            epochs: 500,
            ..TrainConfig::default()
        };
        let outcome = train(&examples, &corpus, &EmbeddingTable::empty(), &config).unwrap();
        let idf = build_idf(&corpus).unwrap();
        let emb = EmbeddingTable::empty();
        let mut correct = 0;
        let mut total = 0;
        for ex in &examples {
            let d = corpus.get(&ex.doc_id).unwrap();
            let kws = KeywordSet::new("k", ex.keywords.iter().map(String::as_str));
            for i in 0..d.sentences.len() {
                let x = featurize(d, &kws, &idf, &emb, i).unwrap();
                let predicted = outcome.model.probability(&x) > 0.5;
                if predicted == ex.labels.is_selected(i) {
                    correct += 1;
                }
                total += 1;
            }
        }
        assert_eq!(correct, total, "training accuracy must reach 1.0");
    }

    #[test]
    fn train_loss_non_increasing_at_default_rate() {
        let (corpus, examples) = separable_setup();
        let outcome =
            train(&examples, &corpus, &EmbeddingTable::empty(), &TrainConfig::default()).unwrap();
        for pair in outcome.loss_by_epoch.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "loss rose: {pair:?}");
        }
    }

    #[test]
    fn train_aborts_on_divergence() {
        let (corpus, examples) = separable_setup();
        let config = TrainConfig {
            learning_rate: 1e3,
            l2: 1e3,
            epochs: 200,
            seed: 13,
        };
        assert!(matches!(
            train(&examples, &corpus, &EmbeddingTable::empty(), &config),
            Err(Error::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (corpus, examples) = separable_setup();
        let idf = build_idf(&corpus).unwrap();
        let emb = EmbeddingTable::empty();
        let (xs, ys) = assemble_dataset(&examples, &corpus, &idf, &emb).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let h = 1e-5;
        for _ in 0..5 {
            let w: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grad = logistic_gradient(&w, &xs, &ys, 1e-4);
            for j in 0..FEATURE_DIM {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let fd = (logistic_loss(&wp, &xs, &ys, 1e-4)
                    - logistic_loss(&wm, &xs, &ys, 1e-4))
                    / (2.0 * h);
                let denom = grad[j].abs().max(fd.abs()).max(1e-8);
                assert!(
                    ((grad[j] - fd) / denom).abs() < 1e-4,
                    "slot {j}: analytic {} vs fd {fd}",
                    grad[j]
                );
            }
        }
    }

    #[test]
    fn predict_orders_and_breaks_ties() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        let kws = KeywordSet::new("x", ["quake"]);
        // Zero weights: every sentence scores 0.5, so the lowest indices win.
        let flat = ScorerModel {
            weights: vec![0.0; FEATURE_DIM],
            config: TrainConfig::default(),
            final_loss: None,
        };
        assert_eq!(predict(&flat, d, &kws, &idf, &emb, 2).unwrap(), vec![0, 1]);
        // m at or above the sentence count returns the whole document.
        assert_eq!(
            predict(&flat, d, &kws, &idf, &emb, 10).unwrap(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn predict_with_keyword_heavy_weights_selects_keyword_sentences() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        let kws = KeywordSet::new("x", ["quake", "aid"]);
        let mut weights = vec![0.0; FEATURE_DIM];
        weights[2] = 1000.0;
        let model = ScorerModel {
            weights,
            config: TrainConfig::default(),
            final_loss: None,
        };
        assert_eq!(predict(&model, d, &kws, &idf, &emb, 1).unwrap(), vec![0]);
    }

    #[test]
    fn predict_is_scale_invariant() {
        let (corpus, idf, emb) = toy_env();
        let kws = KeywordSet::new("x", ["quake"]);
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..20 {
            let weights: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let scaled: Vec<f64> = weights.iter().map(|w| w * 3.5).collect();
            let a = ScorerModel {
                weights,
                config: TrainConfig::default(),
                final_loss: None,
            };
            let b = ScorerModel {
                weights: scaled,
                config: TrainConfig::default(),
                final_loss: None,
            };
            for d in &corpus.documents {
                for m in 1..=d.sentences.len() {
                    assert_eq!(
                        predict(&a, d, &kws, &idf, &emb, m).unwrap(),
                        predict(&b, d, &kws, &idf, &emb, m).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn summarize_joins_selected_sentences() {
        let (corpus, idf, emb) = toy_env();
        let d = corpus.get("d1").unwrap();
        let kws = KeywordSet::new("x", Vec::<String>::new());
        let mut weights = vec![0.0; FEATURE_DIM];
        weights[1] = -10.0; // favor early sentences
        let model = ScorerModel {
            weights,
            config: TrainConfig::default(),
            final_loss: None,
        };
        let text = summarize_text(&model, d, &kws, &idf, &emb, 2).unwrap();
        let expected = format!("{}\n{}", d.sentences[0].text, d.sentences[1].text);
        assert_eq!(text, expected);
        let single = summarize_text(&model, d, &kws, &idf, &emb, 1).unwrap();
        assert_eq!(single, d.sentences[0].text);
    }

    #[test]
    fn model_json_round_trip() {
        let (corpus, examples) = separable_setup();
        let config = TrainConfig {
            epochs: 50,
            ..TrainConfig::default()
        };
        let outcome = train(&examples, &corpus, &EmbeddingTable::empty(), &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&outcome.model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, outcome.model);
    }

    #[test]
    fn load_model_rejects_wrong_dimension() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        std::fs::write(
            &path,
            r#"{"weights":[1,2],"feature_names":["a","b"],"hyper":{"learning_rate":0.1,"epochs":1,"l2":0.0},"seed":1}"#,
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn summaries_round_trip() {
        let records = vec![
            SummaryRecord {
                doc_id: "d1".into(),
                indices: vec![0, 2],
                text: "First.\nThird.".into(),
            },
            SummaryRecord {
                doc_id: "d2".into(),
                indices: vec![],
                text: String::new(),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pred.jsonl");
        save_summaries(&records, &path).unwrap();
        assert_eq!(load_summaries(&path).unwrap(), records);
    }
}
