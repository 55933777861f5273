//! Deterministic synthetic aspect corpus: slot-filled template sentences over
//! disjoint token pools, with known per-sentence aspect labels, references,
//! and simulated annotators. Ground truth by construction, so end-to-end
//! behavior can be checked exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{tokenize, AnnotationRecord, Corpus, Document};
use crate::error::{Error, Result};
use crate::keywords::{is_stopword, KeywordSet};

/// Label assigned to sentences drawn from the filler pool.
pub const FILLER_LABEL: &str = "filler";

/// Sentence frame: "The <w> <w> near <w>." The frame words are stopwords, so
/// pool tokens alone decide a sentence's aspect and its extracted keywords.
const FRAME_WORDS: [&str; 2] = ["the", "near"];

const FILLER_MIN: usize = 1;
const FILLER_MAX: usize = 2;

/// One aspect's generation recipe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectSpec {
    pub label: String,
    /// Token pool; must not intersect any other pool.
    pub pool: Vec<String>,
    pub min_sentences: usize,
    pub max_sentences: usize,
}

impl AspectSpec {
    pub fn new(
        label: impl Into<String>,
        pool: Vec<String>,
        min_sentences: usize,
        max_sentences: usize,
    ) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::InvalidInput("aspect label must be nonempty".into()));
        }
        if !(1 <= min_sentences && min_sentences <= max_sentences) {
            return Err(Error::InvalidInput(format!(
                "aspect {label:?}: sentence range {min_sentences}..={max_sentences} is invalid"
            )));
        }
        validate_pool(&label, &pool)?;
        Ok(AspectSpec {
            label,
            pool,
            min_sentences,
            max_sentences,
        })
    }
}

fn validate_pool(owner: &str, pool: &[String]) -> Result<()> {
    if pool.is_empty() {
        return Err(Error::InvalidInput(format!("pool for {owner:?} is empty")));
    }
    for word in pool {
        if tokenize(word) != vec![word.clone()] {
            return Err(Error::InvalidInput(format!(
                "pool word {word:?} for {owner:?} must be a single lowercase token"
            )));
        }
        if is_stopword(word) || FRAME_WORDS.contains(&word.as_str()) {
            return Err(Error::InvalidInput(format!(
                "pool word {word:?} for {owner:?} collides with a function word"
            )));
        }
    }
    Ok(())
}

/// Everything one generation run produces.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub corpus: Corpus,
    /// doc id -> per-sentence aspect label (or `FILLER_LABEL`).
    pub sentence_labels: BTreeMap<String, Vec<String>>,
    /// One keyword set per aspect: the leading pool tokens.
    pub aspect_keywords: Vec<KeywordSet>,
    /// All simulated annotators; ids are "<aspect>:annN".
    pub annotations: Vec<AnnotationRecord>,
}

impl SynthOutput {
    /// The annotation records simulating annotators for one aspect.
    pub fn annotations_for_aspect(&self, label: &str) -> Vec<AnnotationRecord> {
        let prefix = format!("{label}:");
        self.annotations
            .iter()
            .filter(|r| r.annotator_id.starts_with(&prefix))
            .cloned()
            .collect()
    }
}

fn frame_sentence(pool: &[String], rng: &mut ChaCha8Rng) -> String {
    let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
    let (a, b, c) = (pick(rng), pick(rng), pick(rng));
    format!("The {a} {b} near {c}.")
}

/// Generate `n_docs` documents, each holding a few sentences per aspect plus
/// filler, shuffled. Per document: the reference summary quotes one sentence
/// per aspect, and each aspect gets three simulated annotators who select
/// that aspect's sentences exactly, except that one randomly chosen annotator
/// drops one sentence (guaranteed overlap remains, so annotation filtering
/// keeps all three). Identical seeds give byte-identical output.
pub fn generate_synthetic(
    seed: u64,
    n_docs: usize,
    aspects: &[AspectSpec],
    filler_pool: &[String],
) -> Result<SynthOutput> {
    if aspects.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two aspects to generate an aspect corpus".into(),
        ));
    }
    if n_docs == 0 {
        return Err(Error::InvalidInput("n_docs must be positive".into()));
    }
    validate_pool(FILLER_LABEL, filler_pool)?;
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    let pool_iter = aspects
        .iter()
        .map(|a| (a.label.as_str(), a.pool.as_slice()))
        .chain(std::iter::once((FILLER_LABEL, filler_pool)));
    for (owner, pool) in pool_iter {
        for word in pool {
            if let Some(other) = seen.insert(word.as_str(), owner) {
                return Err(Error::InvalidInput(format!(
                    "pools for {other:?} and {owner:?} share the token {word:?}"
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut documents = Vec::with_capacity(n_docs);
    let mut sentence_labels = BTreeMap::new();
    let mut annotations = Vec::new();

    for doc_no in 1..=n_docs {
        let id = format!("doc{doc_no:04}");
        let mut drafted: Vec<(String, String)> = Vec::new();
        for aspect in aspects {
            let count = rng.gen_range(aspect.min_sentences..=aspect.max_sentences);
            for _ in 0..count {
                drafted.push((frame_sentence(&aspect.pool, &mut rng), aspect.label.clone()));
            }
        }
        let filler_count = rng.gen_range(FILLER_MIN..=FILLER_MAX);
        for _ in 0..filler_count {
            drafted.push((frame_sentence(filler_pool, &mut rng), FILLER_LABEL.to_string()));
        }
        drafted.shuffle(&mut rng);

        let labels: Vec<String> = drafted.iter().map(|(_, l)| l.clone()).collect();
        let texts: Vec<String> = drafted.iter().map(|(t, _)| t.clone()).collect();

        // Reference: one quoted sentence per aspect, in aspect order.
        let mut reference_parts = Vec::with_capacity(aspects.len());
        for aspect in aspects {
            let indices: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter(|(_, l)| *l == &aspect.label)
                .map(|(i, _)| i)
                .collect();
            let chosen = indices[rng.gen_range(0..indices.len())];
            reference_parts.push(texts[chosen].clone());
        }
        let reference = reference_parts.join(" ");

        // Three annotators per aspect; one drops a single sentence.
        for aspect in aspects {
            let indices: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter(|(_, l)| *l == &aspect.label)
                .map(|(i, _)| i)
                .collect();
            let dropper = rng.gen_range(0..3usize);
            let dropped_pos = rng.gen_range(0..indices.len());
            for ann_no in 0..3usize {
                let mut ratings = vec![0u8; texts.len()];
                for (pos, &idx) in indices.iter().enumerate() {
                    if ann_no == dropper && pos == dropped_pos && indices.len() >= 2 {
                        continue;
                    }
                    ratings[idx] = rng.gen_range(1..=3u8);
                }
                annotations.push(AnnotationRecord::new(
                    id.clone(),
                    format!("{}:ann{}", aspect.label, ann_no + 1),
                    ratings,
                )?);
            }
        }

        documents.push(Document::new(id.clone(), texts, Some(reference))?);
        sentence_labels.insert(id, labels);
    }

    let aspect_keywords = aspects
        .iter()
        .map(|a| {
            let k = a.pool.len().min(crate::keywords::DEFAULT_MAX_K);
            KeywordSet::new(a.label.clone(), a.pool[..k].iter().map(String::as_str))
        })
        .collect();

    Ok(SynthOutput {
        corpus: Corpus::new(documents, format!("synthetic(seed={seed},docs={n_docs})"))?,
        sentence_labels,
        aspect_keywords,
        annotations,
    })
}

/// Ready-made two-aspect setup: an earthquake-flavored pool and a
/// fraud-flavored pool, plus neutral filler.
pub fn default_aspect_specs() -> (Vec<AspectSpec>, Vec<String>) {
    let quake = AspectSpec::new(
        "quake",
        [
            "quake",
            "tremor",
            "rubble",
            "epicenter",
            "magnitude",
            "aftershock",
            "seismograph",
            "faultline",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        2,
        3,
    )
    .expect("builtin pool is valid");
    let fraud = AspectSpec::new(
        "fraud",
        [
            "fraud",
            "embezzlement",
            "ledger",
            "audit",
            "bribery",
            "swindle",
            "forgery",
            "racket",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        2,
        3,
    )
    .expect("builtin pool is valid");
    let filler = [
        "weather", "sports", "concert", "traffic", "festival", "museum", "recipe", "garden",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    (vec![quake, fraud], filler)
}

#[derive(Serialize)]
struct AspectEntryOut<'a> {
    aspect: &'a str,
    keywords: &'a [String],
}

/// Write corpus.jsonl, annotations.jsonl, and aspects.json into a directory.
pub fn write_synth_output(output: &SynthOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    crate::corpus::save_corpus(&output.corpus, &dir.join("corpus.jsonl"))?;
    crate::corpus::save_annotations(&output.annotations, &dir.join("annotations.jsonl"))?;
    let entries: Vec<AspectEntryOut> = output
        .aspect_keywords
        .iter()
        .map(|set| AspectEntryOut {
            aspect: &set.aspect_label,
            keywords: &set.keywords,
        })
        .collect();
    let aspects_path = dir.join("aspects.json");
    let text = serde_json::to_string_pretty(&entries).expect("aspect entries serialize");
    fs::write(&aspects_path, text).map_err(|e| Error::io(&aspects_path, e))
}
