//! Measurement suite: annotation filtering, soft-label F1 with its
//! achievable-maximum bound, ROUGE-1/2/L, selection-stability statistics,
//! and agreement histograms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationRecord, Corpus, Document};
use crate::error::{Error, Result};

/// Sentence-count ceiling for exhaustive max-F1 enumeration.
pub const MAX_F1_ENUMERATION_LIMIT: usize = 20;

/// One document's annotators after overlap filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    pub doc_id: String,
    pub records: Vec<AnnotationRecord>,
    /// Annotators dropped by `filter_annotations`; 0 for sets built directly.
    pub discarded_annotators: usize,
}

impl AnnotationSet {
    /// Build directly from records (no filtering). All records must rate the
    /// same number of sentences and at least one record is required.
    pub fn new(doc_id: impl Into<String>, records: Vec<AnnotationRecord>) -> Result<Self> {
        let doc_id = doc_id.into();
        if records.is_empty() {
            return Err(Error::AllAnnotatorsDiscarded { doc_id });
        }
        let len = records[0].ratings.len();
        if records.iter().any(|r| r.ratings.len() != len) {
            return Err(Error::InvalidInput(format!(
                "annotation records for {doc_id:?} rate different sentence counts"
            )));
        }
        Ok(AnnotationSet {
            doc_id,
            records,
            discarded_annotators: 0,
        })
    }

    /// Number of sentences each record rates.
    pub fn n_sentences(&self) -> usize {
        self.records[0].ratings.len()
    }

    pub fn selected_sets(&self) -> Vec<BTreeSet<usize>> {
        self.records.iter().map(|r| r.selected_set()).collect()
    }
}

/// Keep only annotators whose selected sentences overlap some other
/// annotator's selection; a lone annotator is always kept. Errors when every
/// annotator would be discarded (the caller excludes the document).
pub fn filter_annotations(
    doc_id: impl Into<String>,
    records: Vec<AnnotationRecord>,
) -> Result<AnnotationSet> {
    let doc_id = doc_id.into();
    if records.is_empty() {
        return Err(Error::AllAnnotatorsDiscarded { doc_id });
    }
    let selections: Vec<BTreeSet<usize>> = records.iter().map(|r| r.selected_set()).collect();
    let kept: Vec<AnnotationRecord> = if records.len() == 1 {
        records
    } else {
        records
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                selections
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != *i && !selections[*i].is_disjoint(other))
            })
            .map(|(_, r)| r.clone())
            .collect()
    };
    if kept.is_empty() {
        return Err(Error::AllAnnotatorsDiscarded { doc_id });
    }
    let discarded = selections.len() - kept.len();
    let mut set = AnnotationSet::new(doc_id, kept)?;
    set.discarded_annotators = discarded;
    Ok(set)
}

fn dice_percent(pred: &BTreeSet<usize>, sel: &BTreeSet<usize>) -> f64 {
    if pred.is_empty() && sel.is_empty() {
        return 100.0;
    }
    if pred.is_empty() || sel.is_empty() {
        return 0.0;
    }
    let inter = pred.intersection(sel).count() as f64;
    2.0 * inter / (pred.len() + sel.len()) as f64 * 100.0
}

/// Soft-label F1 in [0,100]: per-annotator set F1 (Dice), averaged over
/// annotators. Empty-vs-empty counts as 100, empty-vs-nonempty as 0.
pub fn f1_soft(pred: &BTreeSet<usize>, ann: &AnnotationSet) -> f64 {
    let sels = ann.selected_sets();
    sels.iter().map(|s| dice_percent(pred, s)).sum::<f64>() / sels.len() as f64
}

/// Best achievable `f1_soft` over all predictions of at most `m` sentences,
/// by exhaustive enumeration of subsets of 0..n_sentences.
pub fn max_f1(ann: &AnnotationSet, m: usize, n_sentences: usize) -> Result<f64> {
    if n_sentences > MAX_F1_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            n_sentences,
            limit: MAX_F1_ENUMERATION_LIMIT,
        });
    }
    let sels = ann.selected_sets();
    let mut best = f64::NEG_INFINITY;
    let mut subset: Vec<usize> = Vec::new();
    enumerate_subsets(0, n_sentences, m, &mut subset, &mut |indices| {
        let pred: BTreeSet<usize> = indices.iter().copied().collect();
        let score = sels.iter().map(|s| dice_percent(&pred, s)).sum::<f64>() / sels.len() as f64;
        if score > best {
            best = score;
        }
    });
    Ok(best)
}

fn enumerate_subsets(
    start: usize,
    n: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    visit(current);
    if remaining == 0 {
        return;
    }
    for i in start..n {
        current.push(i);
        enumerate_subsets(i + 1, n, remaining - 1, current, visit);
        current.pop();
    }
}

fn ngram_counts<T: AsRef<str>>(tokens: &[T], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            let gram: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// n-gram overlap F1 in [0,1] with clipped (multiset) counts.
/// Either side lacking n-grams scores 0.
pub fn rouge_n_fraction<C: AsRef<str>, R: AsRef<str>>(
    candidate: &[C],
    reference: &[R],
    n: usize,
) -> f64 {
    assert!(n >= 1, "n-gram order must be >= 1");
    if candidate.len() < n || reference.len() < n {
        return 0.0;
    }
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    let overlap: usize = cand
        .iter()
        .map(|(gram, &c)| c.min(refc.get(gram).copied().unwrap_or(0)))
        .sum();
    let total_cand = candidate.len() - n + 1;
    let total_ref = reference.len() - n + 1;
    let p = overlap as f64 / total_cand as f64;
    let r = overlap as f64 / total_ref as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Longest-common-subsequence F1 in [0,1]. Either side empty scores 0.
pub fn rouge_l_fraction<C: AsRef<str>, R: AsRef<str>>(candidate: &[C], reference: &[R]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let lcs = lcs_length(candidate, reference) as f64;
    let p = lcs / candidate.len() as f64;
    let r = lcs / reference.len() as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn lcs_length<C: AsRef<str>, R: AsRef<str>>(a: &[C], b: &[R]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x.as_ref() == y.as_ref() {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// ROUGE-N on the usual 0..100 scale.
pub fn rouge_n<C: AsRef<str>, R: AsRef<str>>(candidate: &[C], reference: &[R], n: usize) -> f64 {
    rouge_n_fraction(candidate, reference, n) * 100.0
}

/// ROUGE-L on the usual 0..100 scale.
pub fn rouge_l<C: AsRef<str>, R: AsRef<str>>(candidate: &[C], reference: &[R]) -> f64 {
    rouge_l_fraction(candidate, reference) * 100.0
}

/// Jaccard similarity of two index sets; two empty sets count as identical.
pub fn jaccard(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count() as f64;
    let union = a.union(b).count() as f64;
    inter / union
}

/// Stability of selections across two runs over the same documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub docs: usize,
    pub mean_jaccard: f64,
    pub exact_match_percent: f64,
}

/// Compare two runs' per-document selections: mean Jaccard and the
/// percentage of documents with identical sets. Both runs must cover the
/// same documents.
pub fn sensitivity_report(
    run_a: &BTreeMap<String, BTreeSet<usize>>,
    run_b: &BTreeMap<String, BTreeSet<usize>>,
) -> Result<SensitivityReport> {
    if run_a.keys().ne(run_b.keys()) {
        return Err(Error::InvalidInput(
            "sensitivity comparison requires identical document sets in both runs".into(),
        ));
    }
    if run_a.is_empty() {
        return Err(Error::InvalidInput(
            "sensitivity comparison requires at least one document".into(),
        ));
    }
    let docs = run_a.len();
    let mut jac_sum = 0.0;
    let mut exact = 0usize;
    for (id, a) in run_a {
        let b = &run_b[id];
        jac_sum += jaccard(a, b);
        if a == b {
            exact += 1;
        }
    }
    Ok(SensitivityReport {
        docs,
        mean_jaccard: jac_sum / docs as f64,
        exact_match_percent: exact as f64 / docs as f64 * 100.0,
    })
}

/// How many annotators agreed on each selected sentence, across documents.
///
/// Entry k-1 holds the percentage of selected-sentence occurrences chosen by
/// exactly k annotators; entries sum to 100 when any selection exists. The
/// vector length is the largest annotator count in the input.
pub fn agreement_histogram(sets: &[AnnotationSet]) -> Vec<f64> {
    let max_annotators = sets.iter().map(|s| s.records.len()).max().unwrap_or(0);
    let mut occurrences = vec![0usize; max_annotators];
    for set in sets {
        let sels = set.selected_sets();
        let mut chosen: BTreeMap<usize, usize> = BTreeMap::new();
        for sel in &sels {
            for &idx in sel {
                *chosen.entry(idx).or_insert(0) += 1;
            }
        }
        for (_, count) in chosen {
            occurrences[count - 1] += 1;
        }
    }
    let total: usize = occurrences.iter().sum();
    if total == 0 {
        return vec![0.0; max_annotators];
    }
    occurrences
        .into_iter()
        .map(|c| c as f64 / total as f64 * 100.0)
        .collect()
}

/// Aggregate scores for one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub docs_evaluated: usize,
    /// Predicted documents with no surviving annotations.
    pub docs_skipped: usize,
    pub annotators_discarded: usize,
    pub mean_f1: f64,
    pub mean_max_f1: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
}

fn concat_tokens<'a>(doc: &'a Document, indices: &BTreeSet<usize>) -> Vec<&'a str> {
    indices
        .iter()
        .flat_map(|&i| doc.sentences[i].tokens.iter().map(String::as_str))
        .collect()
}

/// Score predictions against annotations.
///
/// Per document: soft F1 against the filtered annotators, the achievable
/// maximum for predictions of at most `m` sentences (widened to the actual
/// prediction size if larger, so F1 <= max-F1 always holds), and ROUGE-1/2/L
/// against each annotator's selected-sentence concatenation averaged over
/// annotators. All values are then macro-averaged over documents.
///
/// Documents whose annotators are entirely filtered away (or that have no
/// annotation records at all) are skipped and counted.
pub fn evaluate(
    corpus: &Corpus,
    records: &[AnnotationRecord],
    predictions: &BTreeMap<String, BTreeSet<usize>>,
    m: usize,
) -> Result<EvalReport> {
    let mut by_doc: BTreeMap<&str, Vec<AnnotationRecord>> = BTreeMap::new();
    for r in records {
        by_doc.entry(r.doc_id.as_str()).or_default().push(r.clone());
    }

    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    let mut discarded = 0usize;
    let mut f1_sum = 0.0;
    let mut max_f1_sum = 0.0;
    let mut r1_sum = 0.0;
    let mut r2_sum = 0.0;
    let mut rl_sum = 0.0;

    for (doc_id, pred) in predictions {
        let doc = corpus.get(doc_id).ok_or_else(|| {
            Error::InvalidInput(format!("prediction references unknown document {doc_id:?}"))
        })?;
        if let Some(&bad) = pred.iter().find(|&&i| i >= doc.sentences.len()) {
            return Err(Error::InvalidInput(format!(
                "prediction for {doc_id:?} selects sentence {bad} beyond document length {}",
                doc.sentences.len()
            )));
        }
        let doc_records = match by_doc.get(doc_id.as_str()) {
            Some(rs) => rs.clone(),
            None => {
                skipped += 1;
                continue;
            }
        };
        if doc_records
            .iter()
            .any(|r| r.ratings.len() != doc.sentences.len())
        {
            return Err(Error::InvalidInput(format!(
                "annotations for {doc_id:?} rate a different sentence count than the document"
            )));
        }
        let ann = match filter_annotations(doc_id.clone(), doc_records) {
            Ok(set) => set,
            Err(Error::AllAnnotatorsDiscarded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        discarded += ann.discarded_annotators;

        f1_sum += f1_soft(pred, &ann);
        max_f1_sum += max_f1(&ann, m.max(pred.len()), doc.sentences.len())?;

        let pred_tokens = concat_tokens(doc, pred);
        let sels = ann.selected_sets();
        let mut doc_r1 = 0.0;
        let mut doc_r2 = 0.0;
        let mut doc_rl = 0.0;
        for sel in &sels {
            let ref_tokens = concat_tokens(doc, sel);
            doc_r1 += rouge_n(&pred_tokens, &ref_tokens, 1);
            doc_r2 += rouge_n(&pred_tokens, &ref_tokens, 2);
            doc_rl += rouge_l(&pred_tokens, &ref_tokens);
        }
        r1_sum += doc_r1 / sels.len() as f64;
        r2_sum += doc_r2 / sels.len() as f64;
        rl_sum += doc_rl / sels.len() as f64;
        evaluated += 1;
    }

    if evaluated == 0 {
        return Err(Error::InvalidInput(
            "no predicted document had usable annotations".into(),
        ));
    }
    let n = evaluated as f64;
    Ok(EvalReport {
        docs_evaluated: evaluated,
        docs_skipped: skipped,
        annotators_discarded: discarded,
        mean_f1: f1_sum / n,
        mean_max_f1: max_f1_sum / n,
        rouge1: r1_sum / n,
        rouge2: r2_sum / n,
        rouge_l: rl_sum / n,
    })
}
