//! Exemplar-based document retrieval: rank documents by the mean cosine
//! between each sentence and a domain exemplar sentence, under a pluggable
//! sentence encoder.

use crate::corpus::{tokenize, Corpus, Document};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::keywords::IdfTable;

/// Maps a sentence to a fixed-dimension dense vector. Implementations must
/// be deterministic and safe for concurrent read-only use.
pub trait SentenceEncoder: Sync {
    fn encode(&self, text: &str) -> Vec<f64>;
    fn dim(&self) -> usize;
}

/// A domain probe sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExemplarQuery {
    pub text: String,
    pub domain_label: String,
}

impl ExemplarQuery {
    pub fn new(text: impl Into<String>, domain_label: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InvalidInput("exemplar text must be nonempty".into()));
        }
        Ok(ExemplarQuery {
            text,
            domain_label: domain_label.into(),
        })
    }
}

/// The exemplar sentences shipped as defaults, one per supported domain.
/// The "occured" misspelling is deliberate: exemplars are matched verbatim.
pub fn default_exemplars() -> Vec<ExemplarQuery> {
    vec![
        ExemplarQuery::new("An earthquake occurred.", "earthquake").expect("nonempty"),
        ExemplarQuery::new("A fraud occured.", "fraud").expect("nonempty"),
    ]
}

/// Cosine similarity with a dimension check. A zero vector on either side
/// yields 0 (the two-zero-vector case is defined that way; one-sided zero
/// falls back to the same value).
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Mean cosine between the encoded exemplar and every sentence of the
/// document.
///
/// The per-sentence cosines are sorted before summation, which makes the
/// result bit-identical under any sentence reordering, not merely equal up
/// to floating-point association.
pub fn doc_similarity(
    doc: &Document,
    exemplar: &ExemplarQuery,
    enc: &dyn SentenceEncoder,
) -> Result<f64> {
    if doc.sentences.is_empty() {
        return Err(Error::EmptyDocument { id: doc.id.clone() });
    }
    let query = enc.encode(&exemplar.text);
    let mut cosines = doc
        .sentences
        .iter()
        .map(|s| cosine(&enc.encode(&s.text), &query))
        .collect::<Result<Vec<f64>>>()?;
    cosines.sort_by(f64::total_cmp);
    Ok(cosines.iter().sum::<f64>() / cosines.len() as f64)
}

/// Rank documents by `doc_similarity`, descending; ties break by id
/// ascending. At most `k` results.
pub fn retrieve_top(
    corpus: &Corpus,
    exemplar: &ExemplarQuery,
    k: usize,
    enc: &dyn SentenceEncoder,
) -> Result<Vec<(String, f64)>> {
    assert!(k >= 1, "k must be >= 1");
    let mut scored: Vec<(String, f64)> = corpus
        .documents
        .iter()
        .map(|d| doc_similarity(d, exemplar, enc).map(|s| (d.id.clone(), s)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}

/// Default encoder: L2-normalized tf-idf bag over the vocabulary of the
/// corpus the idf table was built from. Tokens outside that vocabulary are
/// dropped; a sentence with no known token encodes to the zero vector.
pub struct TfIdfEncoder {
    index: std::collections::HashMap<String, usize>,
    idf: Vec<f64>,
}

impl TfIdfEncoder {
    pub fn new(idf_table: &IdfTable) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut idf = Vec::with_capacity(idf_table.vocab_size());
        for (slot, (token, value)) in idf_table.entries().enumerate() {
            index.insert(token.to_string(), slot);
            idf.push(value);
        }
        TfIdfEncoder { index, idf }
    }
}

impl SentenceEncoder for TfIdfEncoder {
    fn encode(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.idf.len()];
        for token in tokenize(text) {
            if let Some(&slot) = self.index.get(&token) {
                v[slot] += self.idf[slot];
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }

    fn dim(&self) -> usize {
        self.idf.len()
    }
}

/// Optional encoder: mean of per-token word vectors. Sentences whose tokens
/// are all out of vocabulary encode to the zero vector.
pub struct WordVecEncoder<'a> {
    table: &'a EmbeddingTable,
}

impl<'a> WordVecEncoder<'a> {
    pub fn new(table: &'a EmbeddingTable) -> Self {
        WordVecEncoder { table }
    }
}

impl SentenceEncoder for WordVecEncoder<'_> {
    fn encode(&self, text: &str) -> Vec<f64> {
        let tokens = tokenize(text);
        self.table
            .mean_vector(tokens.iter().map(String::as_str))
            .unwrap_or_else(|| vec![0.0; self.table.dim()])
    }

    fn dim(&self) -> usize {
        self.table.dim()
    }
}
