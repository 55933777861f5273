//! TF-IDF keyword extraction and user-supplied aspect keyword sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Corpus, Document};
use crate::error::{Error, Result};

/// Default number of keywords extracted per document.
pub const DEFAULT_MAX_K: usize = 5;

/// English function words excluded from keyword ranking.
///
/// Tokenization itself keeps these; only the keyword ranker filters them.
/// Sorted, lowercase, queried by binary search.
const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "cannot", "could", "did", "do", "does", "doing", "down", "during", "each",
    "else", "ever", "few", "for", "from", "further", "get", "got", "had", "has", "have", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "however", "i", "if",
    "in", "indeed", "instead", "into", "is", "it", "its", "itself", "just", "least", "less",
    "many", "me", "more", "most", "much", "my", "myself", "near", "neither", "never", "no", "nor",
    "not", "now", "of", "off", "often", "on", "once", "only", "onto", "or", "other", "our",
    "ours", "ourselves", "out", "over", "own", "per", "quite", "rather", "said", "same", "says",
    "she", "should", "since", "so", "some", "still", "such", "than", "that", "the", "their",
    "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those", "though",
    "through", "thus", "to", "too", "under", "unless", "until", "up", "upon", "very", "via",
    "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will",
    "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself", "yourselves",
];

/// True when `token` is on the shipped stopword list. Expects lowercase input.
pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

pub fn stopwords() -> &'static [&'static str] {
    STOPWORDS
}

/// Inverse document frequencies over a corpus.
///
/// For a stored token, idf = ln(doc_count / df). Lookups of tokens never seen
/// during the build fall back to df = 1, the maximum idf.
#[derive(Debug, Clone)]
pub struct IdfTable {
    values: BTreeMap<String, f64>,
    doc_count: usize,
}

impl IdfTable {
    pub fn idf(&self, token: &str) -> f64 {
        self.values
            .get(token)
            .copied()
            .unwrap_or_else(|| (self.doc_count as f64).ln())
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn contains(&self, token: &str) -> bool {
        self.values.contains_key(token)
    }

    /// Number of distinct tokens seen during the build.
    pub fn vocab_size(&self) -> usize {
        self.values.len()
    }

    /// Stored tokens and their idf values, in token order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(t, &v)| (t.as_str(), v))
    }
}

/// Count document frequencies over the corpus and derive idf values.
pub fn build_idf(corpus: &Corpus) -> Result<IdfTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let doc_count = corpus.len();
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in &corpus.documents {
        let distinct: BTreeSet<&str> = doc.all_tokens().collect();
        for token in distinct {
            *df.entry(token.to_string()).or_insert(0) += 1;
        }
    }
    let values = df
        .into_iter()
        .map(|(token, d)| {
            let idf = (doc_count as f64 / d as f64).ln();
            (token, idf)
        })
        .collect();
    Ok(IdfTable { values, doc_count })
}

/// A labeled, ordered list of lowercase keywords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub aspect_label: String,
    pub keywords: Vec<String>,
}

impl KeywordSet {
    /// Normalize (lowercase, trim, drop empties) and deduplicate keeping the
    /// first occurrence. The result may be empty; loaders that require a
    /// nonempty set check separately.
    pub fn new<I, S>(aspect_label: impl Into<String>, keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for kw in keywords {
            let kw = kw.as_ref().trim().to_lowercase();
            if kw.is_empty() {
                continue;
            }
            if seen.insert(kw.clone()) {
                out.push(kw);
            }
        }
        KeywordSet {
            aspect_label: aspect_label.into(),
            keywords: out,
        }
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// Tokens of all keywords, flattened in keyword order. Hyphenated or
    /// multiword keywords contribute each of their tokens.
    pub fn tokens(&self) -> Vec<String> {
        self.keywords.iter().flat_map(|k| tokenize(k)).collect()
    }
}

/// Rank a document's tokens by tf * idf and keep the top `max_k` that also
/// appear in the reference summary. Stopwords and zero-scoring tokens are
/// excluded; ties break toward the token appearing earlier in the document.
///
/// Returns a possibly empty set (labelled with the document id) when the
/// reference shares no qualifying token with the document body.
pub fn extract_keywords(doc: &Document, idf: &IdfTable, max_k: usize) -> Result<KeywordSet> {
    assert!(max_k >= 1, "max_k must be >= 1");
    let reference: BTreeSet<String> = doc
        .reference_tokens()
        .ok_or_else(|| Error::MissingReference { id: doc.id.clone() })?
        .into_iter()
        .collect();

    let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
    let mut first_pos: BTreeMap<&str, usize> = BTreeMap::new();
    for (pos, token) in doc.all_tokens().enumerate() {
        *tf.entry(token).or_insert(0) += 1;
        first_pos.entry(token).or_insert(pos);
    }

    let mut scored: Vec<(&str, f64, usize)> = tf
        .iter()
        .filter(|(t, _)| reference.contains(**t) && !is_stopword(t))
        .map(|(&t, &count)| (t, count as f64 * idf.idf(t), first_pos[t]))
        .filter(|&(_, score, _)| score > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.2.cmp(&b.2)));
    scored.truncate(max_k);

    Ok(KeywordSet::new(
        doc.id.clone(),
        scored.into_iter().map(|(t, _, _)| t),
    ))
}

#[derive(Deserialize)]
struct AspectEntry {
    aspect: String,
    #[serde(default)]
    #[allow(dead_code)]
    prompt: Option<String>,
    keywords: Vec<String>,
}

/// Load aspect keyword sets from a JSON array of
/// `{"aspect", "prompt"?, "keywords"}` objects. The optional prompt is
/// annotator-facing text and is not used by the pipeline. Every aspect must
/// carry at least one keyword.
pub fn load_aspect_keywords(path: &Path) -> Result<Vec<KeywordSet>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let entries: Vec<AspectEntry> = serde_json::from_str(&raw).map_err(|e| Error::MalformedLine {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    entries
        .into_iter()
        .map(|entry| {
            let set = KeywordSet::new(entry.aspect.clone(), entry.keywords);
            if set.is_empty() {
                Err(Error::EmptyKeywordSet { aspect: entry.aspect })
            } else {
                Ok(set)
            }
        })
        .collect()
}

/// The example aspect keyword sets shipped with the library: two earthquake
/// aspects and two fraud aspects.
pub fn example_aspect_sets() -> Vec<KeywordSet> {
    vec![
        KeywordSet::new("geo", ["region", "location", "country", "geography", "miles"]),
        KeywordSet::new("recv", ["recovery", "aid", "survivor", "injury", "death"]),
        KeywordSet::new("pen", ["penalty", "consequences", "jailed", "fined", "court"]),
        KeywordSet::new("nature", ["amount", "money", "bank", "stolen", "time"]),
    ]
}
