//! Documents, sentences, annotations, and the JSONL files they live in.
//!
//! Everything downstream (keyword extraction, oracle labeling, scoring,
//! evaluation) operates on the types defined here. All types are immutable
//! values after construction and safe to share across threads.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abbreviations that suppress a sentence split after a period.
///
/// Compared case-insensitively against the token immediately preceding the
/// period, with internal periods kept ("U.S." matches as "u.s").
const ABBREVIATIONS: &[&str] = &["mr", "mrs", "dr", "st", "u.s", "a.m", "p.m", "no", "vs"];

/// One sentence of a document: its position, raw text, and token list.
#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    /// 0-based position within the parent document.
    pub index: usize,
    /// Raw text as it appeared in the source.
    pub text: String,
    /// `tokenize(text)`, cached at construction.
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(index: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Sentence { index, text, tokens }
    }
}

/// A document: ordered sentences plus an optional abstractive reference summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
    /// Abstractive reference summary, when the source provides one.
    pub reference: Option<String>,
}

impl Document {
    /// Build a document from raw sentence strings. Fails on an empty id or
    /// an empty sentence list.
    pub fn new(
        id: impl Into<String>,
        sentence_texts: Vec<String>,
        reference: Option<String>,
    ) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidInput("document id must be nonempty".into()));
        }
        if sentence_texts.is_empty() {
            return Err(Error::EmptyDocument { id });
        }
        let sentences = sentence_texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| Sentence::new(i, t))
            .collect();
        Ok(Document { id, sentences, reference })
    }

    /// Build a document by sentence-splitting raw text.
    pub fn from_text(id: impl Into<String>, text: &str, reference: Option<String>) -> Result<Self> {
        Self::new(id, split_sentences(text), reference)
    }

    /// Keep only the first `max_sentences` sentences; the reference is unchanged.
    ///
    /// `max_sentences` must be at least 1.
    pub fn truncate(&self, max_sentences: usize) -> Document {
        assert!(max_sentences >= 1, "max_sentences must be >= 1");
        let kept = self.sentences.len().min(max_sentences);
        Document {
            id: self.id.clone(),
            sentences: self.sentences[..kept]
                .iter()
                .enumerate()
                .map(|(i, s)| Sentence {
                    index: i,
                    text: s.text.clone(),
                    tokens: s.tokens.clone(),
                })
                .collect(),
            reference: self.reference.clone(),
        }
    }

    /// All tokens of the document in sentence order.
    pub fn all_tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.as_str()))
    }

    /// Tokenized reference summary, if a reference is present and nonempty.
    pub fn reference_tokens(&self) -> Option<Vec<String>> {
        self.reference
            .as_deref()
            .filter(|r| !r.trim().is_empty())
            .map(tokenize)
    }
}

/// Concatenate several documents into one, renumbering sentences contiguously.
/// References of the parts, where present, are joined by newlines.
pub fn concat_documents(docs: &[Document], new_id: impl Into<String>) -> Result<Document> {
    if docs.is_empty() {
        return Err(Error::InvalidInput(
            "cannot concatenate an empty document list".into(),
        ));
    }
    let texts: Vec<String> = docs
        .iter()
        .flat_map(|d| d.sentences.iter().map(|s| s.text.clone()))
        .collect();
    let joined_refs: Vec<&str> = docs.iter().filter_map(|d| d.reference.as_deref()).collect();
    let reference = if joined_refs.is_empty() {
        None
    } else {
        Some(joined_refs.join("\n"))
    };
    Document::new(new_id, texts, reference)
}

/// An ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    /// Where the corpus came from (file path or a generator tag).
    pub provenance: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateDocId { id: doc.id.clone() });
            }
        }
        Ok(Corpus {
            documents,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    /// Truncate every document to at most `max_sentences` sentences.
    pub fn truncate_all(&self, max_sentences: usize) -> Corpus {
        Corpus {
            documents: self
                .documents
                .iter()
                .map(|d| d.truncate(max_sentences))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Per-annotator 0-3 ratings for one article, one value per sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub doc_id: String,
    pub annotator_id: String,
    pub ratings: Vec<u8>,
}

impl AnnotationRecord {
    pub fn new(
        doc_id: impl Into<String>,
        annotator_id: impl Into<String>,
        ratings: Vec<u8>,
    ) -> Result<Self> {
        let doc_id = doc_id.into();
        let annotator_id = annotator_id.into();
        if let Some(&bad) = ratings.iter().find(|&&r| r > 3) {
            return Err(Error::InvalidRating {
                doc_id,
                annotator: annotator_id,
                value: bad as i64,
            });
        }
        Ok(AnnotationRecord {
            doc_id,
            annotator_id,
            ratings,
        })
    }

    /// Sentences the annotator put in their summary: every index rated >= 1.
    pub fn selected_set(&self) -> BTreeSet<usize> {
        self.ratings
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >= 1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Lowercase a string and split it into tokens on every non-alphanumeric
/// character. Empty pieces are dropped; digits are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(str::to_string)
        .collect()
}

/// Rule-based sentence splitter for news prose.
///
/// Splits at `.`, `!`, or `?` followed by whitespace and an uppercase letter
/// (or end of text), except when the period closes a known abbreviation.
/// Joining the output, modulo whitespace, reconstructs the input.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let c = chars[i];
        if c == '.' || c == '!' || c == '?' {
            // Skip whitespace after the terminal.
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            let at_end = j >= chars.len();
            let next_upper = !at_end && chars[j].is_uppercase();
            let abbreviation = c == '.' && ends_with_abbreviation(&chars[..i]);
            if (at_end || next_upper) && !abbreviation && j > i + 1 {
                let sentence: String = chars[start..=i].iter().collect();
                let trimmed = sentence.trim();
                if !trimmed.is_empty() {
                    sentences.push(trimmed.to_string());
                }
                start = j;
                i = j;
                continue;
            }
        }
        i += 1;
    }

    let tail: String = chars[start.min(chars.len())..].iter().collect();
    let trimmed = tail.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    sentences
}

/// True when the characters leading up to a period end in a known abbreviation.
fn ends_with_abbreviation(before: &[char]) -> bool {
    let mut word: Vec<char> = Vec::new();
    for &c in before.iter().rev() {
        if c.is_alphanumeric() || c == '.' {
            word.push(c);
        } else {
            break;
        }
    }
    word.reverse();
    let word: String = word.into_iter().collect::<String>().to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

#[derive(Serialize, Deserialize)]
struct DocumentRecord {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sentences: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<String>,
}

/// Load a corpus from a JSONL file: one document object per line, with either
/// a `sentences` array or a raw `text` field, plus an optional `summary`.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DocumentRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: e.to_string(),
            })?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateDocId { id: record.id });
        }
        let sentence_texts = match (record.sentences, record.text) {
            (Some(sentences), _) => sentences,
            (None, Some(text)) => split_sentences(&text),
            (None, None) => {
                return Err(Error::MalformedLine {
                    path: path.display().to_string(),
                    line: line_no + 1,
                    message: "record has neither \"sentences\" nor \"text\"".into(),
                })
            }
        };
        if sentence_texts.is_empty() {
            return Err(Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: format!("document {:?} has no sentences", record.id),
            });
        }
        documents.push(Document::new(record.id, sentence_texts, record.summary)?);
    }

    Corpus::new(documents, path.display().to_string())
}

/// Serialize a corpus to JSONL, one `{"id","sentences","summary"?}` object
/// per line. `load_corpus` on the output reproduces the corpus.
pub fn corpus_to_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let record = DocumentRecord {
            id: doc.id.clone(),
            sentences: Some(doc.sentences.iter().map(|s| s.text.clone()).collect()),
            text: None,
            summary: doc.reference.clone(),
        };
        out.push_str(&serde_json::to_string(&record).expect("document record serializes"));
        out.push('\n');
    }
    out
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(corpus_to_jsonl(corpus).as_bytes())
        .map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct AnnotationRecordJson {
    doc_id: String,
    annotator: String,
    ratings: Vec<i64>,
}

/// Load annotation records from a JSONL file of
/// `{"doc_id","annotator","ratings"}` objects. Ratings outside 0..=3 are
/// rejected.
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: AnnotationRecordJson =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: e.to_string(),
            })?;
        if let Some(&bad) = raw.ratings.iter().find(|&&r| !(0..=3).contains(&r)) {
            return Err(Error::InvalidRating {
                doc_id: raw.doc_id,
                annotator: raw.annotator,
                value: bad,
            });
        }
        records.push(AnnotationRecord {
            doc_id: raw.doc_id,
            annotator_id: raw.annotator,
            ratings: raw.ratings.into_iter().map(|r| r as u8).collect(),
        });
    }
    Ok(records)
}

pub fn annotations_to_jsonl(records: &[AnnotationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let raw = AnnotationRecordJson {
            doc_id: r.doc_id.clone(),
            annotator: r.annotator_id.clone(),
            ratings: r.ratings.iter().map(|&v| v as i64).collect(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("annotation record serializes"));
        out.push('\n');
    }
    out
}

pub fn save_annotations(records: &[AnnotationRecord], path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(annotations_to_jsonl(records).as_bytes())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(id: &str, texts: &[&str]) -> Document {
        Document::new(id, texts.iter().map(|s| s.to_string()).collect(), None).unwrap()
    }

    #[test]
    fn tokenize_splits_on_non_alphanumeric() {
        assert_eq!(
            tokenize("The quake, 7.2-magnitude!"),
            vec!["the", "quake", "7", "2", "magnitude"]
        );
    }

    #[test]
    fn tokenize_folds_case() {
        assert_eq!(tokenize("AID aid Aid"), vec!["aid", "aid", "aid"]);
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn split_on_terminal_before_uppercase() {
        assert_eq!(
            split_sentences("A quake hit. Aid arrived."),
            vec!["A quake hit.", "Aid arrived."]
        );
    }

    #[test]
    fn split_keeps_abbreviations_together() {
        assert_eq!(split_sentences("Dr. Smith spoke."), vec!["Dr. Smith spoke."]);
        assert_eq!(
            split_sentences("The U.S. Geological Survey reported it."),
            vec!["The U.S. Geological Survey reported it."]
        );
        assert_eq!(
            split_sentences("It hit at 5 a.m. Rescue began at 6 a.m."),
            vec!["It hit at 5 a.m. Rescue began at 6 a.m."]
        );
    }

    #[test]
    fn split_empty_is_empty() {
        assert!(split_sentences("").is_empty());
    }

    #[test]
    fn split_requires_uppercase_continuation() {
        assert_eq!(
            split_sentences("It was 7.2 magnitude. the rest followed"),
            vec!["It was 7.2 magnitude. the rest followed"]
        );
        assert_eq!(
            split_sentences("Strong! Very strong? Yes."),
            vec!["Strong!", "Very strong?", "Yes."]
        );
    }

    fn squash_ws(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn split_reconstructs_input_modulo_whitespace() {
        let text = "Mr. Jones saw it. The quake hit at 7 a.m. near Oaxaca! Who responded? Aid teams did.";
        let parts = split_sentences(text);
        assert_eq!(squash_ws(&parts.join(" ")), squash_ws(text));
    }

    #[test]
    fn truncate_keeps_leading_sentences() {
        let d = doc(
            "a",
            &["s0.", "s1.", "s2.", "s3.", "s4.", "s5.", "s6.", "s7.", "s8.", "s9.", "s10.", "s11."],
        );
        let t = d.truncate(10);
        assert_eq!(t.sentences.len(), 10);
        assert_eq!(t.sentences[9].text, "s9.");
        assert_eq!(
            t.sentences.iter().map(|s| s.index).collect::<Vec<_>>(),
            (0..10).collect::<Vec<_>>()
        );

        let short = doc("b", &["x.", "y.", "z."]);
        assert_eq!(short.truncate(10), short);

        let one = doc("c", &["p.", "q.", "r.", "s.", "t."]).truncate(1);
        assert_eq!(one.sentences.len(), 1);
        assert_eq!(one.sentences[0].text, "p.");
    }

    #[test]
    fn truncate_is_idempotent() {
        let d = doc("a", &["s0.", "s1.", "s2.", "s3.", "s4."]);
        for k in 1..=6 {
            assert_eq!(d.truncate(k).truncate(k), d.truncate(k));
        }
    }

    #[test]
    fn concat_renumbers_contiguously() {
        let a = doc("a", &["a0.", "a1."]);
        let b = doc("b", &["b0.", "b1.", "b2."]);
        let merged = concat_documents(&[a, b], "merged").unwrap();
        assert_eq!(merged.sentences.len(), 5);
        assert_eq!(
            merged.sentences.iter().map(|s| s.index).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(merged.sentences[2].text, "b0.");

        let single = concat_documents(&[doc("a", &["a0."])], "renamed").unwrap();
        assert_eq!(single.id, "renamed");
        assert_eq!(single.sentences[0].text, "a0.");

        assert!(concat_documents(&[], "empty").is_err());
    }

    #[test]
    fn annotation_selected_set_is_threshold_one() {
        let rec = AnnotationRecord::new("d", "ann1", vec![0, 1, 3, 0, 2]).unwrap();
        assert_eq!(rec.selected_set(), BTreeSet::from([1, 2, 4]));
        assert!(rec.selected_set().iter().all(|&i| i < rec.ratings.len()));
    }

    #[test]
    fn annotation_rejects_out_of_scale_rating() {
        assert!(AnnotationRecord::new("d", "ann1", vec![0, 4]).is_err());
    }

    #[test]
    fn load_corpus_maps_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        fs::write(
            &path,
            r#"{"id":"a","sentences":["S one.","S two."],"summary":"ref"}"#,
        )
        .unwrap();
        let corpus = load_corpus(&path).unwrap();
        assert_eq!(corpus.len(), 1);
        let d = &corpus.documents[0];
        assert_eq!(d.sentences.len(), 2);
        assert_eq!(d.reference.as_deref(), Some("ref"));
    }

    #[test]
    fn load_corpus_empty_file_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        fs::write(&path, "").unwrap();
        assert!(load_corpus(&path).unwrap().is_empty());
    }

    #[test]
    fn load_corpus_rejects_duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        fs::write(
            &path,
            "{\"id\":\"a\",\"text\":\"One.\"}\n{\"id\":\"a\",\"text\":\"Two.\"}\n",
        )
        .unwrap();
        match load_corpus(&path) {
            Err(Error::DuplicateDocId { id }) => assert_eq!(id, "a"),
            other => panic!("expected duplicate-id error, got {other:?}"),
        }
    }

    #[test]
    fn load_corpus_names_malformed_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        fs::write(&path, "{\"id\":\"a\",\"text\":\"One.\"}\nnot json\n").unwrap();
        match load_corpus(&path) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed-line error, got {other:?}"),
        }
    }

    #[test]
    fn load_corpus_splits_text_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        fs::write(&path, r#"{"id":"a","text":"A quake hit. Aid arrived."}"#).unwrap();
        let corpus = load_corpus(&path).unwrap();
        assert_eq!(corpus.documents[0].sentences.len(), 2);
    }

    #[test]
    fn corpus_round_trips_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        fs::write(
            &path,
            concat!(
                "{\"id\":\"a\",\"sentences\":[\"S one.\",\"S two.\"],\"summary\":\"ref\"}\n",
                "{\"id\":\"b\",\"text\":\"Quake hit. Town shook.\"}\n",
            ),
        )
        .unwrap();
        let first = load_corpus(&path).unwrap();
        let again = dir.path().join("again.jsonl");
        save_corpus(&first, &again).unwrap();
        let second = load_corpus(&again).unwrap();
        assert_eq!(first.documents, second.documents);
    }

    #[test]
    fn annotations_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.jsonl");
        let records = vec![
            AnnotationRecord::new("a", "ann1", vec![0, 2, 1]).unwrap(),
            AnnotationRecord::new("a", "ann2", vec![3, 0, 0]).unwrap(),
        ];
        save_annotations(&records, &path).unwrap();
        assert_eq!(load_annotations(&path).unwrap(), records);
    }

    #[test]
    fn load_annotations_rejects_bad_rating() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.jsonl");
        fs::write(&path, r#"{"doc_id":"a","annotator":"x","ratings":[0,5]}"#).unwrap();
        assert!(matches!(
            load_annotations(&path),
            Err(Error::InvalidRating { value: 5, .. })
        ));
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent_on_joined_output(text in ".{0,200}") {
            let once = tokenize(&text);
            let again = tokenize(&once.join(" "));
            prop_assert_eq!(once, again);
        }

        #[test]
        fn split_reconstruction_holds(words in proptest::collection::vec("[A-Za-z]{1,8}[.!?]?", 0..30)) {
            let text = words.join(" ");
            let parts = split_sentences(&text);
            prop_assert_eq!(squash_ws(&parts.join(" ")), squash_ws(&text));
        }

        #[test]
        fn truncate_never_grows(n in 1usize..12, k in 1usize..15) {
            let texts: Vec<String> = (0..n).map(|i| format!("s{i}.")).collect();
            let d = Document::new("p", texts, None).unwrap();
            let t = d.truncate(k);
            prop_assert_eq!(t.sentences.len(), n.min(k));
            prop_assert!(t.sentences.iter().enumerate().all(|(i, s)| s.index == i));
        }
    }
}
