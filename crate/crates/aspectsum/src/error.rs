//! Error type shared across the library.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedLine {
        path: String,
        line: usize,
        message: String,
    },

    #[error("duplicate document id {id:?}")]
    DuplicateDocId { id: String },

    #[error("document {id:?} has no sentences")]
    EmptyDocument { id: String },

    #[error("document {id:?} has no reference summary")]
    MissingReference { id: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("vector dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("rating {value} for document {doc_id:?} by {annotator:?} is outside 0..=3")]
    InvalidRating {
        doc_id: String,
        annotator: String,
        value: i64,
    },

    #[error("aspect {aspect:?} has an empty keyword list")]
    EmptyKeywordSet { aspect: String },

    #[error("keyword count must be at least 1")]
    NoKeywords,

    #[error("all annotators for document {doc_id:?} were discarded by the overlap filter")]
    AllAnnotatorsDiscarded { doc_id: String },

    #[error("{0}")]
    InvalidInput(String),

    #[error("exhaustive search over {n_sentences} sentences exceeds the {limit}-sentence bound; sample documents or truncate before computing the bound")]
    EnumerationTooLarge { n_sentences: usize, limit: usize },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
