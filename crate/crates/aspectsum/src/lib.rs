//! Aspect-oriented extractive summarization: pick the handful of sentences in
//! a news article that cover one angle of the story (where it happened, who
//! was hurt, what the penalty was), steered by a small set of aspect keywords.
//!
//! The pieces, in pipeline order:
//!
//! - [`corpus`]: documents, sentence splitting, tokenization, JSONL io.
//! - [`retrieval`]: route documents to a domain by exemplar similarity.
//! - [`keywords`]: tf-idf keyword extraction and aspect keyword sets.
//! - [`oracle`]: keyword-intensified targets and the greedy extractive
//!   oracle that turns them into per-sentence training labels.
//! - [`model`]: a small logistic sentence scorer trained on oracle labels.
//! - [`baselines`]: keyword-match, lead, and plain-reference-oracle systems.
//! - [`eval`]: soft-label F1 against multiple annotators, its per-document
//!   ceiling, ROUGE, and keyword-sensitivity reports.
//! - [`synth`]: a deterministic synthetic corpus with known ground truth.

pub mod baselines;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod keywords;
pub mod model;
pub mod oracle;
pub mod retrieval;
pub mod synth;

pub use baselines::{keyword_match_baseline, lead_baseline, std_ref_oracle};
pub use corpus::{
    load_annotations, load_corpus, save_annotations, save_corpus, split_sentences, tokenize,
    AnnotationRecord, Corpus, Document, Sentence,
};
pub use embedding::{load_word_vectors, EmbeddingTable};
pub use error::{Error, Result};
pub use eval::{
    agreement_histogram, evaluate, f1_soft, filter_annotations, jaccard, max_f1, rouge_l, rouge_n,
    sensitivity_report, AnnotationSet, EvalReport, SensitivityReport,
};
pub use keywords::{
    build_idf, extract_keywords, is_stopword, load_aspect_keywords, IdfTable, KeywordSet,
    DEFAULT_MAX_K,
};
pub use model::{
    featurize, load_model, predict, save_model, summarize_text, train, FeatureVector, ScorerModel,
    TrainConfig, TrainOutcome, FEATURE_DIM, FEATURE_NAMES,
};
pub use oracle::{
    augment_reference, build_training_set, greedy_oracle, keyword_repeat_count, BuildOptions,
    BuildReport, ScorerKind, SimilarityScorer, TrainingExample, DEFAULT_BUDGET,
};
pub use retrieval::{
    default_exemplars, doc_similarity, retrieve_top, ExemplarQuery, SentenceEncoder, TfIdfEncoder,
    WordVecEncoder,
};
pub use synth::{
    default_aspect_specs, generate_synthetic, write_synth_output, AspectSpec, SynthOutput,
};
