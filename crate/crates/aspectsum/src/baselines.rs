//! Non-learned comparison systems: keyword-occurrence matching, lead, and
//! the greedy oracle against the plain reference.

use crate::corpus::{tokenize, Document};
use crate::error::{Error, Result};
use crate::keywords::KeywordSet;
use crate::oracle::{greedy_oracle, SimilarityScorer};

fn sentence_contains_keyword(doc: &Document, index: usize, keyword: &str) -> bool {
    let kw_tokens = tokenize(keyword);
    if kw_tokens.is_empty() {
        return false;
    }
    let tokens = &doc.sentences[index].tokens;
    kw_tokens.iter().all(|k| tokens.contains(k))
}

/// For each keyword in order, select the lowest-index not-yet-selected
/// sentence containing it; keywords that never occur contribute nothing.
/// When fewer than `m` sentences are found, pad with the earliest unselected
/// sentences. Output is in document order, capped at min(m, sentence count).
pub fn keyword_match_baseline(doc: &Document, keywords: &KeywordSet, m: usize) -> Vec<usize> {
    assert!(m >= 1, "m must be >= 1");
    let n = doc.sentences.len();
    let mut selected = vec![false; n];
    let mut count = 0usize;

    for keyword in &keywords.keywords {
        if count == m {
            break;
        }
        if let Some(i) = (0..n).find(|&i| !selected[i] && sentence_contains_keyword(doc, i, keyword))
        {
            selected[i] = true;
            count += 1;
        }
    }
    // Lead padding for the under-fill case.
    for slot in selected.iter_mut() {
        if count == m {
            break;
        }
        if !*slot {
            *slot = true;
            count += 1;
        }
    }
    (0..n).filter(|&i| selected[i]).collect()
}

/// The first min(m, n) sentences.
pub fn lead_baseline(doc: &Document, m: usize) -> Vec<usize> {
    assert!(m >= 1, "m must be >= 1");
    (0..doc.sentences.len().min(m)).collect()
}

/// Greedy oracle against the document's own unmodified reference summary.
pub fn std_ref_oracle(
    doc: &Document,
    scorer: &dyn SimilarityScorer,
    budget: usize,
) -> Result<Vec<usize>> {
    let reference = doc
        .reference_tokens()
        .ok_or_else(|| Error::MissingReference { id: doc.id.clone() })?;
    Ok(greedy_oracle(doc, &reference, scorer, budget).selected_indices())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::oracle::{exhaustive_oracle_score, greedy_oracle_with_scores, Rouge2Scorer};

    fn doc(id: &str, texts: &[&str]) -> Document {
        Document::new(id, texts.iter().map(|s| s.to_string()).collect(), None).unwrap()
    }

    fn five_sentence_doc() -> Document {
        doc(
            "d",
            &[
                "Markets opened flat today.",
                "Aid convoys reached the town.",
                "Weather stayed dry overnight.",
                "The region declared an emergency.",
                "Officials promised more aid soon.",
            ],
        )
    }

    #[test]
    fn keyword_baseline_takes_first_occurrences_in_document_order() {
        let d = five_sentence_doc();
        // "region" first occurs in sentence 3, "aid" in sentence 1.
        let kws = KeywordSet::new("x", ["region", "aid"]);
        assert_eq!(keyword_match_baseline(&d, &kws, 2), vec![1, 3]);
    }

    #[test]
    fn keyword_baseline_falls_back_to_lead() {
        let d = five_sentence_doc();
        let kws = KeywordSet::new("x", ["zeppelin", "quasar"]);
        assert_eq!(keyword_match_baseline(&d, &kws, 3), vec![0, 1, 2]);
    }

    #[test]
    fn keyword_baseline_shared_sentence_advances_to_next_occurrence() {
        let d = doc(
            "d",
            &[
                "Nothing relevant here.",
                "Quake aid arrived together.",
                "Another plain sentence.",
                "More aid came later.",
            ],
        );
        // Both keywords hit sentence 1 first; the second keyword moves on to
        // its next occurrence at sentence 3.
        let kws = KeywordSet::new("x", ["quake", "aid"]);
        assert_eq!(keyword_match_baseline(&d, &kws, 2), vec![1, 3]);
        // With no second occurrence the keyword contributes nothing and lead
        // padding fills the gap.
        let kws = KeywordSet::new("x", ["quake", "arrived"]);
        assert_eq!(keyword_match_baseline(&d, &kws, 2), vec![0, 1]);
    }

    #[test]
    fn keyword_baseline_caps_at_m_and_at_sentence_count() {
        let d = five_sentence_doc();
        let kws = KeywordSet::new("x", ["aid", "region", "markets", "weather"]);
        assert_eq!(keyword_match_baseline(&d, &kws, 2).len(), 2);
        let short = doc("s", &["Only aid here.", "And nothing else."]);
        assert_eq!(keyword_match_baseline(&short, &kws, 5), vec![0, 1]);
    }

    #[test]
    fn keyword_baseline_ignores_absent_keywords() {
        let d = five_sentence_doc();
        let with_ghost = KeywordSet::new("x", ["ghost", "aid", "phantom"]);
        let without = KeywordSet::new("x", ["aid"]);
        assert_eq!(
            keyword_match_baseline(&d, &with_ghost, 1),
            keyword_match_baseline(&d, &without, 1)
        );
    }

    #[test]
    fn lead_baseline_arithmetic() {
        let d = five_sentence_doc();
        assert_eq!(lead_baseline(&d, 3), vec![0, 1, 2]);
        assert_eq!(lead_baseline(&d, 1), vec![0]);
        let short = doc("s", &["One.", "Two."]);
        assert_eq!(lead_baseline(&short, 3), vec![0, 1]);
    }

    #[test]
    fn std_ref_matches_exact_sentence() {
        let texts = [
            "Markets opened flat.",
            "Weather stayed dry.",
            "Traffic was light.",
            "Concerts were cancelled.",
            "The region declared an emergency.",
        ];
        let d = Document::new(
            "d",
            texts.iter().map(|s| s.to_string()).collect(),
            Some("The region declared an emergency.".to_string()),
        )
        .unwrap();
        assert_eq!(std_ref_oracle(&d, &Rouge2Scorer, 3).unwrap(), vec![4]);
    }

    #[test]
    fn std_ref_requires_reference() {
        let d = five_sentence_doc();
        assert!(matches!(
            std_ref_oracle(&d, &Rouge2Scorer, 3),
            Err(Error::MissingReference { .. })
        ));
        let blank = Document::new("b", vec!["One sentence.".to_string()], Some("  ".to_string()))
            .unwrap();
        assert!(std_ref_oracle(&blank, &Rouge2Scorer, 3).is_err());
    }

    #[test]
    fn std_ref_shares_the_greedy_code_path() {
        let d = Document::new(
            "d",
            vec![
                "The quake struck the coast.".to_string(),
                "Aid workers arrived fast.".to_string(),
                "Unrelated sports news followed.".to_string(),
            ],
            Some("Quake struck the coast and aid workers arrived".to_string()),
        )
        .unwrap();
        let reference = d.reference_tokens().unwrap();
        let direct = greedy_oracle_with_scores(&d, &reference, &Rouge2Scorer, 3)
            .0
            .selected_indices();
        assert_eq!(std_ref_oracle(&d, &Rouge2Scorer, 3).unwrap(), direct);
    }

    #[test]
    fn std_ref_attains_exhaustive_best_on_disjoint_vocab_doc() {
        let d = Document::new(
            "d",
            vec![
                "alpha beta gamma delta.".to_string(),
                "epsilon zeta eta theta.".to_string(),
                "iota kappa lambda mu.".to_string(),
                "nu xi omicron pi.".to_string(),
                "rho sigma tau upsilon.".to_string(),
                "phi chi psi omega.".to_string(),
            ],
            Some("alpha beta gamma delta epsilon zeta eta theta".to_string()),
        )
        .unwrap();
        let reference = d.reference_tokens().unwrap();
        let (sel, scores) = greedy_oracle_with_scores(&d, &reference, &Rouge2Scorer, 3);
        let best = exhaustive_oracle_score(&d, &reference, &Rouge2Scorer, 3).unwrap();
        assert!((scores.last().unwrap() - best).abs() < 1e-12);
        assert_eq!(sel.selected_indices(), vec![0, 1]);
    }
}
