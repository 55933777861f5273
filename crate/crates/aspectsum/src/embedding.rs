//! Word-vector tables loaded from plain-text files.
//!
//! File format: one line per token, `token v1 v2 ... vd`, whitespace
//! separated. Vectors are L2-normalized on load so dot products are cosines.
//! Tokens absent from the table fall back to exact-match semantics: similarity
//! 1 to an identical token, 0 to everything else.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    vectors: HashMap<String, Vec<f64>>,
    dim: usize,
}

impl EmbeddingTable {
    /// A table with no entries: every token is out-of-vocabulary, so token
    /// similarity degenerates to exact string match.
    pub fn empty() -> Self {
        EmbeddingTable::default()
    }

    /// Build from (token, vector) pairs; normalizes each vector.
    /// Duplicate tokens keep the last entry.
    pub fn from_pairs(pairs: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut table = EmbeddingTable::default();
        for (token, vector) in pairs {
            table.insert(token, vector)?;
        }
        Ok(table)
    }

    fn insert(&mut self, token: String, vector: Vec<f64>) -> Result<()> {
        if self.vectors.is_empty() {
            self.dim = vector.len();
        } else if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: vector.len(),
            });
        }
        let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput(format!(
                "vector for token {token:?} has zero or non-finite norm"
            )));
        }
        let unit: Vec<f64> = vector.into_iter().map(|v| v / norm).collect();
        self.vectors.insert(token, unit);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    /// Unit vector for a stored token.
    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// Cosine similarity between two tokens.
    ///
    /// Both in the table: dot product of their unit vectors. Either one
    /// out-of-vocabulary: 1.0 on exact string match, otherwise 0.0.
    pub fn token_similarity(&self, a: &str, b: &str) -> f64 {
        match (self.vectors.get(a), self.vectors.get(b)) {
            (Some(va), Some(vb)) => dot(va, vb).clamp(-1.0, 1.0),
            _ => {
                if a == b {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Mean of the unit vectors of those tokens present in the table.
    /// None when no token is covered (or the table is empty).
    pub fn mean_vector<'a, I>(&self, tokens: I) -> Option<Vec<f64>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut acc = vec![0.0; self.dim];
        let mut count = 0usize;
        for token in tokens {
            if let Some(v) = self.vectors.get(token) {
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
                count += 1;
            }
        }
        if count == 0 {
            return None;
        }
        for a in &mut acc {
            *a /= count as f64;
        }
        Some(acc)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine similarity of two raw vectors; 0 when either has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

/// Load a word-vector file: one `token v1 v2 ... vd` line per token.
/// Blank lines are skipped; dimensions must agree across lines.
pub fn load_word_vectors(path: &Path) -> Result<EmbeddingTable> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table = EmbeddingTable::default();
    for (line_no, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().expect("nonblank line has a first field");
        let values: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>().map_err(|_| Error::MalformedLine {
                    path: path.display().to_string(),
                    line: line_no + 1,
                    message: format!("bad vector component {p:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(Error::MalformedLine {
                path: path.display().to_string(),
                line: line_no + 1,
                message: format!("token {token:?} has no vector components"),
            });
        }
        table
            .insert(token.to_string(), values)
            .map_err(|e| match e {
                Error::DimensionMismatch { left, right } => Error::MalformedLine {
                    path: path.display().to_string(),
                    line: line_no + 1,
                    message: format!("vector dimension {right} differs from {left}"),
                },
                other => other,
            })?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_normalizes_vectors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "car 3 0 4\nroad 0 1 0\n").unwrap();
        let table = load_word_vectors(&path).unwrap();
        assert_eq!(table.dim(), 3);
        assert_eq!(table.len(), 2);
        let v = table.vector("car").unwrap();
        assert!((v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
        assert!((v[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn load_rejects_dimension_drift() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "a 1 0\nb 1 0 0\n").unwrap();
        assert!(matches!(
            load_word_vectors(&path),
            Err(Error::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn load_rejects_unparseable_component() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "a 1 zero\n").unwrap();
        assert!(matches!(
            load_word_vectors(&path),
            Err(Error::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn load_rejects_zero_vector() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "a 0 0 0\n").unwrap();
        assert!(load_word_vectors(&path).is_err());
    }

    #[test]
    fn token_similarity_uses_vectors_when_present() {
        let table = EmbeddingTable::from_pairs(vec![
            ("car".into(), vec![1.0, 0.0]),
            ("automobile".into(), vec![1.0, 0.0]),
            ("banana".into(), vec![0.0, 1.0]),
        ])
        .unwrap();
        assert!((table.token_similarity("car", "automobile") - 1.0).abs() < 1e-12);
        assert_eq!(table.token_similarity("car", "banana"), 0.0);
    }

    #[test]
    fn token_similarity_falls_back_to_exact_match() {
        let table = EmbeddingTable::empty();
        assert_eq!(table.token_similarity("same", "same"), 1.0);
        assert_eq!(table.token_similarity("same", "other"), 0.0);
        // One side in vocabulary, the other not: still exact-match semantics.
        let partial =
            EmbeddingTable::from_pairs(vec![("car".into(), vec![1.0, 0.0])]).unwrap();
        assert_eq!(partial.token_similarity("car", "truck"), 0.0);
    }

    #[test]
    fn cosine_handles_zero_norm() {
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        assert!((cosine(&[1.0, 1.0], &[1.0, 1.0]) - 1.0).abs() < 1e-12);
        assert!((cosine(&[1.0, 0.0], &[0.0, 2.0])).abs() < 1e-12);
    }

    #[test]
    fn mean_vector_covers_known_tokens_only() {
        let table = EmbeddingTable::from_pairs(vec![
            ("a".into(), vec![1.0, 0.0]),
            ("b".into(), vec![0.0, 1.0]),
        ])
        .unwrap();
        let mean = table.mean_vector(["a", "b", "zz"]).unwrap();
        assert!((mean[0] - 0.5).abs() < 1e-12);
        assert!((mean[1] - 0.5).abs() < 1e-12);
        assert!(table.mean_vector(["zz"]).is_none());
    }
}
