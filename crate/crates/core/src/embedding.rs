//! Word-vector table and the similarity measures built on it.
//!
//! Vector files use the common text interchange layout: a header line
//! `count dimension`, then one `token v1 … vd` line per word. Every vector
//! is normalized to unit length on load, so cosine similarity is a plain
//! dot product.

use std::io::BufRead;

use indexmap::IndexMap;

use crate::error::{DocumentError, EmbeddingError};

pub const DEFAULT_THRESHOLD: f64 = 0.90;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityConfig {
    threshold: f64,
}

impl SimilarityConfig {
    pub fn new(threshold: f64) -> Result<Self, EmbeddingError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(EmbeddingError::BadThreshold(threshold));
        }
        Ok(SimilarityConfig { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: IndexMap<String, Vec<f64>>,
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0)
}

impl EmbeddingTable {
    /// Builds a table from in-memory vectors; each is normalized.
    pub fn from_vectors<'a>(
        dimension: usize,
        entries: impl IntoIterator<Item = (&'a str, Vec<f64>)>,
    ) -> Result<Self, DocumentError> {
        let mut table = EmbeddingTable {
            dimension,
            vectors: IndexMap::new(),
        };
        for (i, (token, v)) in entries.into_iter().enumerate() {
            table.insert(i + 1, token, v)?;
        }
        Ok(table)
    }

    fn insert(&mut self, line: usize, token: &str, mut v: Vec<f64>) -> Result<(), DocumentError> {
        let err = |message: String| DocumentError::Embedding { line, message };
        if v.len() != self.dimension {
            return Err(err(format!(
                "token {token:?} has {} components, expected {}",
                v.len(),
                self.dimension
            )));
        }
        if !normalize(&mut v) {
            return Err(err(format!("token {token:?} has a zero or non-finite vector")));
        }
        let token = token.to_lowercase();
        if self.vectors.contains_key(&token) {
            log::warn!("embedding line {line}: duplicate token {token:?} ignored");
            return Ok(());
        }
        self.vectors.insert(token, v);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl BufRead) -> Result<Self, DocumentError> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, Ok(l))) if l.trim().is_empty() => continue,
                Some((_, Ok(l))) => break l,
                Some((i, Err(e))) => {
                    return Err(DocumentError::Embedding {
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
                None => {
                    return Err(DocumentError::Embedding {
                        line: 1,
                        message: "missing `count dimension` header".into(),
                    })
                }
            }
        };
        let header_err = || DocumentError::Embedding {
            line: 1,
            message: format!("bad header {header:?}, expected `count dimension`"),
        };
        let mut parts = header.split_whitespace();
        let count: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(header_err)?;
        let dimension: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(header_err)?;
        if dimension == 0 || parts.next().is_some() {
            return Err(header_err());
        }

        let mut table = EmbeddingTable {
            dimension,
            vectors: IndexMap::with_capacity(count),
        };
        let mut seen = 0;
        for (i, line) in lines {
            let line_no = i + 1;
            let line = line.map_err(|e| DocumentError::Embedding {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-empty line has a token");
            let v = fields
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DocumentError::Embedding {
                    line: line_no,
                    message: format!("token {token:?}: {e}"),
                })?;
            table.insert(line_no, token, v)?;
            seen += 1;
        }
        if seen != count {
            return Err(DocumentError::Embedding {
                line: 1,
                message: format!("header announces {count} vectors, file has {seen}"),
            });
        }
        Ok(table)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// Unit vector for a (possibly multi-word) name: the renormalized mean
    /// of its known tokens. `None` when no token is known.
    pub fn embed(&self, phrase: &str) -> Option<Vec<f64>> {
        let known: Vec<&Vec<f64>> = phrase
            .split_whitespace()
            .filter_map(|t| self.vectors.get(&t.to_lowercase()))
            .collect();
        match known.as_slice() {
            [] => None,
            [one] => Some((*one).clone()),
            many => {
                let mut mean = vec![0.0; self.dimension];
                for v in many {
                    for (m, x) in mean.iter_mut().zip(v.iter()) {
                        *m += x;
                    }
                }
                normalize(&mut mean).then_some(mean)
            }
        }
    }

    /// Cosine similarity; exact string match (1 or 0) when either side has
    /// no embedding.
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        match (self.embed(a), self.embed(b)) {
            (Some(x), Some(y)) => dot(&x, &y),
            _ => exact_match(a, b),
        }
    }

    /// Counts pairs `(i, s)` in `ingredients × reference` whose similarity
    /// exceeds the threshold. One ingredient may match several entries.
    pub fn compute_similarity<A: AsRef<str>, B: AsRef<str>>(
        &self,
        cfg: &SimilarityConfig,
        ingredients: &[A],
        reference: &[B],
    ) -> usize {
        let left: Vec<(&str, Option<Vec<f64>>)> = ingredients
            .iter()
            .map(|i| (i.as_ref(), self.embed(i.as_ref())))
            .collect();
        let right: Vec<(&str, Option<Vec<f64>>)> = reference
            .iter()
            .map(|s| (s.as_ref(), self.embed(s.as_ref())))
            .collect();
        let mut count = 0;
        for (a, va) in &left {
            for (b, vb) in &right {
                let score = match (va, vb) {
                    (Some(x), Some(y)) => dot(x, y),
                    _ => exact_match(a, b),
                };
                if score > cfg.threshold {
                    count += 1;
                }
            }
        }
        count
    }

    /// True when `name` is above threshold against any entry of `set`.
    pub fn is_similar_to_any<S: AsRef<str>>(&self, cfg: &SimilarityConfig, name: &str, set: &[S]) -> bool {
        let v = self.embed(name);
        set.iter().any(|s| {
            let s = s.as_ref();
            let score = match (&v, self.embed(s)) {
                (Some(x), Some(y)) => dot(x, &y),
                _ => exact_match(name, s),
            };
            score > cfg.threshold
        })
    }

    /// The candidate most similar to `target`, with confidence in percent.
    /// Ties go to the lexicographically smallest name.
    pub fn nearest_ingredient<S: AsRef<str>>(
        &self,
        target: &str,
        candidates: &[S],
    ) -> Result<(String, f64), EmbeddingError> {
        if candidates.is_empty() {
            return Err(EmbeddingError::NoCandidates(target.to_string()));
        }
        if candidates.iter().any(|c| c.as_ref() == target) {
            return Ok((target.to_string(), 100.0));
        }
        let Some(tv) = self.embed(target) else {
            return Err(EmbeddingError::NoBasis(target.to_string()));
        };
        let mut best: Option<(f64, &str)> = None;
        for c in candidates {
            let c = c.as_ref();
            let Some(cv) = self.embed(c) else { continue };
            let score = dot(&tv, &cv);
            let better = match best {
                None => true,
                Some((bs, bn)) => score > bs || (score == bs && c < bn),
            };
            if better {
                best = Some((score, c));
            }
        }
        best.map(|(s, n)| (n.to_string(), 100.0 * s))
            .ok_or_else(|| EmbeddingError::NoBasis(target.to_string()))
    }
}

fn exact_match(a: &str, b: &str) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}
