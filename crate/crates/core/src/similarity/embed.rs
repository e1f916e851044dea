use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::frontend::lexer::token_texts;
use crate::ids::fnv1a64;

pub const DEFAULT_DIM: usize = 256;

/// Fixed-dimension code vector, L2-normalized unless all zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn zeros(dim: usize) -> Self {
        Embedding(vec![0.0; dim])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for x in &mut self.0 {
                *x /= n;
            }
        }
        self
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        // rounding can push parallel vectors just past 1
        (dot / (nu * nv)).clamp(-1.0, 1.0)
    }
}

pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, code: &str) -> Embedding;
    fn dim(&self) -> usize;
}

/// Hashed bag of token 1- to 3-grams, term-frequency weighted.
#[derive(Debug, Clone, Copy)]
pub struct TokenHashEmbedder {
    pub dim: usize,
}

impl Default for TokenHashEmbedder {
    fn default() -> Self {
        TokenHashEmbedder { dim: DEFAULT_DIM }
    }
}

impl EmbeddingProvider for TokenHashEmbedder {
    fn embed(&self, code: &str) -> Embedding {
        let tokens = token_texts(code);
        let mut v = vec![0.0; self.dim];
        let mut buf = Vec::new();
        for n in 1..=3 {
            for gram in tokens.windows(n) {
                buf.clear();
                for (i, t) in gram.iter().enumerate() {
                    if i > 0 {
                        buf.extend_from_slice("\u{1f}".as_bytes());
                    }
                    buf.extend_from_slice(t.as_bytes());
                }
                v[(fnv1a64(&buf) % self.dim as u64) as usize] += 1.0;
            }
        }
        Embedding(v).normalized()
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

/// Whitespace-collapsed form used as the lookup key of precomputed vectors.
pub fn snippet_key(code: &str) -> String {
    let normalized = code.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("{:016x}", fnv1a64(normalized.as_bytes()))
}

#[derive(Deserialize)]
struct VectorRecord {
    key: String,
    vec: Vec<f64>,
}

/// Vectors computed elsewhere, read from JSON Lines `{"key", "vec"}` where
/// `key` is [`snippet_key`] of the snippet. Unknown snippets embed to zero.
#[derive(Debug, Clone)]
pub struct FileEmbedder {
    dim: usize,
    vectors: HashMap<String, Embedding>,
}

impl FileEmbedder {
    pub fn from_jsonl(text: &str) -> Result<Self, String> {
        let mut vectors = HashMap::new();
        let mut dim = None;
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: VectorRecord = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", n + 1))?;
            if r.vec.iter().any(|x| !x.is_finite()) {
                return Err(format!("line {}: non-finite entry", n + 1));
            }
            match dim {
                None => dim = Some(r.vec.len()),
                Some(d) if d != r.vec.len() => {
                    return Err(format!("line {}: dimension {} differs from {d}", n + 1, r.vec.len()))
                }
                _ => {}
            }
            vectors.insert(r.key, Embedding(r.vec).normalized());
        }
        Ok(FileEmbedder { dim: dim.unwrap_or(DEFAULT_DIM), vectors })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_jsonl(&text)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for FileEmbedder {
    fn embed(&self, code: &str) -> Embedding {
        self.vectors.get(&snippet_key(code)).cloned().unwrap_or_else(|| Embedding::zeros(self.dim))
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_normalized() {
        let e = TokenHashEmbedder::default();
        let a = e.embed("db.query(sql, [id]);");
        assert_eq!(a, e.embed("db.query(sql, [id]);"));
        assert_eq!(a.0.len(), DEFAULT_DIM);
        assert!((a.norm() - 1.0).abs() < 1e-9);
        assert!(a.0.iter().all(|x| x.is_finite() && *x >= 0.0));
    }

    #[test]
    fn empty_code_is_zero() {
        let e = TokenHashEmbedder::default();
        assert!(e.embed("").is_zero());
        assert!(e.embed("  \n\t ").is_zero());
    }

    #[test]
    fn whitespace_does_not_matter() {
        let e = TokenHashEmbedder::default();
        assert_eq!(cosine(&e.embed("g(a)").0, &e.embed("  g (\n a )").0), 1.0);
    }

    #[test]
    fn cosine_arithmetic() {
        let r = 0.5f64.sqrt();
        assert!((cosine(&[1.0, 0.0], &[r, r]) - r).abs() < 1e-12);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        assert!((cosine(&[3.0, 4.0], &[3.0, 4.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn file_embedder_lookup() {
        let key = snippet_key("f(x);");
        let text = format!("{{\"key\":\"{key}\",\"vec\":[3.0,4.0]}}\n");
        let e = FileEmbedder::from_jsonl(&text).unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.embed("f(x);\n").0, vec![0.6, 0.8]);
        assert!(e.embed("g(y);").is_zero());
        assert!(FileEmbedder::from_jsonl("{\"key\":\"a\",\"vec\":[1]}\n{\"key\":\"b\",\"vec\":[1,2]}").is_err());
    }
}
