//! Code-similarity refinement of predicted sinks.

mod embed;
pub mod store;

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

pub use embed::{cosine, snippet_key, Embedding, EmbeddingProvider, FileEmbedder, TokenHashEmbedder, DEFAULT_DIM};

use crate::frontend::ElementId;
use crate::predictor::{sort_predictions, PredictedSink};
use crate::representations::Representation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimilarityError {
    #[error("unknown prediction {0}")]
    UnknownPrediction(ElementId),
}

/// Statement and function embeddings of one snippet owner.
#[derive(Debug, Clone, PartialEq)]
pub struct CodePair {
    pub stmt: Embedding,
    pub func: Embedding,
}

impl CodePair {
    pub fn of(provider: &dyn EmbeddingProvider, stmt: &str, func: &str) -> Self {
        CodePair { stmt: provider.embed(stmt), func: provider.embed(func) }
    }

    /// Mean of the statement and function cosines.
    pub fn similarity(&self, other: &CodePair) -> f64 {
        (cosine(&self.stmt.0, &other.stmt.0) + cosine(&self.func.0, &other.func.0)) / 2.0
    }
}

/// Known-sink embeddings indexed by representation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnownSinkEmbeddings {
    pub by_rep: BTreeMap<Representation, Vec<CodePair>>,
}

impl KnownSinkEmbeddings {
    pub fn get(&self, rep: &Representation) -> &[CodePair] {
        self.by_rep.get(rep).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_rep.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_rep.is_empty()
    }

    /// Pools another set into this one.
    pub fn merge(&mut self, other: KnownSinkEmbeddings) {
        for (rep, pairs) in other.by_rep {
            self.by_rep.entry(rep).or_default().extend(pairs);
        }
    }
}

/// Embeddings of the refined predictions, by prediction id.
pub type PredictionEmbeddings = BTreeMap<ElementId, CodePair>;

/// A known sink's representation with its enclosing statement and function.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownSinkCode {
    pub rep: Representation,
    pub stmt: String,
    pub func: String,
}

pub fn precompute_known(provider: &dyn EmbeddingProvider, known: &[KnownSinkCode]) -> KnownSinkEmbeddings {
    let pairs: Vec<CodePair> = known.par_iter().map(|k| CodePair::of(provider, &k.stmt, &k.func)).collect();
    let mut out = KnownSinkEmbeddings::default();
    for (k, pair) in known.iter().zip(pairs) {
        out.by_rep.entry(k.rep.clone()).or_default().push(pair);
    }
    out
}

/// Best statement and function cosine against same-representation known
/// sinks; `(0, 0)` when there are none.
pub fn compute_similarity_score(pair: &CodePair, rep: &Representation, known: &KnownSinkEmbeddings) -> (f64, f64) {
    let mut z = (0.0f64, 0.0f64);
    for k in known.get(rep) {
        z.0 = z.0.max(cosine(&pair.stmt.0, &k.stmt.0));
        z.1 = z.1.max(cosine(&pair.func.0, &k.func.0));
    }
    z
}

/// Solver score combined with the two similarity maxima, clamped to [0,1].
pub fn refine_score(p: f64, z_stmt: f64, z_func: f64) -> f64 {
    ((p + (z_stmt + z_func) / 2.0) / 2.0).clamp(0.0, 1.0)
}

pub fn refine(
    provider: &dyn EmbeddingProvider,
    predictions: &[PredictedSink],
    known: &KnownSinkEmbeddings,
) -> (Vec<PredictedSink>, PredictionEmbeddings) {
    let pairs: Vec<CodePair> = predictions.par_iter().map(|s| CodePair::of(provider, &s.stmt, &s.func)).collect();
    let mut refined = Vec::with_capacity(predictions.len());
    let mut ep = PredictionEmbeddings::new();
    for (s, pair) in predictions.iter().zip(pairs) {
        let (zs, zf) = compute_similarity_score(&pair, &s.rep, known);
        let mut r = s.clone();
        r.score = refine_score(s.score, zs, zf);
        refined.push(r);
        ep.insert(s.id.clone(), pair);
    }
    sort_predictions(&mut refined);
    (refined, ep)
}

/// Other predictions with the same representation whose mean similarity to
/// `id` is strictly above `alpha`, in prediction order.
pub fn get_similar(
    id: &ElementId,
    refined: &[PredictedSink],
    embeddings: &PredictionEmbeddings,
    alpha: f64,
) -> Result<Vec<ElementId>, SimilarityError> {
    let unknown = || SimilarityError::UnknownPrediction(id.clone());
    let center = refined.iter().find(|p| &p.id == id).ok_or_else(unknown)?;
    let pair = embeddings.get(id).ok_or_else(unknown)?;
    let mut out = Vec::new();
    for other in refined {
        if &other.id == id || other.rep != center.rep {
            continue;
        }
        let Some(op) = embeddings.get(&other.id) else { continue };
        if pair.similarity(op) > alpha {
            out.push(other.id.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::Span;

    fn pred(id: &str, rep: &str, score: f64, stmt: &str) -> PredictedSink {
        PredictedSink {
            id: id.into(),
            project: "t".into(),
            path: "a.js".into(),
            span: Span::new(0, 1),
            rep: rep.into(),
            score,
            stmt: stmt.into(),
            func: format!("function h() {{ {stmt} }}"),
        }
    }

    #[test]
    fn formula_examples() {
        assert!((refine_score(0.6, 0.8, 0.6) - 0.65).abs() < 1e-12);
        assert_eq!(refine_score(1.0, 1.0, 1.0), 1.0);
        assert!((refine_score(0.8, 0.0, 0.0) - 0.4).abs() < 1e-12);
        assert_eq!(refine_score(0.0, -1.0, -1.0), 0.0);
    }

    #[test]
    fn identical_code_scores_one() {
        let e = TokenHashEmbedder::default();
        let known = precompute_known(
            &e,
            &[KnownSinkCode { rep: "q(0)".into(), stmt: "q(a);".into(), func: "function h() { q(a); }".into() }],
        );
        let p = pred("x", "q(0)", 0.5, "q(a);");
        let pair = CodePair::of(&e, &p.stmt, &p.func);
        let (zs, zf) = compute_similarity_score(&pair, &p.rep, &known);
        assert!((zs - 1.0).abs() < 1e-12 && (zf - 1.0).abs() < 1e-12);
        assert_eq!(compute_similarity_score(&pair, &"other(0)".into(), &known), (0.0, 0.0));
    }

    #[test]
    fn known_sinks_group_by_rep() {
        let e = TokenHashEmbedder::default();
        let k = |rep: &str| KnownSinkCode { rep: rep.into(), stmt: "s".into(), func: "f".into() };
        let known = precompute_known(&e, &[k("a(0)"), k("a(0)"), k("b(0)")]);
        assert_eq!(known.get(&"a(0)".into()).len(), 2);
        assert!(precompute_known(&e, &[]).is_empty());
    }

    #[test]
    fn refine_resorts_and_covers_all() {
        let e = TokenHashEmbedder::default();
        let known = precompute_known(
            &e,
            &[KnownSinkCode { rep: "b(0)".into(), stmt: "b(v);".into(), func: "function h() { b(v); }".into() }],
        );
        let preds = vec![pred("1", "a(0)", 0.9, "a(v);"), pred("2", "b(0)", 0.5, "b(v);")];
        let (refined, ep) = refine(&e, &preds, &known);
        assert_eq!(refined[0].id.as_str(), "2");
        assert!((refined[0].score - 0.75).abs() < 1e-9);
        assert!((refined[1].score - 0.45).abs() < 1e-9);
        assert_eq!(ep.len(), 2);
    }

    #[test]
    fn similar_requires_same_rep_and_strict_threshold() {
        let e = TokenHashEmbedder::default();
        let preds = vec![
            pred("1", "a(0)", 0.9, "a(v);"),
            pred("2", "a(0)", 0.8, "a(v);"),
            pred("3", "b(0)", 0.7, "a(v);"),
            pred("4", "a(0)", 0.6, "zz + yy * ww"),
        ];
        let (refined, ep) = refine(&e, &preds, &KnownSinkEmbeddings::default());
        let id = ElementId::from("1");
        assert_eq!(get_similar(&id, &refined, &ep, 0.95).unwrap(), vec![ElementId::from("2")]);
        assert!(get_similar(&id, &refined, &ep, 1.0).unwrap().is_empty());
        assert_eq!(
            get_similar(&"nope".into(), &refined, &ep, 0.5),
            Err(SimilarityError::UnknownPrediction("nope".into()))
        );
    }
}
