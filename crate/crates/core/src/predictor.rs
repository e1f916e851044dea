//! Instantiation of predicted sink specifications on test code.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::frontend::{ElementId, ProgramElement, Span};
use crate::representations::Representation;
use crate::specs::{SpecKind, TaintSpec};

/// An element together with its canonical representation and enclosing code.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentedElement {
    pub element: ProgramElement,
    pub rep: Representation,
    pub stmt: String,
    pub func: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedSink {
    pub id: ElementId,
    pub project: String,
    pub path: String,
    pub span: Span,
    pub rep: Representation,
    pub score: f64,
    pub stmt: String,
    pub func: String,
}

/// Predictions ordered by score descending, then id.
pub fn sort_predictions(preds: &mut [PredictedSink]) {
    preds.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
}

/// Elements whose representation is a predicted sink and not already a
/// seed sink.
pub fn get_sinks<'a>(
    predicted: &[TaintSpec],
    seeds: &[TaintSpec],
    test_elements: impl IntoIterator<Item = &'a RepresentedElement>,
) -> Vec<PredictedSink> {
    get_sinks_above(predicted, seeds, test_elements, 0.0)
}

/// [`get_sinks`] keeping only scores at or above `min_score`.
pub fn get_sinks_above<'a>(
    predicted: &[TaintSpec],
    seeds: &[TaintSpec],
    test_elements: impl IntoIterator<Item = &'a RepresentedElement>,
    min_score: f64,
) -> Vec<PredictedSink> {
    let known: BTreeSet<&Representation> = seeds.iter().filter(|s| s.kind == SpecKind::Snk).map(|s| &s.rep).collect();
    let scores: HashMap<&Representation, f64> = predicted
        .iter()
        .filter(|s| s.kind == SpecKind::Snk && !known.contains(&s.rep))
        .map(|s| (&s.rep, s.score))
        .collect();
    let mut out: Vec<PredictedSink> = test_elements
        .into_iter()
        .filter_map(|t| {
            let &score = scores.get(&t.rep)?;
            (score >= min_score).then(|| PredictedSink {
                id: t.element.id.clone(),
                project: t.element.project.clone(),
                path: t.element.path.clone(),
                span: t.element.span,
                rep: t.rep.clone(),
                score,
                stmt: t.stmt.clone(),
                func: t.func.clone(),
            })
        })
        .collect();
    sort_predictions(&mut out);
    out.dedup_by(|a, b| a.id == b.id);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ElementKind;

    fn element(id: &str, rep: &str) -> RepresentedElement {
        RepresentedElement {
            element: ProgramElement {
                id: id.into(),
                project: "t".into(),
                path: "a.js".into(),
                kind: ElementKind::CallArgument(0),
                span: Span::new(0, 1),
                stmt_span: Span::new(0, 1),
                func_span: Span::new(0, 1),
                node: 0,
            },
            rep: rep.into(),
            stmt: "foo(x);".into(),
            func: "foo(x);".into(),
        }
    }

    #[test]
    fn direct_instantiation() {
        let ap = vec![TaintSpec::new("foo(0)", SpecKind::Snk, 0.8)];
        let els = [element("e1", "foo(0)")];
        let got = get_sinks(&ap, &[], &els);
        assert_eq!(got.len(), 1);
        assert_eq!((got[0].id.as_str(), got[0].score), ("e1", 0.8));
    }

    #[test]
    fn known_sinks_are_excluded() {
        let ap = vec![TaintSpec::new("foo(0)", SpecKind::Snk, 0.8)];
        let am = vec![TaintSpec::seed("foo(0)", SpecKind::Snk)];
        assert!(get_sinks(&ap, &am, &[element("e1", "foo(0)")]).is_empty());
    }

    #[test]
    fn unknown_reps_and_other_kinds_are_excluded() {
        let ap = vec![TaintSpec::new("foo(0)", SpecKind::Src, 0.8)];
        assert!(get_sinks(&ap, &[], &[element("e1", "foo(0)"), element("e2", "bar(0)")]).is_empty());
    }

    #[test]
    fn ordering_and_floor() {
        let ap = vec![TaintSpec::new("a(0)", SpecKind::Snk, 0.4), TaintSpec::new("b(0)", SpecKind::Snk, 0.9)];
        let els = [element("e3", "a(0)"), element("e2", "b(0)"), element("e1", "a(0)")];
        let got = get_sinks(&ap, &[], &els);
        let ids: Vec<_> = got.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, vec!["e2", "e1", "e3"]);
        assert_eq!(get_sinks_above(&ap, &[], &els, 0.5).len(), 1);
    }
}
