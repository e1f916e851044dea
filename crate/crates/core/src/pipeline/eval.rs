use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::frontend::ElementId;
use crate::predictor::PredictedSink;
use crate::representations::{coarseness, Representation};
use crate::similarity::{get_similar, PredictionEmbeddings};

/// A ratio that is undefined when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Ratio {
    Value(f64),
    NotApplicable,
}

impl Ratio {
    pub fn of(num: usize, den: usize) -> Self {
        if den == 0 {
            Ratio::NotApplicable
        } else {
            Ratio::Value(num as f64 / den as f64)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::NotApplicable => None,
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Ratio::Value(v) => s.serialize_f64(*v),
            Ratio::NotApplicable => s.serialize_str("n/a"),
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Value(v) => write!(f, "{v:.4}"),
            Ratio::NotApplicable => f.write_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: Ratio,
    pub recall: Ratio,
    pub alerts_to_recover: usize,
    pub alerts_recovered: usize,
    pub spurious_alerts: usize,
}

/// Scores the sinks added by the boosted specs against a newer ground truth.
pub fn eval_boosted<T: Ord>(old: &BTreeSet<T>, boosted: &BTreeSet<T>, new: &BTreeSet<T>) -> EvalReport {
    let added: BTreeSet<&T> = boosted.difference(old).collect();
    let wanted: BTreeSet<&T> = new.difference(old).collect();
    let hit = added.iter().filter(|x| new.contains(**x)).count();
    EvalReport {
        precision: Ratio::of(hit, added.len()),
        recall: Ratio::of(hit, wanted.len()),
        alerts_to_recover: wanted.len(),
        alerts_recovered: hit,
        spurious_alerts: added.len() - hit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Tp,
    Fp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub id: ElementId,
    pub label: Label,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulationError {
    #[error("prediction {0} has no label")]
    UnlabeledPrediction(ElementId),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriageEffortReport {
    pub total: usize,
    pub discarded_by_score: usize,
    pub discarded_by_coarseness: usize,
    pub remaining_fps: usize,
    pub steps_to_triage: usize,
    pub swept: usize,
    pub accepted: usize,
    pub false_negatives: usize,
}

/// Replays a reviewer over `refined` (descending score). Predictions under
/// `score_cutoff` or with a representation coarser than `coarseness_cutoff`
/// are dropped first; every visit to a false positive bans it with its
/// similar predictions at `alpha`.
pub fn simulate_triage(
    refined: &[PredictedSink],
    labels: &HashMap<ElementId, Label>,
    embeddings: &PredictionEmbeddings,
    score_cutoff: f64,
    coarseness_cutoff: f64,
    alpha: f64,
) -> Result<TriageEffortReport, SimulationError> {
    let label =
        |id: &ElementId| labels.get(id).copied().ok_or_else(|| SimulationError::UnlabeledPrediction(id.clone()));
    for p in refined {
        label(&p.id)?;
    }
    let mut r = TriageEffortReport { total: refined.len(), ..Default::default() };
    let mut share: BTreeMap<&Representation, f64> = BTreeMap::new();
    for p in refined {
        if !share.contains_key(&p.rep) {
            let c = coarseness(&p.rep, refined.iter().map(|q| &q.rep)).unwrap_or(0.0);
            share.insert(&p.rep, c);
        }
    }

    let mut order: Vec<&PredictedSink> = refined.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    let mut done: BTreeSet<&ElementId> = BTreeSet::new();
    let mut live = Vec::new();
    for p in order {
        let by_score = p.score < score_cutoff;
        if by_score || share[&p.rep] > coarseness_cutoff {
            if by_score {
                r.discarded_by_score += 1;
            } else {
                r.discarded_by_coarseness += 1;
            }
            if label(&p.id)? == Label::Tp {
                r.false_negatives += 1;
            }
            done.insert(&p.id);
        } else {
            if label(&p.id)? == Label::Fp {
                r.remaining_fps += 1;
            }
            live.push(p);
        }
    }

    let live_set: Vec<PredictedSink> = live.iter().map(|p| (*p).clone()).collect();
    for p in &live {
        if done.contains(&p.id) {
            continue;
        }
        r.steps_to_triage += 1;
        done.insert(&p.id);
        match label(&p.id)? {
            Label::Tp => r.accepted += 1,
            Label::Fp => {
                let similar = get_similar(&p.id, &live_set, embeddings, alpha)
                    .map_err(|_| SimulationError::UnlabeledPrediction(p.id.clone()))?;
                for id in similar {
                    let Some(q) = live.iter().find(|q| q.id == id) else { continue };
                    if done.insert(&q.id) {
                        r.swept += 1;
                        if label(&q.id)? == Label::Tp {
                            r.false_negatives += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}
