//! Reviewer feedback over refined predictions, with an append-only audit log.

pub mod service;
mod state;

use thiserror::Error;

pub use state::{
    load_state, read_audit, Action, AuditEntry, Export, FeedbackState, PredictionRow, RepCount, Stats, TriageSession,
    ViewFilter, DEFAULT_ALPHA, SNAPSHOT_EVERY,
};

use crate::frontend::ElementId;
use crate::representations::Representation;
use crate::similarity::SimilarityError;

#[derive(Debug, Error)]
pub enum TriageError {
    #[error("unknown prediction {0}")]
    UnknownPrediction(ElementId),
    #[error("unknown representation {0}")]
    UnknownRepresentation(Representation),
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("persistence: {0}")]
    Io(#[from] std::io::Error),
}

impl From<SimilarityError> for TriageError {
    fn from(e: SimilarityError) -> Self {
        match e {
            SimilarityError::UnknownPrediction(id) => TriageError::UnknownPrediction(id),
        }
    }
}
