//! Propagation graphs over program elements and flow-triple mining.

mod graph;
mod triples;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::{ElementId, ElementKind};
use crate::representations::Representation;
use crate::specs::{SpecKind, TaintSpec};

pub use graph::{build_graph, PropagationGraph};
pub use triples::{mine_triples, DEFAULT_TRIPLE_CAP, MAX_PATH_LEN};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropagationError {
    #[error("project {project}: {count} triples exceed the cap of {cap}")]
    TripleExplosion { project: String, count: usize, cap: usize },
}

/// Roles an element of the given kind may play in a flow triple.
pub fn candidate_roles(kind: ElementKind) -> &'static [SpecKind] {
    match kind {
        ElementKind::CallResult => &[SpecKind::Src, SpecKind::San],
        ElementKind::Parameter(_) | ElementKind::PropertyRead => &[SpecKind::Src],
        ElementKind::CallArgument(_) => &[SpecKind::Snk],
        ElementKind::PropertyWrite => &[],
    }
}

pub fn has_role(kind: ElementKind, role: SpecKind) -> bool {
    candidate_roles(kind).contains(&role)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleCandidate {
    pub element_id: ElementId,
    pub candidate_roles: Vec<SpecKind>,
}

pub fn roles(graph: &PropagationGraph) -> Vec<RoleCandidate> {
    graph
        .nodes
        .iter()
        .zip(&graph.kinds)
        .filter(|(_, k)| !candidate_roles(**k).is_empty())
        .map(|(id, k)| RoleCandidate { element_id: id.clone(), candidate_roles: candidate_roles(*k).to_vec() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlowTriple {
    pub project: String,
    pub src: ElementId,
    pub san: ElementId,
    pub snk: ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownLabel {
    pub element_id: ElementId,
    pub kind: SpecKind,
    pub origin: Representation,
}

/// Labels every element whose canonical representation matches a seed spec
/// of a role the element can play.
pub fn label_known<'a>(
    elements: impl IntoIterator<Item = (&'a ElementId, ElementKind, &'a Representation)>,
    seeds: &[TaintSpec],
) -> Vec<KnownLabel> {
    let mut out = Vec::new();
    for (id, kind, rep) in elements {
        for seed in seeds {
            if &seed.rep == rep
                && has_role(kind, seed.kind)
                && !out.iter().any(|l: &KnownLabel| &l.element_id == id && l.kind == seed.kind)
            {
                out.push(KnownLabel { element_id: id.clone(), kind: seed.kind, origin: rep.clone() });
            }
        }
    }
    out
}
