use std::collections::VecDeque;

use super::{has_role, FlowTriple, PropagationError, PropagationGraph};
use crate::specs::SpecKind;

pub const DEFAULT_TRIPLE_CAP: usize = 1_000_000;
/// Longest path followed when testing reachability.
pub const MAX_PATH_LEN: usize = 64;

/// Nodes reachable from `start` within `MAX_PATH_LEN` edges, excluding `start`.
fn bfs(graph: &PropagationGraph, start: usize, forward: bool) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.len()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    while let Some(n) = queue.pop_front() {
        if dist[n] == MAX_PATH_LEN {
            continue;
        }
        let next: Vec<usize> = if forward { graph.successors(n).collect() } else { graph.predecessors(n).collect() };
        for m in next {
            if dist[m] == usize::MAX {
                dist[m] = dist[n] + 1;
                out.push(m);
                queue.push_back(m);
            }
        }
    }
    out
}

/// Every `(src, san, snk)` with `src ~> san ~> snk`, sorted by id and
/// deduplicated.
pub fn mine_triples(graph: &PropagationGraph, cap: usize) -> Result<Vec<FlowTriple>, PropagationError> {
    let mut per_san = Vec::new();
    let mut count = 0usize;
    for a in 0..graph.len() {
        if !has_role(graph.kinds[a], SpecKind::San) {
            continue;
        }
        let sinks: Vec<usize> =
            bfs(graph, a, true).into_iter().filter(|&k| has_role(graph.kinds[k], SpecKind::Snk)).collect();
        if sinks.is_empty() {
            continue;
        }
        let sources: Vec<usize> =
            bfs(graph, a, false).into_iter().filter(|&s| s != a && has_role(graph.kinds[s], SpecKind::Src)).collect();
        count = count.saturating_add(sources.len().saturating_mul(sinks.len()));
        if count > cap {
            return Err(PropagationError::TripleExplosion { project: graph.project_id.clone(), count, cap });
        }
        per_san.push((a, sources, sinks));
    }
    let mut out = Vec::with_capacity(count);
    for (a, sources, sinks) in per_san {
        for &s in &sources {
            for &k in &sinks {
                out.push(FlowTriple {
                    project: graph.project_id.clone(),
                    src: graph.nodes[s].clone(),
                    san: graph.nodes[a].clone(),
                    snk: graph.nodes[k].clone(),
                });
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{ElementId, ElementKind};

    fn chain(kinds: &[ElementKind]) -> PropagationGraph {
        let mut g = PropagationGraph::new("p");
        for (i, k) in kinds.iter().enumerate() {
            g.add_node(ElementId(format!("n{i:02}")), *k);
        }
        for i in 1..kinds.len() {
            g.add_edge(i - 1, i);
        }
        g
    }

    #[test]
    fn simple_chain() {
        let g = chain(&[ElementKind::PropertyRead, ElementKind::CallResult, ElementKind::CallArgument(0)]);
        let t = mine_triples(&g, DEFAULT_TRIPLE_CAP).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].src.0.as_str(), t[0].san.0.as_str(), t[0].snk.0.as_str()), ("n00", "n01", "n02"));
    }

    #[test]
    fn no_sanitizer_no_triples() {
        let g = chain(&[ElementKind::Parameter(0), ElementKind::PropertyRead, ElementKind::CallArgument(0)]);
        assert!(mine_triples(&g, DEFAULT_TRIPLE_CAP).unwrap().is_empty());
    }

    #[test]
    fn path_length_is_capped() {
        let mut kinds = vec![ElementKind::Parameter(0), ElementKind::CallResult];
        kinds.extend(std::iter::repeat_n(ElementKind::PropertyWrite, MAX_PATH_LEN - 1));
        kinds.push(ElementKind::CallArgument(0));
        assert_eq!(mine_triples(&chain(&kinds), DEFAULT_TRIPLE_CAP).unwrap().len(), 1);
        kinds.insert(2, ElementKind::PropertyWrite);
        assert!(mine_triples(&chain(&kinds), DEFAULT_TRIPLE_CAP).unwrap().is_empty());
    }

    #[test]
    fn explosion_is_reported() {
        let mut g = PropagationGraph::new("big");
        let san = g.add_node(ElementId::from("san"), ElementKind::CallResult);
        for i in 0..10 {
            let s = g.add_node(ElementId(format!("s{i}")), ElementKind::Parameter(0));
            let k = g.add_node(ElementId(format!("k{i}")), ElementKind::CallArgument(0));
            g.add_edge(s, san);
            g.add_edge(san, k);
        }
        assert_eq!(mine_triples(&g, 1000).unwrap().len(), 100);
        assert_eq!(
            mine_triples(&g, 99),
            Err(PropagationError::TripleExplosion { project: "big".into(), count: 100, cap: 99 })
        );
    }
}
