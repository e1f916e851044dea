use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::frontend::{ElementId, ElementKind, FileModel, NodeId, NodeKind, ProjectModel};

/// Directed information-flow graph over the program elements of a project.
#[derive(Debug, Clone, Default)]
pub struct PropagationGraph {
    pub project_id: String,
    pub nodes: Vec<ElementId>,
    pub kinds: Vec<ElementKind>,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
    index: HashMap<ElementId, usize>,
}

#[derive(Serialize)]
struct GraphDump<'a> {
    project: &'a str,
    nodes: &'a [ElementId],
    edges: Vec<(&'a ElementId, &'a ElementId)>,
}

impl PropagationGraph {
    pub fn new(project_id: impl Into<String>) -> Self {
        PropagationGraph { project_id: project_id.into(), ..Default::default() }
    }

    pub fn add_node(&mut self, id: ElementId, kind: ElementKind) -> usize {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = self.nodes.len();
        self.index.insert(id.clone(), i);
        self.nodes.push(id);
        self.kinds.push(kind);
        self.succ.push(BTreeSet::new());
        self.pred.push(BTreeSet::new());
        i
    }

    /// Adds `from -> to`; self-loops are ignored.
    pub fn add_edge(&mut self, from: usize, to: usize) {
        if from != to {
            self.succ[from].insert(to);
            self.pred[to].insert(from);
        }
    }

    pub fn index_of(&self, id: &ElementId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[i].iter().copied()
    }

    pub fn predecessors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred[i].iter().copied()
    }

    pub fn edges(&self) -> Vec<(&ElementId, &ElementId)> {
        let mut out = Vec::new();
        for (from, tos) in self.succ.iter().enumerate() {
            for &to in tos {
                out.push((&self.nodes[from], &self.nodes[to]));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }

    /// Whether `to` is reachable from `from` by a non-empty path.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = self.successors(from).collect();
        while let Some(n) = queue.pop_front() {
            if n == to {
                return true;
            }
            if !std::mem::replace(&mut seen[n], true) {
                queue.extend(self.successors(n));
            }
        }
        false
    }

    /// `{"project", "nodes", "edges"}` debug record.
    pub fn dump_json(&self) -> String {
        serde_json::to_string(&GraphDump { project: &self.project_id, nodes: &self.nodes, edges: self.edges() })
            .expect("graph dump serializes")
    }
}

/// Builds the project graph. Each file contributes an intraprocedural flow
/// net over its syntax, which is then contracted to element-to-element edges.
pub fn build_graph(project: &ProjectModel) -> PropagationGraph {
    let mut graph = PropagationGraph::new(project.project_id.clone());
    for file in &project.files {
        add_file(&mut graph, file);
    }
    graph
}

struct Net<'a> {
    m: &'a FileModel,
    succ: Vec<Vec<usize>>,
    slots: HashMap<(u8, NodeId, usize), usize>,
}

const BINDING: u8 = 0;
const RETURN: u8 = 1;
const ARG: u8 = 2;
const WRITE: u8 = 3;

impl<'a> Net<'a> {
    fn new(m: &'a FileModel) -> Self {
        Net { m, succ: vec![Vec::new(); m.nodes.len()], slots: HashMap::new() }
    }

    fn slot(&mut self, tag: u8, node: NodeId, i: usize) -> usize {
        if let Some(&s) = self.slots.get(&(tag, node, i)) {
            return s;
        }
        let s = self.succ.len();
        self.succ.push(Vec::new());
        self.slots.insert((tag, node, i), s);
        s
    }

    fn binding(&mut self, b: usize) -> usize {
        self.slot(BINDING, b, 0)
    }

    fn edge(&mut self, from: usize, to: usize) {
        if from != to {
            self.succ[from].push(to);
        }
    }

    /// Net node holding the object a member chain is rooted at.
    fn root_object(&mut self, mut node: NodeId) -> usize {
        while let NodeKind::Member { .. } = self.m.kind(node) {
            node = self.m.children(node)[0];
        }
        match self.m.binding_of(node) {
            Some(b) if matches!(self.m.kind(node), NodeKind::Identifier(_)) => self.binding(b),
            _ => node,
        }
    }

    fn build(&mut self) {
        let m = self.m;
        for (b, binding) in m.bindings.iter().enumerate() {
            let bn = self.binding(b);
            for &u in &binding.uses {
                self.edge(bn, u);
            }
        }
        for id in 0..m.nodes.len() {
            let ch = m.children(id);
            match m.kind(id) {
                NodeKind::VarDeclarator { .. } => {
                    if let (Some(&init), Some(b)) = (ch.get(1), m.binding_of(ch[0])) {
                        let bn = self.binding(b);
                        self.edge(init, bn);
                    }
                }
                NodeKind::Assign { .. } => {
                    let (target, value) = (ch[0], ch[1]);
                    self.edge(value, id);
                    match m.kind(target) {
                        NodeKind::Identifier(_) => {
                            if let Some(b) = m.binding_of(target) {
                                let bn = self.binding(b);
                                self.edge(value, bn);
                            }
                        }
                        NodeKind::Member { .. } => {
                            let w = self.slot(WRITE, target, 0);
                            self.edge(value, w);
                            let obj = self.root_object(m.children(target)[0]);
                            self.edge(w, obj);
                        }
                        _ => {}
                    }
                }
                NodeKind::Member { .. } if !m.is_write_target(id) => self.edge(ch[0], id),
                NodeKind::Call { .. } => {
                    let resolved = m.resolve_callee(id);
                    for (i, &arg) in ch[1..].iter().enumerate() {
                        let slot = self.slot(ARG, id, i);
                        self.edge(m.arg_anchor(arg), slot);
                        match resolved {
                            Some(func) => {
                                if let Some(&p) = m.params(func).get(i) {
                                    if let Some(b) = m.binding_of(p) {
                                        let bn = self.binding(b);
                                        self.edge(slot, bn);
                                    }
                                }
                            }
                            None => self.edge(slot, id),
                        }
                    }
                    if let Some(func) = resolved {
                        let r = self.slot(RETURN, func, 0);
                        self.edge(r, id);
                    }
                    if matches!(m.kind(ch[0]), NodeKind::Member { .. }) {
                        self.edge(ch[0], id);
                    }
                }
                NodeKind::Return => {
                    if let Some(&e) = ch.first() {
                        let r = self.slot(RETURN, m.scope_of(id), 0);
                        self.edge(e, r);
                    }
                }
                NodeKind::ArrowFunction { .. } => {
                    let body = m.body(id);
                    if m.kind(body) != &NodeKind::Block {
                        let r = self.slot(RETURN, id, 0);
                        self.edge(body, r);
                    }
                }
                NodeKind::Property { .. } => {
                    let value = *ch.last().expect("property value");
                    let w = self.slot(WRITE, value, 0);
                    self.edge(value, w);
                    let obj = m.parent(id).expect("property has an object");
                    self.edge(w, obj);
                }
                NodeKind::Spread => {
                    let parent = m.parent(id).expect("spread has a parent");
                    if matches!(m.kind(parent), NodeKind::ObjectLit | NodeKind::ArrayLit) {
                        self.edge(ch[0], parent);
                    }
                }
                NodeKind::Binary { .. } | NodeKind::Logical { .. } | NodeKind::TemplateLit => {
                    for &c in ch {
                        self.edge(c, id);
                    }
                }
                NodeKind::ArrayLit => {
                    for &c in ch {
                        if m.kind(c) != &NodeKind::Spread {
                            self.edge(c, id);
                        }
                    }
                }
                NodeKind::Conditional => {
                    self.edge(ch[1], id);
                    self.edge(ch[2], id);
                }
                NodeKind::Await => self.edge(ch[0], id),
                NodeKind::Sequence => self.edge(*ch.last().expect("non-empty sequence"), id),
                NodeKind::ForIn { .. } => {
                    let (head, iterable) = (ch[0], ch[1]);
                    let target = match m.kind(head) {
                        NodeKind::VarDecl(_) => m.children(m.children(head)[0])[0],
                        _ => head,
                    };
                    if let Some(b) = m.binding_of(target) {
                        let bn = self.binding(b);
                        self.edge(iterable, bn);
                    }
                }
                _ => {}
            }
        }
    }

    /// Net node carrying each element of the file.
    fn element_nodes(&mut self) -> Vec<usize> {
        let m = self.m;
        let mut out = Vec::with_capacity(m.elements.len());
        for e in &m.elements {
            let n = match e.kind {
                ElementKind::CallArgument(i) => {
                    let mut call = m.parent(e.node).expect("argument has a call");
                    if m.kind(call) == &NodeKind::Spread {
                        call = m.parent(call).expect("spread has a call");
                    }
                    self.slot(ARG, call, i)
                }
                ElementKind::CallResult | ElementKind::PropertyRead => e.node,
                ElementKind::Parameter(_) => {
                    let b = m.binding_of(e.node).expect("parameter is declared");
                    self.binding(b)
                }
                ElementKind::PropertyWrite => self.slot(WRITE, e.node, 0),
            };
            out.push(n);
        }
        out
    }
}

fn add_file(graph: &mut PropagationGraph, m: &FileModel) {
    let mut net = Net::new(m);
    net.build();
    let carriers = net.element_nodes();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut gidx = Vec::with_capacity(carriers.len());
    for (e, &n) in m.elements.iter().zip(&carriers) {
        let g = graph.add_node(e.id.clone(), e.kind);
        gidx.push(g);
        owner.entry(n).or_insert(g);
    }
    let mut seen = vec![usize::MAX; net.succ.len()];
    let mut stack = Vec::new();
    for (k, &start) in carriers.iter().enumerate() {
        let from = gidx[k];
        if owner.get(&start) != Some(&from) {
            continue;
        }
        stack.clear();
        stack.extend(net.succ[start].iter().copied());
        while let Some(n) = stack.pop() {
            if seen[n] == k {
                continue;
            }
            seen[n] = k;
            match owner.get(&n) {
                Some(&to) => graph.add_edge(from, to),
                None => stack.extend(net.succ[n].iter().copied()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::SourceFile;

    fn graph(src: &str) -> (ProjectModel, PropagationGraph) {
        let p = ProjectModel::from_sources("p", vec![SourceFile::new("p", "a.js", src)]);
        let g = build_graph(&p);
        (p, g)
    }

    fn find(p: &ProjectModel, g: &PropagationGraph, text: &str, kind: ElementKind) -> usize {
        let (f, e) = p
            .elements()
            .find(|(f, e)| e.kind == kind && f.file.slice(e.span) == text)
            .unwrap_or_else(|| panic!("no {kind} {text:?}"));
        let _ = f;
        g.index_of(&e.id).unwrap()
    }

    #[test]
    fn unknown_function_rule() {
        let (p, g) = graph("let y = f(x); g(y);");
        let arg = find(&p, &g, "x", ElementKind::CallArgument(0));
        let res = find(&p, &g, "f(x)", ElementKind::CallResult);
        let sink = find(&p, &g, "y", ElementKind::CallArgument(0));
        assert!(g.successors(arg).any(|n| n == res));
        assert!(g.successors(res).any(|n| n == sink));
    }

    #[test]
    fn whole_object_rule() {
        let (p, g) = graph("let t = src(); let o = {a: t}; g(o);");
        let t = find(&p, &g, "src()", ElementKind::CallResult);
        let w = find(&p, &g, "t", ElementKind::PropertyWrite);
        let arg = find(&p, &g, "o", ElementKind::CallArgument(0));
        assert!(g.reaches(t, w));
        assert!(g.reaches(w, arg));
    }

    #[test]
    fn property_writes_taint_the_base() {
        let (p, g) = graph("o.x = src(); sink(o);");
        let s = find(&p, &g, "src()", ElementKind::CallResult);
        let arg = find(&p, &g, "o", ElementKind::CallArgument(0));
        assert!(g.reaches(s, arg));
    }

    #[test]
    fn resolved_callees_link_arguments_and_returns() {
        let (p, g) = graph("function id(a) { return a.trim(); }\nlet r = id(src());\nsink(r);");
        let s = find(&p, &g, "src()", ElementKind::CallResult);
        let param = find(&p, &g, "a", ElementKind::Parameter(0));
        let trim = find(&p, &g, "a.trim()", ElementKind::CallResult);
        let arg = find(&p, &g, "r", ElementKind::CallArgument(0));
        assert!(g.reaches(s, param));
        assert!(g.reaches(param, trim));
        assert!(g.reaches(trim, arg));
        // no direct argument-to-result shortcut for resolved calls
        let call_arg = find(&p, &g, "src()", ElementKind::CallArgument(0));
        let call = find(&p, &g, "id(src())", ElementKind::CallResult);
        assert!(!g.successors(call_arg).any(|n| n == call));
    }

    #[test]
    fn templates_and_await_propagate() {
        let (p, g) = graph("async function h(q) { const v = await q.get(); run(`x ${v}`); }");
        let get = find(&p, &g, "q.get()", ElementKind::CallResult);
        let arg = find(&p, &g, "`x ${v}`", ElementKind::CallArgument(0));
        assert!(g.reaches(get, arg));
    }

    #[test]
    fn no_self_loops_and_endpoints_are_nodes() {
        let (_, g) = graph("let a = f(a); a = g(a, a.b); h({a});");
        for (from, to) in g.edges() {
            assert_ne!(from, to);
            assert!(g.index_of(from).is_some() && g.index_of(to).is_some());
        }
    }
}
