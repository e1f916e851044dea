use std::collections::HashMap;

use super::ast::{AstNode, NodeKind, Span};
use super::{ElementId, ElementKind, ProgramElement, SourceFile};

pub type NodeId = usize;
pub type BindingId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatNode {
    pub kind: NodeKind,
    pub span: Span,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingKind {
    Var,
    Function,
    Param {
        func: NodeId,
        index: usize,
    },
    Catch,
    /// Undeclared name, shared by every use in the file.
    Implicit,
}

#[derive(Debug, Clone)]
pub struct Binding {
    pub name: String,
    pub kind: BindingKind,
    pub scope: NodeId,
    /// Expressions stored into the binding (initializers and plain assignments).
    pub inits: Vec<NodeId>,
    /// Identifier nodes reading the binding.
    pub uses: Vec<NodeId>,
    /// Identifier nodes the binding is written through.
    pub writes: Vec<NodeId>,
}

/// A parsed file flattened into an arena, with resolved scopes and its
/// program elements.
#[derive(Debug, Clone)]
pub struct FileModel {
    pub file: SourceFile,
    pub nodes: Vec<FlatNode>,
    pub bindings: Vec<Binding>,
    pub elements: Vec<ProgramElement>,
    refs: HashMap<NodeId, BindingId>,
    by_anchor: HashMap<(NodeId, ElementKind), usize>,
    by_id: HashMap<ElementId, usize>,
}

pub const ROOT: NodeId = 0;

impl FileModel {
    pub fn build(file: SourceFile, ast: &AstNode) -> Self {
        let mut nodes = Vec::new();
        flatten(ast, None, &mut nodes);
        let mut model = FileModel {
            file,
            nodes,
            bindings: Vec::new(),
            elements: Vec::new(),
            refs: HashMap::new(),
            by_anchor: HashMap::new(),
            by_id: HashMap::new(),
        };
        model.resolve_scopes();
        model.extract();
        model
    }

    pub fn node(&self, id: NodeId) -> &FlatNode {
        &self.nodes[id]
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id].kind
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn text(&self, id: NodeId) -> &str {
        self.file.slice(self.nodes[id].span)
    }

    pub fn binding_of(&self, ident: NodeId) -> Option<BindingId> {
        self.refs.get(&ident).copied()
    }

    pub fn element(&self, id: &ElementId) -> Option<&ProgramElement> {
        self.by_id.get(id).map(|&i| &self.elements[i])
    }

    pub fn element_at(&self, node: NodeId, kind: ElementKind) -> Option<&ProgramElement> {
        self.by_anchor.get(&(node, kind)).map(|&i| &self.elements[i])
    }

    pub fn enclosing_code(&self, e: &ProgramElement) -> (String, String) {
        (self.file.slice(e.stmt_span).to_string(), self.file.slice(e.func_span).to_string())
    }

    /// Parameter identifier nodes of a function node.
    pub fn params(&self, func: NodeId) -> &[NodeId] {
        let ch = &self.nodes[func].children;
        match &self.nodes[func].kind {
            NodeKind::FunctionDecl { .. } => &ch[1..ch.len() - 1],
            NodeKind::FunctionExpr { name, .. } => &ch[usize::from(name.is_some())..ch.len() - 1],
            NodeKind::ArrowFunction { .. } => &ch[..ch.len() - 1],
            _ => &[],
        }
    }

    pub fn body(&self, func: NodeId) -> NodeId {
        *self.nodes[func].children.last().expect("function without body")
    }

    /// Innermost function strictly enclosing `id`, or the program root.
    pub fn scope_of(&self, id: NodeId) -> NodeId {
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            if self.nodes[p].kind.is_function() {
                return p;
            }
            cur = self.nodes[p].parent;
        }
        ROOT
    }

    /// Function node a call resolves to when the callee names a function
    /// declared (or bound once to a function expression) in this file.
    pub fn resolve_callee(&self, call: NodeId) -> Option<NodeId> {
        let callee = self.nodes[call].children[0];
        if !matches!(self.nodes[callee].kind, NodeKind::Identifier(_)) {
            return None;
        }
        let b = &self.bindings[self.binding_of(callee)?];
        match b.kind {
            BindingKind::Function | BindingKind::Var if b.inits.len() == 1 => {
                let init = b.inits[0];
                self.nodes[init].kind.is_function().then_some(init)
            }
            _ => None,
        }
    }

    /// Strips spread wrappers from an argument node.
    pub fn arg_anchor(&self, arg: NodeId) -> NodeId {
        match self.nodes[arg].kind {
            NodeKind::Spread => self.nodes[arg].children[0],
            _ => arg,
        }
    }

    /// Whether a member node is the target of an assignment.
    pub fn is_write_target(&self, id: NodeId) -> bool {
        match self.nodes[id].parent {
            Some(p) => matches!(self.nodes[p].kind, NodeKind::Assign { .. }) && self.nodes[p].children[0] == id,
            None => false,
        }
    }

    fn declare(
        &mut self,
        table: &mut HashMap<(NodeId, String), BindingId>,
        scope: NodeId,
        name: &str,
        kind: BindingKind,
    ) -> BindingId {
        if let Some(&b) = table.get(&(scope, name.to_string())) {
            // parameters win over a later `var` of the same name
            if matches!(kind, BindingKind::Param { .. } | BindingKind::Function) {
                self.bindings[b].kind = kind;
            }
            return b;
        }
        let b = self.bindings.len();
        self.bindings.push(Binding {
            name: name.to_string(),
            kind,
            scope,
            inits: Vec::new(),
            uses: Vec::new(),
            writes: Vec::new(),
        });
        table.insert((scope, name.to_string()), b);
        b
    }

    fn resolve_scopes(&mut self) {
        let mut table: HashMap<(NodeId, String), BindingId> = HashMap::new();
        let mut decl_names: HashMap<NodeId, BindingId> = HashMap::new();

        for id in 0..self.nodes.len() {
            match self.nodes[id].kind.clone() {
                NodeKind::VarDeclarator { name } => {
                    let scope = self.scope_of(id);
                    let b = self.declare(&mut table, scope, &name, BindingKind::Var);
                    let ch = self.nodes[id].children.clone();
                    decl_names.insert(ch[0], b);
                    if let Some(&init) = ch.get(1) {
                        self.bindings[b].inits.push(init);
                    }
                }
                NodeKind::FunctionDecl { name, .. } => {
                    let scope = self.scope_of(id);
                    let b = self.declare(&mut table, scope, &name, BindingKind::Function);
                    decl_names.insert(self.nodes[id].children[0], b);
                    self.bindings[b].inits.push(id);
                }
                NodeKind::FunctionExpr { name: Some(name), .. } => {
                    let b = self.declare(&mut table, id, &name, BindingKind::Function);
                    decl_names.insert(self.nodes[id].children[0], b);
                    self.bindings[b].inits.push(id);
                }
                NodeKind::Catch => {
                    let first = self.nodes[id].children[0];
                    if let NodeKind::Identifier(name) = self.nodes[first].kind.clone() {
                        let scope = self.scope_of(id);
                        let b = self.declare(&mut table, scope, &name, BindingKind::Catch);
                        decl_names.insert(first, b);
                    }
                }
                _ => {}
            }
            if self.nodes[id].kind.is_function() {
                let params = self.params(id).to_vec();
                for (index, p) in params.into_iter().enumerate() {
                    if let NodeKind::Identifier(name) = self.nodes[p].kind.clone() {
                        let b = self.declare(&mut table, id, &name, BindingKind::Param { func: id, index });
                        decl_names.insert(p, b);
                    }
                }
            }
        }

        for id in 0..self.nodes.len() {
            let NodeKind::Identifier(name) = self.nodes[id].kind.clone() else { continue };
            if let Some(&b) = decl_names.get(&id) {
                self.refs.insert(id, b);
                continue;
            }
            let mut scope = self.scope_of(id);
            let b = loop {
                if let Some(&b) = table.get(&(scope, name.clone())) {
                    break b;
                }
                if scope == ROOT {
                    break self.declare(&mut table, ROOT, &name, BindingKind::Implicit);
                }
                scope = self.scope_of(scope);
            };
            self.refs.insert(id, b);
            let parent = self.nodes[id].parent.expect("identifier has a parent");
            let is_target = self.nodes[parent].children[0] == id;
            match &self.nodes[parent].kind {
                NodeKind::Assign { op } if is_target => {
                    self.bindings[b].writes.push(id);
                    if op == "=" {
                        let rhs = self.nodes[parent].children[1];
                        self.bindings[b].inits.push(rhs);
                    } else {
                        self.bindings[b].uses.push(id);
                    }
                }
                NodeKind::ForIn { .. } if is_target => self.bindings[b].writes.push(id),
                _ => self.bindings[b].uses.push(id),
            }
        }
        // for-in/of declarations carry no initializer but are written by the loop
        for id in 0..self.nodes.len() {
            if let NodeKind::ForIn { .. } = self.nodes[id].kind {
                let head = self.nodes[id].children[0];
                if let NodeKind::VarDecl(_) = self.nodes[head].kind {
                    for &d in &self.nodes[head].children {
                        let ident = self.nodes[d].children[0];
                        if let Some(&b) = self.refs.get(&ident) {
                            self.bindings[b].writes.push(ident);
                        }
                    }
                }
            }
        }
    }

    fn extract(&mut self) {
        let mut found: Vec<(NodeId, ElementKind)> = Vec::new();
        for id in 0..self.nodes.len() {
            match &self.nodes[id].kind {
                NodeKind::Call { .. } => {
                    for (i, &arg) in self.nodes[id].children[1..].iter().enumerate() {
                        found.push((self.arg_anchor(arg), ElementKind::CallArgument(i)));
                    }
                    found.push((id, ElementKind::CallResult));
                }
                NodeKind::Member { .. } => {
                    if self.is_write_target(id) {
                        found.push((id, ElementKind::PropertyWrite));
                    } else {
                        found.push((id, ElementKind::PropertyRead));
                    }
                }
                NodeKind::Property { .. } => {
                    let value = *self.nodes[id].children.last().expect("property value");
                    found.push((value, ElementKind::PropertyWrite));
                }
                k if k.is_function() => {
                    for (i, &p) in self.params(id).iter().enumerate() {
                        found.push((p, ElementKind::Parameter(i)));
                    }
                }
                _ => {}
            }
        }
        found.sort_by_key(|&(n, k)| (self.nodes[n].span.start, self.nodes[n].span.end, k));
        for (node, kind) in found {
            let span = self.nodes[node].span;
            let func = self.scope_of(node);
            let func_span = self.nodes[func].span;
            let stmt_span = self.enclosing_statement(node, func).unwrap_or(func_span);
            let id = ElementId::compute(&self.file.project_id, &self.file.path, span, kind);
            let idx = self.elements.len();
            self.by_anchor.insert((node, kind), idx);
            self.by_id.insert(id.clone(), idx);
            self.elements.push(ProgramElement {
                id,
                project: self.file.project_id.clone(),
                path: self.file.path.clone(),
                kind,
                span,
                stmt_span,
                func_span,
                node,
            });
        }
    }

    fn enclosing_statement(&self, node: NodeId, func: NodeId) -> Option<Span> {
        let mut cur = self.nodes[node].parent;
        while let Some(p) = cur {
            if p == func {
                return None;
            }
            if self.nodes[p].kind.is_statement() {
                return Some(self.nodes[p].span);
            }
            cur = self.nodes[p].parent;
        }
        None
    }
}

fn flatten(node: &AstNode, parent: Option<NodeId>, out: &mut Vec<FlatNode>) -> NodeId {
    let id = out.len();
    out.push(FlatNode { kind: node.kind.clone(), span: node.span, parent, children: Vec::new() });
    let children: Vec<NodeId> = node.children.iter().map(|c| flatten(c, Some(id), out)).collect();
    out[id].children = children;
    id
}

#[cfg(test)]
mod tests {
    use super::super::parse_source;
    use super::*;

    fn model(text: &str) -> FileModel {
        let file = SourceFile::new("p", "a.js", text);
        let ast = parse_source(&file).unwrap();
        FileModel::build(file, &ast)
    }

    fn kinds(m: &FileModel) -> Vec<(String, ElementKind)> {
        m.elements.iter().map(|e| (m.file.slice(e.span).to_string(), e.kind)).collect()
    }

    #[test]
    fn call_elements() {
        let m = model("f(x)");
        assert_eq!(
            kinds(&m),
            vec![("f(x)".to_string(), ElementKind::CallResult), ("x".to_string(), ElementKind::CallArgument(0))]
        );
    }

    #[test]
    fn empty_program_has_no_elements() {
        assert!(model("").elements.is_empty());
    }

    #[test]
    fn reads_writes_and_params() {
        let m = model("function g(a, b) { a.x = b.y; return {k: a}; }");
        let got = kinds(&m);
        assert!(got.contains(&("a".into(), ElementKind::Parameter(0))));
        assert!(got.contains(&("b".into(), ElementKind::Parameter(1))));
        assert!(got.contains(&("a.x".into(), ElementKind::PropertyWrite)));
        assert!(got.contains(&("b.y".into(), ElementKind::PropertyRead)));
        assert!(got.contains(&("a".into(), ElementKind::PropertyWrite)));
    }

    #[test]
    fn scopes_resolve_to_innermost_declaration() {
        let m = model("var x = 1; function f(x) { return x; } x;");
        let uses: Vec<_> = m
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::Identifier("x".into()))
            .map(|(i, _)| m.bindings[m.binding_of(i).unwrap()].kind)
            .collect();
        assert!(matches!(uses[0], BindingKind::Var));
        assert!(matches!(uses[1], BindingKind::Param { index: 0, .. }));
        assert!(matches!(uses[2], BindingKind::Param { index: 0, .. }));
        assert!(matches!(uses[3], BindingKind::Var));
    }

    #[test]
    fn undeclared_names_share_one_binding() {
        let m = model("a = f(); g(a);");
        let ids: Vec<_> = m
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::Identifier("a".into()))
            .map(|(i, _)| m.binding_of(i).unwrap())
            .collect();
        assert_eq!(ids[0], ids[1]);
        let b = &m.bindings[ids[0]];
        assert_eq!(b.kind, BindingKind::Implicit);
        assert_eq!(b.inits.len(), 1);
        assert_eq!(b.uses.len(), 1);
    }

    #[test]
    fn callee_resolution() {
        let m = model("function id(a) { return a; }\nconst h = (b) => b;\nid(1); h(2); other(3);");
        let calls: Vec<_> = (0..m.nodes.len()).filter(|&i| matches!(m.kind(i), NodeKind::Call { .. })).collect();
        assert!(matches!(m.kind(m.resolve_callee(calls[0]).unwrap()), NodeKind::FunctionDecl { .. }));
        assert!(matches!(m.kind(m.resolve_callee(calls[1]).unwrap()), NodeKind::ArrowFunction { .. }));
        assert_eq!(m.resolve_callee(calls[2]), None);
    }

    #[test]
    fn enclosing_spans_nest() {
        let src = "const run = (req) => {\n  const v = req.body;\n  db.save(v);\n};\nlog(run);\n";
        let m = model(src);
        for e in &m.elements {
            assert!(e.func_span.contains(e.stmt_span), "{e:?}");
            assert!(e.stmt_span.contains(e.span) || e.kind == ElementKind::Parameter(0));
        }
        let arg =
            m.elements.iter().find(|e| m.file.slice(e.span) == "v" && e.kind == ElementKind::CallArgument(0)).unwrap();
        let (stmt, func) = m.enclosing_code(arg);
        assert_eq!(stmt, "db.save(v);");
        assert!(func.starts_with("(req) =>") && func.ends_with('}'));
        let top = m
            .elements
            .iter()
            .find(|e| m.file.slice(e.span) == "run" && e.kind == ElementKind::CallArgument(0))
            .unwrap();
        assert_eq!(m.enclosing_code(top).1, src);
    }
}
