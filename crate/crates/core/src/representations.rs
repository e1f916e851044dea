//! Partial access paths and canonical representations.
//!
//! A path is written in dotted form: `find(0).username.$regex`. The first
//! segment is a property of an implicit wildcard root, `(i)` denotes
//! parameter/argument `i` of the function on the left and `()` its result.
//! The parenthesized form `(member $regex (parameter 0 (member find *)))` is
//! accepted on input and normalized.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::{BindingKind, ElementKind, FileModel, NodeId, NodeKind, ProgramElement};

/// Maximum recursion through bindings and contexts.
const MAX_DEPTH: usize = 4;
/// Maximum operators in one path.
const MAX_OPS: usize = 8;
/// Maximum paths kept per element.
const MAX_PATHS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReprError {
    #[error("malformed access path {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("no syntactic context for element")]
    NoPath,
    #[error("empty prediction set")]
    EmptyPredictionSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// `None` is the wildcard `*`.
    Prop(Option<String>),
    Param(Option<usize>),
    Result,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AccessPath {
    ops: Vec<Op>,
}

impl AccessPath {
    pub fn root(name: Option<&str>) -> Self {
        AccessPath { ops: vec![prop_op(name)] }
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn prop(&self, name: Option<&str>) -> Self {
        self.with(prop_op(name))
    }

    pub fn param(&self, i: usize) -> Self {
        self.with(Op::Param(Some(i)))
    }

    pub fn result(&self) -> Self {
        self.with(Op::Result)
    }

    fn with(&self, op: Op) -> Self {
        let mut ops = self.ops.clone();
        ops.push(op);
        AccessPath { ops }
    }

    pub fn parse(text: &str) -> Result<Self, ReprError> {
        let text = text.trim();
        if text.starts_with('(') {
            parse_lisp(text)
        } else {
            parse_dotted(text)
        }
    }

    pub fn features(&self) -> ReprFeatures {
        let mut f = ReprFeatures {
            // the implicit root counts as one wildcard property access
            n_property: 1,
            n_wildcards: 1,
            ..Default::default()
        };
        for op in &self.ops {
            match op {
                Op::Prop(name) => {
                    f.n_property += 1;
                    if name.is_none() {
                        f.n_wildcards += 1;
                    }
                }
                Op::Param(i) => {
                    f.n_param += 1;
                    if i.is_none() {
                        f.n_wildcards += 1;
                    }
                }
                Op::Result => f.n_result += 1,
            }
        }
        f.length = f.n_param + f.n_result + f.n_property;
        f.has_named_leaf = self
            .ops
            .iter()
            .rev()
            .find_map(|op| match op {
                Op::Prop(name) => Some(name.is_some()),
                _ => None,
            })
            .unwrap_or(false);
        f
    }
}

impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::Prop(name) => {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    f.write_str(name.as_deref().unwrap_or("*"))?;
                }
                Op::Param(Some(n)) => write!(f, "({n})")?,
                Op::Param(None) => f.write_str("(*)")?,
                Op::Result => f.write_str("()")?,
            }
        }
        Ok(())
    }
}

fn prop_op(name: Option<&str>) -> Op {
    Op::Prop(name.filter(|n| is_plain_name(n)).map(str::to_string))
}

fn is_plain_name(name: &str) -> bool {
    !name.is_empty() && name != "*" && !name.chars().any(|c| matches!(c, '.' | '(' | ')') || c.is_whitespace())
}

fn malformed(text: &str, reason: &str) -> ReprError {
    ReprError::Malformed { text: text.to_string(), reason: reason.to_string() }
}

fn parse_dotted(text: &str) -> Result<AccessPath, ReprError> {
    let mut ops = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let read_name = |i: &mut usize| -> Option<String> {
        let start = *i;
        while *i < bytes.len() && !matches!(bytes[*i], b'.' | b'(' | b')') && !bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
        (start < *i).then(|| text[start..*i].to_string())
    };
    let name = read_name(&mut i).ok_or_else(|| malformed(text, "expected a leading name"))?;
    ops.push(Op::Prop((name != "*").then_some(name)));
    while i < bytes.len() {
        match bytes[i] {
            b'.' => {
                i += 1;
                let name = read_name(&mut i).ok_or_else(|| malformed(text, "expected a name after '.'"))?;
                ops.push(Op::Prop((name != "*").then_some(name)));
            }
            b'(' => {
                let close = text[i..].find(')').ok_or_else(|| malformed(text, "unclosed '('"))? + i;
                let inner = &text[i + 1..close];
                ops.push(match inner {
                    "" => Op::Result,
                    "*" => Op::Param(None),
                    n => Op::Param(Some(n.parse().map_err(|_| malformed(text, "bad parameter index"))?)),
                });
                i = close + 1;
            }
            _ => return Err(malformed(text, "unexpected character")),
        }
    }
    Ok(AccessPath { ops })
}

fn parse_lisp(text: &str) -> Result<AccessPath, ReprError> {
    let tokens: Vec<String> =
        text.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect();
    let mut pos = 0;
    let mut ops = lisp_expr(text, &tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(malformed(text, "trailing input"));
    }
    if !matches!(ops.first(), Some(Op::Prop(_))) {
        ops.insert(0, Op::Prop(None));
    }
    Ok(AccessPath { ops })
}

fn lisp_expr(text: &str, tokens: &[String], pos: &mut usize) -> Result<Vec<Op>, ReprError> {
    let tok = tokens.get(*pos).ok_or_else(|| malformed(text, "unexpected end"))?;
    *pos += 1;
    if tok == "*" {
        return Ok(Vec::new());
    }
    if tok != "(" {
        return Err(malformed(text, "expected '(' or '*'"));
    }
    let head = tokens.get(*pos).cloned().ok_or_else(|| malformed(text, "unexpected end"))?;
    *pos += 1;
    let op = match head.as_str() {
        "member" => {
            let name = tokens.get(*pos).cloned().ok_or_else(|| malformed(text, "member needs a name"))?;
            *pos += 1;
            prop_op(Some(&name))
        }
        "parameter" | "argument" => {
            let idx = tokens.get(*pos).cloned().ok_or_else(|| malformed(text, "parameter needs an index"))?;
            *pos += 1;
            if idx == "*" {
                Op::Param(None)
            } else {
                Op::Param(Some(idx.parse().map_err(|_| malformed(text, "bad parameter index"))?))
            }
        }
        "result" | "return" => Op::Result,
        _ => return Err(malformed(text, "unknown operator")),
    };
    let mut ops = lisp_expr(text, tokens, pos)?;
    if tokens.get(*pos).map(String::as_str) != Some(")") {
        return Err(malformed(text, "expected ')'"));
    }
    *pos += 1;
    ops.push(op);
    Ok(ops)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReprFeatures {
    pub length: usize,
    pub n_param: usize,
    pub n_result: usize,
    pub n_property: usize,
    pub n_wildcards: usize,
    pub has_named_leaf: bool,
}

impl ReprFeatures {
    /// Higher is better.
    pub fn score(&self) -> i64 {
        let len = self.length as i64;
        3 * i64::from(self.has_named_leaf) + 2 * len.min(3) - 2 * self.n_wildcards as i64 - (len - 3).max(0)
    }
}

/// Canonical access path of a program element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Representation(String);

impl Representation {
    /// Parses either syntax and returns the dotted form.
    pub fn parse(text: &str) -> Result<Self, ReprError> {
        Ok(Representation(AccessPath::parse(text)?.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Representation {
    fn from(s: &str) -> Self {
        Representation(s.to_string())
    }
}

impl From<String> for Representation {
    fn from(s: String) -> Self {
        Representation(s)
    }
}

impl From<&AccessPath> for Representation {
    fn from(p: &AccessPath) -> Self {
        Representation(p.to_string())
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Highest-scoring path, ties broken by the smaller text.
pub fn canonicalize(paths: &[AccessPath]) -> Option<Representation> {
    paths
        .iter()
        .map(|p| (p.features().score(), p.to_string()))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .map(|(_, text)| Representation(text))
}

/// Fraction of predictions whose representation equals `rep`.
pub fn coarseness<'a>(
    rep: &Representation,
    reps: impl IntoIterator<Item = &'a Representation>,
) -> Result<f64, ReprError> {
    let (mut hit, mut total) = (0usize, 0usize);
    for r in reps {
        total += 1;
        if r == rep {
            hit += 1;
        }
    }
    if total == 0 {
        return Err(ReprError::EmptyPredictionSet);
    }
    Ok(hit as f64 / total as f64)
}

/// Access paths of an element, most specific first. Never empty: when the
/// syntactic context yields nothing a wildcard-rooted fallback is returned.
pub fn compute_access_paths(model: &FileModel, e: &ProgramElement) -> Vec<AccessPath> {
    match try_access_paths(model, e) {
        Ok(paths) => paths,
        Err(_) => vec![fallback(e.kind)],
    }
}

/// Like [`compute_access_paths`] but reports [`ReprError::NoPath`] instead of
/// falling back.
pub fn try_access_paths(model: &FileModel, e: &ProgramElement) -> Result<Vec<AccessPath>, ReprError> {
    let w = Walker { m: model };
    let node = e.node;
    let paths = match e.kind {
        ElementKind::CallArgument(i) => {
            let call = w.call_of_arg(node);
            w.callee_paths(call, 0).into_iter().map(|p| p.param(i)).collect()
        }
        ElementKind::CallResult => w.callee_paths(node, 0).into_iter().map(|p| p.result()).collect(),
        ElementKind::Parameter(i) => {
            let func = model.parent(node).expect("parameter has a function");
            w.fn_paths(func, 0).into_iter().map(|p| p.param(i)).collect()
        }
        ElementKind::PropertyRead | ElementKind::PropertyWrite => {
            if matches!(model.kind(node), NodeKind::Member { .. }) {
                w.member_paths(node, 0)
            } else {
                // object literal property value
                let prop = model.parent(node).expect("property value has a parent");
                let NodeKind::Property { key, .. } = model.kind(prop) else {
                    return Err(ReprError::NoPath);
                };
                let obj = model.parent(prop).expect("property has an object");
                let mut out: Vec<AccessPath> = w.object_ctx(obj, 0).into_iter().map(|p| p.prop(Some(key))).collect();
                out.push(AccessPath::root(Some(key)));
                out
            }
        }
    };
    let paths = finish(paths);
    if paths.is_empty() {
        Err(ReprError::NoPath)
    } else {
        Ok(paths)
    }
}

fn fallback(kind: ElementKind) -> AccessPath {
    let root = AccessPath::root(None);
    match kind {
        ElementKind::CallArgument(i) | ElementKind::Parameter(i) => root.param(i),
        ElementKind::CallResult => root.result(),
        ElementKind::PropertyRead | ElementKind::PropertyWrite => root,
    }
}

/// Deduplicates, drops overlong paths, orders most specific first.
fn finish(paths: Vec<AccessPath>) -> Vec<AccessPath> {
    let set: BTreeSet<AccessPath> = paths.into_iter().filter(|p| p.ops.len() <= MAX_OPS).collect();
    let mut v: Vec<AccessPath> = set.into_iter().collect();
    v.sort_by(|a, b| b.ops.len().cmp(&a.ops.len()).then_with(|| a.to_string().cmp(&b.to_string())));
    v.truncate(MAX_PATHS);
    v
}

fn cap(mut v: Vec<AccessPath>) -> Vec<AccessPath> {
    v.retain(|p| p.ops.len() <= MAX_OPS);
    v.sort();
    v.dedup();
    v.truncate(MAX_PATHS);
    v
}

struct Walker<'a> {
    m: &'a FileModel,
}

impl Walker<'_> {
    fn call_of_arg(&self, anchor: NodeId) -> NodeId {
        let p = self.m.parent(anchor).expect("argument has a parent");
        if matches!(self.m.kind(p), NodeKind::Spread) {
            self.m.parent(p).expect("spread has a parent")
        } else {
            p
        }
    }

    /// Paths naming the function a call invokes.
    fn callee_paths(&self, call: NodeId, depth: usize) -> Vec<AccessPath> {
        let callee = self.m.children(call)[0];
        match self.m.kind(callee) {
            NodeKind::Member { .. } => {
                let (name, obj) = self.member_name(callee);
                let mut out = vec![AccessPath::root(name.as_deref())];
                if depth < MAX_DEPTH {
                    for q in self.value_paths(obj, depth + 1) {
                        out.push(q.prop(name.as_deref()));
                        if name.is_some() {
                            out.push(q.prop(None));
                        }
                    }
                }
                cap(out)
            }
            _ => self.value_paths(callee, depth),
        }
    }

    fn member_name(&self, member: NodeId) -> (Option<String>, NodeId) {
        let ch = self.m.children(member);
        let name = match self.m.kind(ch[1]) {
            NodeKind::PropertyName(n) | NodeKind::StringLit(n) => Some(n.clone()),
            _ => None,
        };
        (name, ch[0])
    }

    fn member_paths(&self, member: NodeId, depth: usize) -> Vec<AccessPath> {
        let (name, obj) = self.member_name(member);
        let mut out = Vec::new();
        if name.is_some() {
            out.push(AccessPath::root(name.as_deref()));
        }
        if depth < MAX_DEPTH {
            for q in self.value_paths(obj, depth + 1) {
                out.push(q.prop(name.as_deref()));
            }
        }
        cap(out)
    }

    /// Paths describing the value an expression evaluates to.
    fn value_paths(&self, expr: NodeId, depth: usize) -> Vec<AccessPath> {
        if depth > MAX_DEPTH {
            return Vec::new();
        }
        let m = self.m;
        match m.kind(expr) {
            NodeKind::Identifier(name) => {
                let Some(b) = m.binding_of(expr) else {
                    return vec![AccessPath::root(Some(name))];
                };
                let b = &m.bindings[b];
                match b.kind {
                    BindingKind::Param { func, index } => {
                        self.fn_paths(func, depth + 1).into_iter().map(|p| p.param(index)).collect()
                    }
                    BindingKind::Function => vec![AccessPath::root(Some(name))],
                    BindingKind::Var | BindingKind::Implicit if b.inits.len() == 1 => {
                        let init = b.inits[0];
                        if m.kind(init).is_function() {
                            return vec![AccessPath::root(Some(name))];
                        }
                        let v = self.value_paths(init, depth + 1);
                        if v.is_empty() {
                            vec![AccessPath::root(Some(name))]
                        } else {
                            v
                        }
                    }
                    BindingKind::Catch => Vec::new(),
                    _ => vec![AccessPath::root(Some(name))],
                }
            }
            NodeKind::Member { .. } => self.member_paths(expr, depth),
            NodeKind::Call { .. } => {
                if let Some(module) = self.require_target(expr) {
                    return vec![AccessPath::root(Some(&module))];
                }
                self.callee_paths(expr, depth + 1).into_iter().map(|p| p.result()).collect()
            }
            NodeKind::Await => self.value_paths(m.children(expr)[0], depth),
            NodeKind::Sequence => self.value_paths(*m.children(expr).last().expect("non-empty sequence"), depth),
            NodeKind::Logical { .. } => {
                let ch = m.children(expr);
                let mut v = self.value_paths(ch[0], depth + 1);
                v.extend(self.value_paths(ch[1], depth + 1));
                cap(v)
            }
            NodeKind::Conditional => {
                let ch = m.children(expr);
                let mut v = self.value_paths(ch[1], depth + 1);
                v.extend(self.value_paths(ch[2], depth + 1));
                cap(v)
            }
            k if k.is_function() => self.fn_paths(expr, depth),
            _ => Vec::new(),
        }
    }

    fn require_target(&self, call: NodeId) -> Option<String> {
        let ch = self.m.children(call);
        match (self.m.kind(ch[0]), ch.get(1).map(|&a| self.m.kind(a))) {
            (NodeKind::Identifier(f), Some(NodeKind::StringLit(module))) if f == "require" && ch.len() == 2 => {
                Some(module.clone())
            }
            _ => None,
        }
    }

    /// Paths naming a function value by the context it is defined in.
    fn fn_paths(&self, func: NodeId, depth: usize) -> Vec<AccessPath> {
        if depth > MAX_DEPTH {
            return Vec::new();
        }
        let m = self.m;
        let mut out = Vec::new();
        match m.kind(func) {
            NodeKind::FunctionDecl { name, .. } => return vec![AccessPath::root(Some(name))],
            NodeKind::FunctionExpr { name: Some(name), .. } => out.push(AccessPath::root(Some(name))),
            _ => {}
        }
        let Some(parent) = m.parent(func) else { return out };
        match m.kind(parent) {
            NodeKind::Call { .. } => {
                if let Some(j) = m.children(parent)[1..].iter().position(|&a| a == func) {
                    out.extend(self.callee_paths(parent, depth + 1).into_iter().map(|p| p.param(j)));
                }
            }
            NodeKind::Assign { .. } if m.children(parent)[1] == func => {
                let target = m.children(parent)[0];
                match m.kind(target) {
                    NodeKind::Identifier(n) => out.push(AccessPath::root(Some(n))),
                    NodeKind::Member { .. } => out.extend(self.member_paths(target, depth + 1)),
                    _ => {}
                }
            }
            NodeKind::VarDeclarator { name } => out.push(AccessPath::root(Some(name))),
            NodeKind::Property { key, .. } => {
                let obj = m.parent(parent).expect("property has an object");
                out.extend(self.object_ctx(obj, depth + 1).into_iter().map(|p| p.prop(Some(key))));
                out.push(AccessPath::root(Some(key)));
            }
            _ => {}
        }
        cap(out)
    }

    /// Paths naming the location an object literal is stored into.
    fn object_ctx(&self, obj: NodeId, depth: usize) -> Vec<AccessPath> {
        if depth > MAX_DEPTH {
            return Vec::new();
        }
        let m = self.m;
        let Some(parent) = m.parent(obj) else { return Vec::new() };
        match m.kind(parent) {
            NodeKind::Call { .. } => match m.children(parent)[1..].iter().position(|&a| a == obj) {
                Some(j) => self.callee_paths(parent, depth + 1).into_iter().map(|p| p.param(j)).collect(),
                None => Vec::new(),
            },
            NodeKind::Property { key, .. } => {
                let outer = m.parent(parent).expect("property has an object");
                let mut v: Vec<AccessPath> =
                    self.object_ctx(outer, depth + 1).into_iter().map(|p| p.prop(Some(key))).collect();
                v.push(AccessPath::root(Some(key)));
                cap(v)
            }
            NodeKind::VarDeclarator { name } => vec![AccessPath::root(Some(name))],
            NodeKind::Assign { .. } if m.children(parent)[1] == obj => {
                let target = m.children(parent)[0];
                match m.kind(target) {
                    NodeKind::Identifier(n) => vec![AccessPath::root(Some(n))],
                    NodeKind::Member { .. } => self.member_paths(target, depth + 1),
                    _ => Vec::new(),
                }
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, SourceFile};

    fn paths_of(src: &str, text: &str, kind: ElementKind) -> Vec<String> {
        let file = SourceFile::new("p", "a.js", src);
        let ast = parse_source(&file).unwrap();
        let m = FileModel::build(file, &ast);
        let e = m
            .elements
            .iter()
            .find(|e| e.kind == kind && m.file.slice(e.span) == text)
            .unwrap_or_else(|| panic!("no {kind} element {text:?}"));
        compute_access_paths(&m, e).iter().map(ToString::to_string).collect()
    }

    fn p(s: &str) -> AccessPath {
        AccessPath::parse(s).unwrap()
    }

    #[test]
    fn round_trip_text() {
        for s in ["f(0)", "a.b(1)()", "*(0)", "getquerySendResponse(0).*(0)", "x.y.z", "post(*)"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!(AccessPath::parse("f(").is_err());
        assert!(AccessPath::parse(".f").is_err());
        assert!(AccessPath::parse("f(x)").is_err());
    }

    #[test]
    fn lisp_normalization() {
        assert_eq!(
            p("(member $regex (member username (parameter 0 (member find *))))").to_string(),
            "find(0).username.$regex"
        );
        assert_eq!(p("(result (member f *))").to_string(), "f()");
        assert_eq!(p("(parameter 0 *)").to_string(), "*(0)");
    }

    #[test]
    fn feature_scores_of_the_worked_example() {
        assert_eq!(p("findByIdAndUpdate(0)").features().score(), 7);
        assert_eq!(p("getquerySendResponse(0).findByIdAndUpdate(0)").features().score(), 5);
        assert_eq!(p("getquerySendResponse(0).*(0)").features().score(), 0);
        let f = p("a.*(0)()").features();
        assert_eq!(f.length, f.n_param + f.n_result + f.n_property);
        assert_eq!((f.n_property, f.n_param, f.n_result, f.n_wildcards), (3, 1, 1, 2));
        assert!(!f.has_named_leaf);
    }

    #[test]
    fn canonical_choice() {
        let three = [
            p("getquerySendResponse(0).*(0)"),
            p("getquerySendResponse(0).findByIdAndUpdate(0)"),
            p("findByIdAndUpdate(0)"),
        ];
        assert_eq!(canonicalize(&three).unwrap().as_str(), "findByIdAndUpdate(0)");
        assert_eq!(canonicalize(&[p("x.y")]).unwrap().as_str(), "x.y");
        assert_eq!(canonicalize(&[p("g(0)"), p("f(0)")]).unwrap().as_str(), "f(0)");
        assert_eq!(canonicalize(&[]), None);
    }

    #[test]
    fn bare_call_argument() {
        assert_eq!(paths_of("f(x)", "x", ElementKind::CallArgument(0)), vec!["f(0)"]);
    }

    #[test]
    fn method_argument_through_a_parameter() {
        let src = "function getquerySendResponse(sliders) {\n  sliders.findByIdAndUpdate({ id: 1 });\n}\n";
        let mut got = paths_of(src, "{ id: 1 }", ElementKind::CallArgument(0));
        got.sort();
        assert_eq!(
            got,
            vec![
                "findByIdAndUpdate(0)",
                "getquerySendResponse(0).*(0)",
                "getquerySendResponse(0).findByIdAndUpdate(0)"
            ]
        );
    }

    #[test]
    fn nested_object_property() {
        let got = paths_of("User.find({username: {$regex: q}})", "q", ElementKind::PropertyWrite);
        assert!(got.contains(&"find(0).username.$regex".to_string()), "{got:?}");
        assert!(got.contains(&"User.find(0).username.$regex".to_string()), "{got:?}");
    }

    #[test]
    fn callback_parameters() {
        let got = paths_of("app.post('/x', (req, res) => { res.send(req.body); });", "req", ElementKind::Parameter(0));
        assert!(got.contains(&"post(1)(0)".to_string()), "{got:?}");
        assert!(got.contains(&"app.post(1)(0)".to_string()), "{got:?}");
    }

    #[test]
    fn require_roots() {
        let got = paths_of("const cp = require('child_process'); cp.exec(cmd);", "cmd", ElementKind::CallArgument(0));
        assert!(got.contains(&"child_process.exec(0)".to_string()), "{got:?}");
        assert!(got.contains(&"exec(0)".to_string()));
    }

    #[test]
    fn fallback_is_wildcard_rooted() {
        assert_eq!(paths_of("(function () {})(a)", "a", ElementKind::CallArgument(0)), vec!["*(0)"]);
        assert_eq!(paths_of("o[k] = 1", "o[k]", ElementKind::PropertyWrite), vec!["o.*"]);
    }

    #[test]
    fn coarseness_counts() {
        let reps: Vec<Representation> =
            (0..10).map(|i| Representation::from(if i < 2 { "a(0)" } else { "b(0)" })).collect();
        assert!((coarseness(&"a(0)".into(), &reps).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(coarseness(&"a(0)".into(), &reps[..2]).unwrap(), 1.0);
        assert_eq!(coarseness(&"a(0)".into(), &[]), Err(ReprError::EmptyPredictionSet));
    }
}
