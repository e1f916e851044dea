use serde::{Deserialize, Serialize};

/// Half-open byte range into a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeclKind {
    Var,
    Let,
    Const,
}

/// Node kinds of the subset grammar.
///
/// Child layouts:
/// - `FunctionDecl`: `[Identifier name, Identifier param.., Block]`
/// - `FunctionExpr`: `[Identifier name?, Identifier param.., Block]`
/// - `ArrowFunction`: `[Identifier param.., Block | expression]`
/// - `Call`: `[callee, argument..]`
/// - `Member`: `[object, PropertyName]`, or `[object, expression]` when computed
/// - `Property`: `[key, value]`, or `[Identifier]` when shorthand
/// - `VarDeclarator`: `[Identifier name, init?]`
/// - `For`: `[init, test, update, body]` with `Empty` for absent parts
/// - `ForIn`: `[VarDecl | target, iterable, body]`
/// - `Try`: `[Block, Catch?, Finally?]`, `Catch`: `[Identifier?, Block]`
/// - `Case`: `[test?, statement..]`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Program,
    FunctionDecl {
        name: String,
        is_async: bool,
    },
    FunctionExpr {
        name: Option<String>,
        is_async: bool,
    },
    ArrowFunction {
        is_async: bool,
    },
    Call {
        is_new: bool,
    },
    Member {
        computed: bool,
    },
    PropertyName(String),
    Identifier(String),
    StringLit(String),
    NumberLit(String),
    RegexLit(String),
    /// `true`, `false`, `null`, `undefined`-free keywords such as `this`.
    Literal(String),
    TemplateLit,
    ObjectLit,
    Property {
        key: String,
        shorthand: bool,
    },
    ArrayLit,
    Assign {
        op: String,
    },
    VarDecl(DeclKind),
    VarDeclarator {
        name: String,
    },
    Return,
    Block,
    ExprStmt,
    If,
    Binary {
        op: String,
    },
    Logical {
        op: String,
    },
    Unary {
        op: String,
    },
    Update {
        op: String,
        prefix: bool,
    },
    Conditional,
    Await,
    Sequence,
    Spread,
    While,
    DoWhile,
    For,
    ForIn {
        of: bool,
    },
    Try,
    Catch,
    Finally,
    Throw,
    Break,
    Continue,
    Switch,
    Case {
        default: bool,
    },
    Empty,
}

impl NodeKind {
    pub fn is_function(&self) -> bool {
        matches!(self, NodeKind::FunctionDecl { .. } | NodeKind::FunctionExpr { .. } | NodeKind::ArrowFunction { .. })
    }

    pub fn is_statement(&self) -> bool {
        matches!(
            self,
            NodeKind::FunctionDecl { .. }
                | NodeKind::VarDecl(_)
                | NodeKind::Return
                | NodeKind::Block
                | NodeKind::ExprStmt
                | NodeKind::If
                | NodeKind::While
                | NodeKind::DoWhile
                | NodeKind::For
                | NodeKind::ForIn { .. }
                | NodeKind::Try
                | NodeKind::Throw
                | NodeKind::Break
                | NodeKind::Continue
                | NodeKind::Switch
                | NodeKind::Empty
        )
    }

    /// Leaf kinds that carry a token of the input.
    pub fn is_leaf(&self) -> bool {
        matches!(
            self,
            NodeKind::PropertyName(_)
                | NodeKind::Identifier(_)
                | NodeKind::StringLit(_)
                | NodeKind::NumberLit(_)
                | NodeKind::RegexLit(_)
                | NodeKind::Literal(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: NodeKind,
    pub span: Span,
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Span, children: Vec<AstNode>) -> Self {
        AstNode { kind, span, children }
    }

    pub fn leaf(kind: NodeKind, span: Span) -> Self {
        AstNode { kind, span, children: Vec::new() }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a AstNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        let mut n = 0;
        self.walk(&mut |node| {
            if pred(&node.kind) {
                n += 1;
            }
        });
        n
    }
}
