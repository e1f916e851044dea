//! Recursive-descent parser for the JavaScript subset.
//!
//! Supported: ES5 statements and expressions, arrow functions, template
//! literals, `async`/`await`, object and array literals (with spread),
//! optional chaining and `require`-style module access through ordinary
//! calls. Classes, generators, destructuring and `import`/`export` are
//! rejected with a syntax error.

use super::ast::{AstNode, DeclKind, NodeKind, Span};
use super::lexer::{LexError, Lexer, Token, TokenKind};
use super::SyntaxError;

const ASSIGN_OPS: &[&str] =
    &["=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "??="];

const UNSUPPORTED_KEYWORDS: &[&str] = &["class", "import", "export", "yield", "with", "debugger"];

fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "??" | "||" => 1,
        "&&" => 2,
        "|" => 3,
        "^" => 4,
        "&" => 5,
        "==" | "!=" | "===" | "!==" => 6,
        "<" | ">" | "<=" | ">=" | "instanceof" | "in" => 7,
        "<<" | ">>" | ">>>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        "**" => 11,
        _ => return None,
    })
}

pub struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    last_end: usize,
    in_function: bool,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Result<Self, SyntaxError> {
        Self::with_range(src, Span::new(0, src.len()))
    }

    fn with_range(src: &'a str, range: Span) -> Result<Self, SyntaxError> {
        let tokens = Lexer::with_range(src, range.start, range.end).tokenize().map_err(|e| lex_error(src, e))?;
        Ok(Parser { src, tokens, pos: 0, last_end: range.start, in_function: false })
    }

    pub fn parse_program(mut self) -> Result<AstNode, SyntaxError> {
        let mut body = Vec::new();
        while !self.at_eof() {
            body.push(self.statement()?);
        }
        Ok(AstNode::new(NodeKind::Program, Span::new(0, self.src.len()), body))
    }

    // ---- token helpers ------------------------------------------------

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn text(&self) -> &'a str {
        let t = self.peek();
        &self.src[t.span.start..t.span.end]
    }

    fn text_at(&self, n: usize) -> &'a str {
        let t = self.peek_at(n);
        &self.src[t.span.start..t.span.end]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn is_punct(&self, p: &str) -> bool {
        self.peek().kind == TokenKind::Punct && self.text() == p
    }

    fn is_punct_at(&self, n: usize, p: &str) -> bool {
        self.peek_at(n).kind == TokenKind::Punct && self.text_at(n) == p
    }

    fn is_word(&self, w: &str) -> bool {
        self.peek().kind == TokenKind::Ident && self.text() == w
    }

    fn is_word_at(&self, n: usize, w: &str) -> bool {
        self.peek_at(n).kind == TokenKind::Ident && self.text_at(n) == w
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
            self.last_end = t.span.end;
        }
        t
    }

    fn start(&self) -> usize {
        self.peek().span.start
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.last_end.max(start))
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = self.peek();
        let found = if t.kind == TokenKind::Eof { "end of input".to_string() } else { self.text().to_string() };
        let (line, column) = line_col(self.src, t.span.start);
        SyntaxError {
            line,
            column,
            offset: t.span.start,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, SyntaxError> {
        if self.is_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.error(&[p]))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<Token, SyntaxError> {
        if self.is_word(w) {
            Ok(self.bump())
        } else {
            Err(self.error(&[w]))
        }
    }

    fn identifier(&mut self) -> Result<AstNode, SyntaxError> {
        if self.peek().kind != TokenKind::Ident || is_reserved(self.text()) {
            return Err(self.error(&["identifier"]));
        }
        let name = self.text().to_string();
        let t = self.bump();
        Ok(AstNode::leaf(NodeKind::Identifier(name), t.span))
    }

    /// Automatic semicolon insertion, restricted to the common cases.
    fn semicolon(&mut self) -> Result<(), SyntaxError> {
        if self.eat_punct(";") || self.is_punct("}") || self.at_eof() || self.peek().newline_before {
            Ok(())
        } else {
            Err(self.error(&[";"]))
        }
    }

    // ---- statements ---------------------------------------------------

    fn statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        if self.peek().kind == TokenKind::Punct {
            if self.is_punct("{") {
                return self.block();
            }
            if self.eat_punct(";") {
                return Ok(AstNode::leaf(NodeKind::Empty, self.span_from(start)));
            }
        }
        if self.peek().kind == TokenKind::Ident {
            let word = self.text();
            if UNSUPPORTED_KEYWORDS.contains(&word) && !self.is_punct_at(1, ".") && !self.is_punct_at(1, "(") {
                return Err(self.error(&["statement"]));
            }
            match word {
                "var" | "const" => return self.var_statement(),
                "let" if self.peek_at(1).kind == TokenKind::Ident => return self.var_statement(),
                "function" => return self.function_declaration(start, false),
                "async" if self.is_word_at(1, "function") && !self.peek_at(1).newline_before => {
                    self.bump();
                    return self.function_declaration(start, true);
                }
                "return" => return self.return_statement(),
                "if" => return self.if_statement(),
                "while" => {
                    self.bump();
                    self.expect_punct("(")?;
                    let test = self.expression(false)?;
                    self.expect_punct(")")?;
                    let body = self.statement()?;
                    return Ok(AstNode::new(NodeKind::While, self.span_from(start), vec![test, body]));
                }
                "do" => {
                    self.bump();
                    let body = self.statement()?;
                    self.expect_word("while")?;
                    self.expect_punct("(")?;
                    let test = self.expression(false)?;
                    self.expect_punct(")")?;
                    self.eat_punct(";");
                    return Ok(AstNode::new(NodeKind::DoWhile, self.span_from(start), vec![body, test]));
                }
                "for" => return self.for_statement(),
                "try" => return self.try_statement(),
                "throw" => {
                    self.bump();
                    let arg = self.expression(false)?;
                    self.semicolon()?;
                    return Ok(AstNode::new(NodeKind::Throw, self.span_from(start), vec![arg]));
                }
                "break" | "continue" => {
                    let kind = if word == "break" { NodeKind::Break } else { NodeKind::Continue };
                    self.bump();
                    if self.peek().kind == TokenKind::Ident && !self.peek().newline_before {
                        self.bump(); // label
                    }
                    self.semicolon()?;
                    return Ok(AstNode::leaf(kind, self.span_from(start)));
                }
                "switch" => return self.switch_statement(),
                _ => {}
            }
        }
        let expr = self.expression(false)?;
        self.semicolon()?;
        Ok(AstNode::new(NodeKind::ExprStmt, self.span_from(start), vec![expr]))
    }

    fn block(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return Err(self.error(&["}"]));
            }
            body.push(self.statement()?);
        }
        self.bump();
        Ok(AstNode::new(NodeKind::Block, self.span_from(start), body))
    }

    fn var_declarations(&mut self, no_in: bool) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let kind = match self.bump().text(self.src) {
            "var" => DeclKind::Var,
            "let" => DeclKind::Let,
            _ => DeclKind::Const,
        };
        let mut decls = Vec::new();
        loop {
            let dstart = self.start();
            let name = self.identifier()?;
            let NodeKind::Identifier(n) = &name.kind else { unreachable!() };
            let n = n.clone();
            let mut children = vec![name];
            if self.eat_punct("=") {
                children.push(self.assignment(no_in)?);
            }
            decls.push(AstNode::new(NodeKind::VarDeclarator { name: n }, self.span_from(dstart), children));
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(AstNode::new(NodeKind::VarDecl(kind), self.span_from(start), decls))
    }

    fn var_statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let mut node = self.var_declarations(false)?;
        self.semicolon()?;
        node.span = self.span_from(start);
        Ok(node)
    }

    fn params(&mut self) -> Result<Vec<AstNode>, SyntaxError> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            params.push(self.identifier()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn function_body(&mut self) -> Result<AstNode, SyntaxError> {
        let saved = self.in_function;
        self.in_function = true;
        let body = self.block();
        self.in_function = saved;
        body
    }

    fn function_declaration(&mut self, start: usize, is_async: bool) -> Result<AstNode, SyntaxError> {
        self.expect_word("function")?;
        if self.is_punct("*") {
            return Err(self.error(&["identifier"]));
        }
        let name = self.identifier()?;
        let NodeKind::Identifier(n) = &name.kind else { unreachable!() };
        let kind = NodeKind::FunctionDecl { name: n.clone(), is_async };
        let mut children = vec![name];
        children.extend(self.params()?);
        children.push(self.function_body()?);
        Ok(AstNode::new(kind, self.span_from(start), children))
    }

    fn return_statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        if !self.in_function {
            return Err(self.error(&["statement"]));
        }
        self.bump();
        let mut children = Vec::new();
        if !self.is_punct(";") && !self.is_punct("}") && !self.at_eof() && !self.peek().newline_before {
            children.push(self.expression(false)?);
        }
        self.semicolon()?;
        Ok(AstNode::new(NodeKind::Return, self.span_from(start), children))
    }

    fn if_statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.bump();
        self.expect_punct("(")?;
        let test = self.expression(false)?;
        self.expect_punct(")")?;
        let mut children = vec![test, self.statement()?];
        if self.is_word("else") {
            self.bump();
            children.push(self.statement()?);
        }
        Ok(AstNode::new(NodeKind::If, self.span_from(start), children))
    }

    fn for_statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.bump();
        self.expect_punct("(")?;
        let empty = |p: &Self| AstNode::leaf(NodeKind::Empty, Span::new(p.start(), p.start()));
        let init = if self.is_punct(";") {
            empty(self)
        } else if self.is_word("var")
            || self.is_word("const")
            || (self.is_word("let") && self.peek_at(1).kind == TokenKind::Ident)
        {
            self.var_declarations(true)?
        } else {
            self.expression(true)?
        };
        if self.is_word("of") || self.is_word("in") {
            let of = self.bump().text(self.src) == "of";
            let right = if of { self.assignment(false)? } else { self.expression(false)? };
            self.expect_punct(")")?;
            let body = self.statement()?;
            return Ok(AstNode::new(NodeKind::ForIn { of }, self.span_from(start), vec![init, right, body]));
        }
        self.expect_punct(";")?;
        let test = if self.is_punct(";") { empty(self) } else { self.expression(false)? };
        self.expect_punct(";")?;
        let update = if self.is_punct(")") { empty(self) } else { self.expression(false)? };
        self.expect_punct(")")?;
        let body = self.statement()?;
        Ok(AstNode::new(NodeKind::For, self.span_from(start), vec![init, test, update, body]))
    }

    fn try_statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.bump();
        let mut children = vec![self.block()?];
        if self.is_word("catch") {
            let cstart = self.start();
            self.bump();
            let mut catch_children = Vec::new();
            if self.eat_punct("(") {
                catch_children.push(self.identifier()?);
                self.expect_punct(")")?;
            }
            catch_children.push(self.block()?);
            children.push(AstNode::new(NodeKind::Catch, self.span_from(cstart), catch_children));
        }
        if self.is_word("finally") {
            let fstart = self.start();
            self.bump();
            let block = self.block()?;
            children.push(AstNode::new(NodeKind::Finally, self.span_from(fstart), vec![block]));
        }
        if children.len() == 1 {
            return Err(self.error(&["catch", "finally"]));
        }
        Ok(AstNode::new(NodeKind::Try, self.span_from(start), children))
    }

    fn switch_statement(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.bump();
        self.expect_punct("(")?;
        let disc = self.expression(false)?;
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut children = vec![disc];
        while !self.is_punct("}") {
            let cstart = self.start();
            let mut case_children = Vec::new();
            let default = if self.is_word("case") {
                self.bump();
                case_children.push(self.expression(false)?);
                false
            } else if self.is_word("default") {
                self.bump();
                true
            } else {
                return Err(self.error(&["case", "default", "}"]));
            };
            self.expect_punct(":")?;
            while !self.is_word("case") && !self.is_word("default") && !self.is_punct("}") {
                if self.at_eof() {
                    return Err(self.error(&["}"]));
                }
                case_children.push(self.statement()?);
            }
            children.push(AstNode::new(NodeKind::Case { default }, self.span_from(cstart), case_children));
        }
        self.bump();
        Ok(AstNode::new(NodeKind::Switch, self.span_from(start), children))
    }

    // ---- expressions --------------------------------------------------

    fn expression(&mut self, no_in: bool) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let first = self.assignment(no_in)?;
        if !self.is_punct(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_punct(",") {
            items.push(self.assignment(no_in)?);
        }
        Ok(AstNode::new(NodeKind::Sequence, self.span_from(start), items))
    }

    fn arrow_ahead(&self) -> bool {
        // `x =>` or `(a, b) =>`
        if self.peek().kind == TokenKind::Ident && !is_reserved(self.text()) {
            return self.is_punct_at(1, "=>") && !self.peek_at(1).newline_before;
        }
        if !self.is_punct("(") {
            return false;
        }
        let mut depth = 0usize;
        let mut i = 0;
        loop {
            let t = self.peek_at(i);
            if t.kind == TokenKind::Eof {
                return false;
            }
            if t.kind == TokenKind::Punct {
                match self.text_at(i) {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth -= 1;
                        if depth == 0 {
                            return self.is_punct_at(i + 1, "=>");
                        }
                    }
                    _ => {}
                }
            }
            i += 1;
        }
    }

    fn arrow_function(&mut self, start: usize, is_async: bool) -> Result<AstNode, SyntaxError> {
        let mut children = if self.is_punct("(") { self.params()? } else { vec![self.identifier()?] };
        self.expect_punct("=>")?;
        if self.is_punct("{") {
            children.push(self.function_body()?);
        } else {
            let saved = self.in_function;
            self.in_function = true;
            let body = self.assignment(false);
            self.in_function = saved;
            children.push(body?);
        }
        Ok(AstNode::new(NodeKind::ArrowFunction { is_async }, self.span_from(start), children))
    }

    fn assignment(&mut self, no_in: bool) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        if self.is_word("async") && !self.peek_at(1).newline_before {
            let save = self.pos;
            self.bump();
            if self.arrow_ahead() {
                return self.arrow_function(start, true);
            }
            self.pos = save;
        }
        if self.arrow_ahead() {
            return self.arrow_function(start, false);
        }
        let target = self.conditional(no_in)?;
        if self.peek().kind == TokenKind::Punct && ASSIGN_OPS.contains(&self.text()) {
            if !matches!(target.kind, NodeKind::Identifier(_) | NodeKind::Member { .. }) {
                return Err(self.error(&["assignable target"]));
            }
            let op = self.bump().text(self.src).to_string();
            let value = self.assignment(no_in)?;
            return Ok(AstNode::new(NodeKind::Assign { op }, self.span_from(start), vec![target, value]));
        }
        Ok(target)
    }

    fn conditional(&mut self, no_in: bool) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let test = self.binary(0, no_in)?;
        if !self.eat_punct("?") {
            return Ok(test);
        }
        let cons = self.assignment(false)?;
        self.expect_punct(":")?;
        let alt = self.assignment(no_in)?;
        Ok(AstNode::new(NodeKind::Conditional, self.span_from(start), vec![test, cons, alt]))
    }

    fn binary_op(&self, no_in: bool) -> Option<(&'a str, u8)> {
        let t = self.peek();
        let op = self.text();
        let ok = match t.kind {
            TokenKind::Punct => true,
            TokenKind::Ident => op == "instanceof" || (op == "in" && !no_in),
            _ => false,
        };
        if !ok {
            return None;
        }
        binary_precedence(op).map(|p| (op, p))
    }

    fn binary(&mut self, min_prec: u8, no_in: bool) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let mut left = self.unary()?;
        while let Some((op, prec)) = self.binary_op(no_in) {
            if prec <= min_prec {
                break;
            }
            self.bump();
            // `**` is right-associative
            let next_min = if op == "**" { prec - 1 } else { prec };
            let right = self.binary(next_min, no_in)?;
            let kind = if matches!(op, "&&" | "||" | "??") {
                NodeKind::Logical { op: op.to_string() }
            } else {
                NodeKind::Binary { op: op.to_string() }
            };
            left = AstNode::new(kind, self.span_from(start), vec![left, right]);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let t = self.peek();
        let op = self.text();
        let is_unary = match t.kind {
            TokenKind::Punct => matches!(op, "!" | "~" | "+" | "-" | "++" | "--" | "..."),
            TokenKind::Ident => matches!(op, "typeof" | "void" | "delete" | "await"),
            _ => false,
        };
        if !is_unary {
            return self.postfix();
        }
        self.bump();
        let arg = self.unary()?;
        let kind = match op {
            "await" => NodeKind::Await,
            "..." => return Err(SyntaxError::at(self.src, start, &["expression"], "...")),
            "++" | "--" => NodeKind::Update { op: op.to_string(), prefix: true },
            _ => NodeKind::Unary { op: op.to_string() },
        };
        Ok(AstNode::new(kind, self.span_from(start), vec![arg]))
    }

    fn postfix(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let expr = self.call_member()?;
        if (self.is_punct("++") || self.is_punct("--")) && !self.peek().newline_before {
            let op = self.bump().text(self.src).to_string();
            return Ok(AstNode::new(NodeKind::Update { op, prefix: false }, self.span_from(start), vec![expr]));
        }
        Ok(expr)
    }

    fn arguments(&mut self) -> Result<Vec<AstNode>, SyntaxError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        while !self.is_punct(")") {
            args.push(self.spread_or_assignment()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn spread_or_assignment(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        if self.eat_punct("...") {
            let arg = self.assignment(false)?;
            return Ok(AstNode::new(NodeKind::Spread, self.span_from(start), vec![arg]));
        }
        self.assignment(false)
    }

    fn property_name(&mut self) -> Result<AstNode, SyntaxError> {
        if self.peek().kind != TokenKind::Ident {
            return Err(self.error(&["property name"]));
        }
        let name = self.text().to_string();
        let t = self.bump();
        Ok(AstNode::leaf(NodeKind::PropertyName(name), t.span))
    }

    fn call_member(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let mut expr = if self.is_word("new") { self.new_expression()? } else { self.primary()? };
        loop {
            if self.is_punct(".") || (self.is_punct("?.") && !self.is_punct_at(1, "(") && !self.is_punct_at(1, "[")) {
                self.bump();
                let prop = self.property_name()?;
                expr = AstNode::new(NodeKind::Member { computed: false }, self.span_from(start), vec![expr, prop]);
            } else if self.is_punct("?.") {
                self.bump();
                continue;
            } else if self.is_punct("[") {
                self.bump();
                let index = self.expression(false)?;
                self.expect_punct("]")?;
                expr = AstNode::new(NodeKind::Member { computed: true }, self.span_from(start), vec![expr, index]);
            } else if self.is_punct("(") {
                let mut children = vec![expr];
                children.extend(self.arguments()?);
                expr = AstNode::new(NodeKind::Call { is_new: false }, self.span_from(start), children);
            } else if matches!(self.peek().kind, TokenKind::Template { .. }) {
                // tagged template: treated as a call with the template as argument
                let tpl = self.primary()?;
                expr = AstNode::new(NodeKind::Call { is_new: false }, self.span_from(start), vec![expr, tpl]);
            } else {
                return Ok(expr);
            }
        }
    }

    fn new_expression(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.bump();
        let mut callee = if self.is_word("new") { self.new_expression()? } else { self.primary()? };
        loop {
            if self.eat_punct(".") {
                let prop = self.property_name()?;
                let s = callee.span.start;
                callee = AstNode::new(NodeKind::Member { computed: false }, self.span_from(s), vec![callee, prop]);
            } else if self.is_punct("[") {
                self.bump();
                let index = self.expression(false)?;
                self.expect_punct("]")?;
                let s = callee.span.start;
                callee = AstNode::new(NodeKind::Member { computed: true }, self.span_from(s), vec![callee, index]);
            } else {
                break;
            }
        }
        let mut children = vec![callee];
        if self.is_punct("(") {
            children.extend(self.arguments()?);
        }
        Ok(AstNode::new(NodeKind::Call { is_new: true }, self.span_from(start), children))
    }

    fn primary(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        let tok = self.peek().clone();
        let text = self.text();
        match &tok.kind {
            TokenKind::Number => {
                self.bump();
                Ok(AstNode::leaf(NodeKind::NumberLit(text.to_string()), tok.span))
            }
            TokenKind::Str => {
                self.bump();
                let inner = if text.len() >= 2 { &text[1..text.len() - 1] } else { "" };
                Ok(AstNode::leaf(NodeKind::StringLit(inner.to_string()), tok.span))
            }
            TokenKind::Regex => {
                self.bump();
                Ok(AstNode::leaf(NodeKind::RegexLit(text.to_string()), tok.span))
            }
            TokenKind::Template { parts } => {
                self.bump();
                let mut children = Vec::new();
                for part in parts {
                    let mut sub = Parser::with_range(self.src, *part)?;
                    sub.in_function = self.in_function;
                    let e = sub.expression(false)?;
                    if !sub.at_eof() {
                        return Err(sub.error(&["}"]));
                    }
                    children.push(e);
                }
                Ok(AstNode::new(NodeKind::TemplateLit, tok.span, children))
            }
            TokenKind::Punct => match text {
                "(" => {
                    self.bump();
                    let e = self.expression(false)?;
                    self.expect_punct(")")?;
                    Ok(e)
                }
                "{" => self.object_literal(),
                "[" => {
                    self.bump();
                    let mut items = Vec::new();
                    while !self.is_punct("]") {
                        if self.is_punct(",") {
                            self.bump(); // hole
                            continue;
                        }
                        items.push(self.spread_or_assignment()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                    self.expect_punct("]")?;
                    Ok(AstNode::new(NodeKind::ArrayLit, self.span_from(start), items))
                }
                _ => Err(self.error(&["expression"])),
            },
            TokenKind::Ident => match text {
                "function" => self.function_expression(start, false),
                "async" if self.is_word_at(1, "function") && !self.peek_at(1).newline_before => {
                    self.bump();
                    self.function_expression(start, true)
                }
                "this" | "true" | "false" | "null" | "super" => {
                    self.bump();
                    Ok(AstNode::leaf(NodeKind::Literal(text.to_string()), tok.span))
                }
                _ => self.identifier(),
            },
            TokenKind::Eof | TokenKind::Unknown => Err(self.error(&["expression"])),
        }
    }

    fn function_expression(&mut self, start: usize, is_async: bool) -> Result<AstNode, SyntaxError> {
        self.expect_word("function")?;
        if self.is_punct("*") {
            return Err(self.error(&["identifier", "("]));
        }
        let mut children = Vec::new();
        let mut name = None;
        if !self.is_punct("(") {
            let id = self.identifier()?;
            if let NodeKind::Identifier(n) = &id.kind {
                name = Some(n.clone());
            }
            children.push(id);
        }
        children.extend(self.params()?);
        children.push(self.function_body()?);
        Ok(AstNode::new(NodeKind::FunctionExpr { name, is_async }, self.span_from(start), children))
    }

    fn object_literal(&mut self) -> Result<AstNode, SyntaxError> {
        let start = self.start();
        self.expect_punct("{")?;
        let mut props = Vec::new();
        while !self.is_punct("}") {
            let pstart = self.start();
            if self.eat_punct("...") {
                let arg = self.assignment(false)?;
                props.push(AstNode::new(NodeKind::Spread, self.span_from(pstart), vec![arg]));
            } else {
                // accessor: `get x() {}` / `set x(v) {}`
                if (self.is_word("get") || self.is_word("set") || self.is_word("async"))
                    && !self.is_punct_at(1, ":")
                    && !self.is_punct_at(1, "(")
                    && !self.is_punct_at(1, ",")
                    && !self.is_punct_at(1, "}")
                {
                    self.bump();
                }
                let (key_node, key) = self.property_key()?;
                if self.eat_punct(":") {
                    let value = self.assignment(false)?;
                    props.push(AstNode::new(
                        NodeKind::Property { key, shorthand: false },
                        self.span_from(pstart),
                        vec![key_node, value],
                    ));
                } else if self.is_punct("(") {
                    let fstart = self.start();
                    let mut children = self.params()?;
                    children.push(self.function_body()?);
                    let func = AstNode::new(
                        NodeKind::FunctionExpr { name: None, is_async: false },
                        self.span_from(fstart),
                        children,
                    );
                    props.push(AstNode::new(
                        NodeKind::Property { key, shorthand: false },
                        self.span_from(pstart),
                        vec![key_node, func],
                    ));
                } else {
                    let NodeKind::PropertyName(name) = &key_node.kind else {
                        return Err(self.error(&[":"]));
                    };
                    if is_reserved(name) {
                        return Err(self.error(&[":"]));
                    }
                    let ident = AstNode::leaf(NodeKind::Identifier(name.clone()), key_node.span);
                    props.push(AstNode::new(
                        NodeKind::Property { key, shorthand: true },
                        self.span_from(pstart),
                        vec![ident],
                    ));
                }
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(AstNode::new(NodeKind::ObjectLit, self.span_from(start), props))
    }

    fn property_key(&mut self) -> Result<(AstNode, String), SyntaxError> {
        let tok = self.peek().clone();
        let text = self.text();
        match tok.kind {
            TokenKind::Ident => {
                self.bump();
                Ok((AstNode::leaf(NodeKind::PropertyName(text.to_string()), tok.span), text.to_string()))
            }
            TokenKind::Str => {
                self.bump();
                let inner = text[1..text.len() - 1].to_string();
                Ok((AstNode::leaf(NodeKind::StringLit(inner.clone()), tok.span), inner))
            }
            TokenKind::Number => {
                self.bump();
                Ok((AstNode::leaf(NodeKind::NumberLit(text.to_string()), tok.span), text.to_string()))
            }
            TokenKind::Punct if text == "[" => {
                self.bump();
                let e = self.assignment(false)?;
                self.expect_punct("]")?;
                Ok((e, "*".to_string()))
            }
            _ => Err(self.error(&["property name"])),
        }
    }
}

fn is_reserved(word: &str) -> bool {
    matches!(
        word,
        "break"
            | "case"
            | "catch"
            | "class"
            | "const"
            | "continue"
            | "debugger"
            | "default"
            | "delete"
            | "do"
            | "else"
            | "export"
            | "extends"
            | "finally"
            | "for"
            | "function"
            | "if"
            | "import"
            | "in"
            | "instanceof"
            | "new"
            | "return"
            | "super"
            | "switch"
            | "this"
            | "throw"
            | "try"
            | "typeof"
            | "var"
            | "void"
            | "while"
            | "with"
            | "true"
            | "false"
            | "null"
    )
}

pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

fn lex_error(src: &str, e: LexError) -> SyntaxError {
    let (line, column) = line_col(src, e.offset);
    SyntaxError { line, column, offset: e.offset, expected: vec![], found: e.message }
}

impl SyntaxError {
    fn at(src: &str, offset: usize, expected: &[&str], found: &str) -> Self {
        let (line, column) = line_col(src, offset);
        SyntaxError {
            line,
            column,
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.to_string(),
        }
    }
}
