//! Tokenizer for the supported JavaScript subset.
//!
//! Regex literals are disambiguated from division with the usual
//! previous-token heuristic. Template literals are returned as a single
//! token carrying the byte ranges of their `${...}` substitutions; the
//! parser re-enters those ranges.

use super::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Template { parts: Vec<Span> },
    Regex,
    Punct,
    Unknown,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    /// A line terminator appeared between the previous token and this one.
    pub newline_before: bool,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.span.start..self.span.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=", "<=", ">=", "&&",
    "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**", "{", "}", "(", ")",
    "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%", "&", "|", "^", "!", "~", "?", ":", "=", ".", "@", "#",
];

/// Keywords after which a `/` starts a regular expression.
const REGEX_PRECEDERS: &[&str] = &[
    "return",
    "typeof",
    "instanceof",
    "in",
    "of",
    "new",
    "delete",
    "void",
    "throw",
    "case",
    "do",
    "else",
    "await",
    "yield",
];

fn is_ident_start(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphanumeric()
}

pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    end: usize,
    lenient: bool,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Self::with_range(src, 0, src.len())
    }

    pub fn with_range(src: &'a str, start: usize, end: usize) -> Self {
        Lexer { src, pos: start, end, lenient: false }
    }

    /// Never fails: unterminated literals run to the end of input and
    /// stray characters become `Unknown` tokens. Used for embedding code
    /// fragments that need not parse.
    pub fn lenient(src: &'a str) -> Self {
        Lexer { src, pos: 0, end: src.len(), lenient: true }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..self.end].chars().next()
    }

    fn char_at(&self, pos: usize) -> Option<char> {
        if pos >= self.end {
            None
        } else {
            self.src[pos..self.end].chars().next()
        }
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> LexError {
        LexError { offset, message: message.into() }
    }

    /// Skips whitespace and comments, reporting whether a newline was crossed.
    fn skip_trivia(&mut self) -> Result<bool, LexError> {
        let mut newline = false;
        while let Some(c) = self.peek_char() {
            if c == '\n' || c == '\r' || c == '\u{2028}' || c == '\u{2029}' {
                newline = true;
                self.pos += c.len_utf8();
            } else if c.is_whitespace() || c == '\u{feff}' {
                self.pos += c.len_utf8();
            } else if self.src[self.pos..self.end].starts_with("//")
                || (self.pos == 0 && self.src[..self.end].starts_with("#!"))
            {
                while let Some(c) = self.peek_char() {
                    if c == '\n' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
            } else if self.src[self.pos..self.end].starts_with("/*") {
                let start = self.pos;
                match self.src[self.pos + 2..self.end].find("*/") {
                    Some(off) => {
                        let body = &self.src[self.pos..self.pos + 2 + off];
                        if body.contains('\n') {
                            newline = true;
                        }
                        self.pos += 2 + off + 2;
                    }
                    None if self.lenient => self.pos = self.end,
                    None => return Err(self.err(start, "unterminated comment")),
                }
            } else {
                break;
            }
        }
        Ok(newline)
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, LexError> {
        let mut out: Vec<Token> = Vec::new();
        loop {
            let newline_before = self.skip_trivia()?;
            let start = self.pos;
            let Some(c) = self.peek_char() else {
                out.push(Token { kind: TokenKind::Eof, span: Span::new(self.end, self.end), newline_before: true });
                return Ok(out);
            };
            let kind = if is_ident_start(c) || c == '\\' {
                self.lex_ident();
                TokenKind::Ident
            } else if c.is_ascii_digit() || (c == '.' && self.char_at(self.pos + 1).is_some_and(|d| d.is_ascii_digit()))
            {
                self.lex_number();
                TokenKind::Number
            } else if c == '"' || c == '\'' {
                self.lex_string(c)?;
                TokenKind::Str
            } else if c == '`' {
                let parts = self.lex_template()?;
                TokenKind::Template { parts }
            } else if c == '/' && regex_allowed(out.last(), self.src) {
                self.lex_regex()?;
                TokenKind::Regex
            } else if let Some(p) = PUNCTUATORS.iter().find(|p| self.src[self.pos..self.end].starts_with(**p)) {
                // `?.` followed by a digit is a conditional and a number
                if *p == "?." && self.char_at(self.pos + 2).is_some_and(|d| d.is_ascii_digit()) {
                    self.pos += 1;
                } else {
                    self.pos += p.len();
                }
                TokenKind::Punct
            } else if self.lenient {
                self.pos += c.len_utf8();
                TokenKind::Unknown
            } else {
                return Err(self.err(start, format!("unexpected character {c:?}")));
            };
            out.push(Token { kind, span: Span::new(start, self.pos), newline_before });
        }
    }

    fn lex_ident(&mut self) {
        while let Some(c) = self.peek_char() {
            if is_ident_part(c) {
                self.pos += c.len_utf8();
            } else if c == '\\' {
                // \uXXXX escapes in identifiers
                self.pos += 1;
                while let Some(c) = self.peek_char() {
                    if c.is_ascii_alphanumeric() || c == '{' || c == '}' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn lex_number(&mut self) {
        let rest = &self.src[self.pos..self.end];
        if rest.len() > 1
            && rest.starts_with('0')
            && matches!(rest.as_bytes()[1], b'x' | b'X' | b'o' | b'O' | b'b' | b'B')
        {
            self.pos += 2;
            while let Some(c) = self.peek_char() {
                if c.is_ascii_hexdigit() || c == '_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            return;
        }
        let mut seen_exp = false;
        while let Some(c) = self.peek_char() {
            if c.is_ascii_digit() || c == '.' || c == '_' {
                self.pos += 1;
            } else if (c == 'e' || c == 'E') && !seen_exp {
                seen_exp = true;
                self.pos += 1;
                if matches!(self.peek_char(), Some('+') | Some('-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        if self.peek_char() == Some('n') {
            self.pos += 1;
        }
    }

    fn lex_string(&mut self, quote: char) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 1;
        while let Some(c) = self.peek_char() {
            self.pos += c.len_utf8();
            if c == '\\' {
                if let Some(n) = self.peek_char() {
                    self.pos += n.len_utf8();
                }
            } else if c == quote {
                return Ok(());
            } else if c == '\n' && !self.lenient {
                return Err(self.err(start, "unterminated string literal"));
            }
        }
        if self.lenient {
            Ok(())
        } else {
            Err(self.err(start, "unterminated string literal"))
        }
    }

    /// Scans a template literal, returning the spans of `${...}` bodies.
    fn lex_template(&mut self) -> Result<Vec<Span>, LexError> {
        let start = self.pos;
        self.pos += 1;
        let mut parts = Vec::new();
        while let Some(c) = self.peek_char() {
            match c {
                '\\' => {
                    self.pos += 1;
                    if let Some(n) = self.peek_char() {
                        self.pos += n.len_utf8();
                    }
                }
                '`' => {
                    self.pos += 1;
                    return Ok(parts);
                }
                '$' if self.src[self.pos..self.end].starts_with("${") => {
                    self.pos += 2;
                    let body_start = self.pos;
                    self.skip_balanced_braces(start)?;
                    parts.push(Span::new(body_start, self.pos));
                    self.pos += 1; // closing brace
                }
                _ => self.pos += c.len_utf8(),
            }
        }
        if self.lenient {
            Ok(parts)
        } else {
            Err(self.err(start, "unterminated template literal"))
        }
    }

    /// Advances to the `}` that closes a substitution, stepping over nested
    /// strings, templates and braces.
    fn skip_balanced_braces(&mut self, template_start: usize) -> Result<(), LexError> {
        let mut depth = 0usize;
        while let Some(c) = self.peek_char() {
            match c {
                '{' => {
                    depth += 1;
                    self.pos += 1;
                }
                '}' => {
                    if depth == 0 {
                        return Ok(());
                    }
                    depth -= 1;
                    self.pos += 1;
                }
                '"' | '\'' => self.lex_string(c)?,
                '`' => {
                    self.lex_template()?;
                }
                _ => self.pos += c.len_utf8(),
            }
        }
        if self.lenient {
            Ok(())
        } else {
            Err(self.err(template_start, "unterminated template substitution"))
        }
    }

    fn lex_regex(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 1;
        let mut in_class = false;
        loop {
            let Some(c) = self.peek_char() else {
                if self.lenient {
                    return Ok(());
                }
                return Err(self.err(start, "unterminated regular expression"));
            };
            self.pos += c.len_utf8();
            match c {
                '\\' => {
                    if let Some(n) = self.peek_char() {
                        self.pos += n.len_utf8();
                    }
                }
                '[' => in_class = true,
                ']' => in_class = false,
                '/' if !in_class => break,
                '\n' if !self.lenient => return Err(self.err(start, "unterminated regular expression")),
                _ => {}
            }
        }
        while let Some(c) = self.peek_char() {
            if is_ident_part(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        Ok(())
    }
}

fn regex_allowed(prev: Option<&Token>, src: &str) -> bool {
    let Some(prev) = prev else { return true };
    match &prev.kind {
        TokenKind::Ident => REGEX_PRECEDERS.contains(&prev.text(src)),
        TokenKind::Number | TokenKind::Str | TokenKind::Template { .. } | TokenKind::Regex => false,
        TokenKind::Punct => !matches!(prev.text(src), ")" | "]" | "}" | "++" | "--"),
        TokenKind::Unknown | TokenKind::Eof => true,
    }
}

/// Token texts of `code` with whitespace and comments discarded.
pub fn token_texts(code: &str) -> Vec<&str> {
    match Lexer::lenient(code).tokenize() {
        Ok(tokens) => tokens.iter().filter(|t| t.kind != TokenKind::Eof).map(|t| t.text(code)).collect(),
        Err(_) => code.split_whitespace().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        Lexer::new(src)
            .tokenize()
            .unwrap()
            .iter()
            .filter(|t| t.kind != TokenKind::Eof)
            .map(|t| t.text(src).to_string())
            .collect()
    }

    #[test]
    fn regex_versus_division() {
        assert_eq!(texts("a / b / c"), ["a", "/", "b", "/", "c"]);
        assert_eq!(texts("x.replace(/\\s+/g, '-')"), ["x", ".", "replace", "(", "/\\s+/g", ",", "'-'", ")"]);
        assert_eq!(texts("return /[/]x/.test(s)")[1], "/[/]x/");
    }

    #[test]
    fn template_parts() {
        let src = "`a ${b + `c${d}`} e`";
        let toks = Lexer::new(src).tokenize().unwrap();
        match &toks[0].kind {
            TokenKind::Template { parts } => {
                assert_eq!(parts.len(), 1);
                assert_eq!(&src[parts[0].start..parts[0].end], "b + `c${d}`");
            }
            k => panic!("unexpected {k:?}"),
        }
    }

    #[test]
    fn newline_tracking_and_comments() {
        let toks = Lexer::new("a // c\n/* x\n */ b").tokenize().unwrap();
        assert!(!toks[0].newline_before || toks[0].span.start == 0);
        assert!(toks[1].newline_before);
    }

    #[test]
    fn whitespace_is_not_a_token() {
        assert_eq!(token_texts("g(a)"), token_texts("  g (\n\ta )  "));
    }

    #[test]
    fn unterminated_string_is_an_error() {
        assert!(Lexer::new("'abc").tokenize().is_err());
        assert_eq!(token_texts("'abc"), ["'abc"]);
    }
}
