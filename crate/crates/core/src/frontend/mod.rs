//! JavaScript front end: parsing, scope resolution and extraction of the
//! program elements that take part in information flow (call arguments and
//! results, parameters, property reads and writes).

mod ast;
pub mod lexer;
mod model;
mod parser;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{AstNode, DeclKind, NodeKind, Span};
pub use model::{Binding, BindingId, BindingKind, FileModel, FlatNode, NodeId};

use crate::ids::fnv1a64_fields;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub project_id: String,
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(project_id: impl Into<String>, path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile { project_id: project_id.into(), path: path.into(), text: text.into() }
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[span.start..span.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: expected {}, found {found:?}", expected_list(.expected))]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

fn expected_list(expected: &[String]) -> String {
    if expected.is_empty() {
        "valid token".to_string()
    } else {
        expected.join(" | ")
    }
}

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("{path}: {source}")]
    Syntax { path: String, source: SyntaxError },
    #[error("unknown program element {0}")]
    UnknownElement(ElementId),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Parses one file of the supported subset.
pub fn parse_source(file: &SourceFile) -> Result<AstNode, SyntaxError> {
    parser::Parser::new(&file.text)?.parse_program()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "index")]
pub enum ElementKind {
    CallArgument(usize),
    CallResult,
    Parameter(usize),
    PropertyRead,
    PropertyWrite,
}

impl ElementKind {
    pub fn tag(&self) -> String {
        match self {
            ElementKind::CallArgument(i) => format!("arg{i}"),
            ElementKind::CallResult => "result".into(),
            ElementKind::Parameter(i) => format!("param{i}"),
            ElementKind::PropertyRead => "read".into(),
            ElementKind::PropertyWrite => "write".into(),
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Hex-encoded FNV-1a hash of (project, path, span, kind).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub String);

impl ElementId {
    pub fn compute(project: &str, path: &str, span: Span, kind: ElementKind) -> Self {
        let start = span.start.to_string();
        let end = span.end.to_string();
        let tag = kind.tag();
        let h = fnv1a64_fields([project.as_bytes(), path.as_bytes(), start.as_bytes(), end.as_bytes(), tag.as_bytes()]);
        ElementId(format!("{h:016x}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramElement {
    pub id: ElementId,
    pub project: String,
    pub path: String,
    pub kind: ElementKind,
    pub span: Span,
    pub stmt_span: Span,
    pub func_span: Span,
    /// Arena node the element is anchored at.
    #[serde(skip)]
    pub node: NodeId,
}

/// Elements of a parsed file, in source order of their anchors.
pub fn extract_elements(file: &SourceFile, ast: &AstNode) -> Vec<ProgramElement> {
    FileModel::build(file.clone(), ast).elements
}

/// All parsed files of one project.
#[derive(Debug, Clone)]
pub struct ProjectModel {
    pub project_id: String,
    pub files: Vec<FileModel>,
    /// Files that failed to parse, with the error.
    pub skipped: Vec<(String, SyntaxError)>,
}

impl ProjectModel {
    /// Parses every file, skipping (and recording) the ones outside the subset.
    pub fn from_sources(project_id: impl Into<String>, sources: Vec<SourceFile>) -> Self {
        let project_id = project_id.into();
        let mut files = Vec::new();
        let mut skipped = Vec::new();
        for src in sources {
            match parse_source(&src) {
                Ok(ast) => files.push(FileModel::build(src, &ast)),
                Err(e) => {
                    log::warn!("skipping {}/{}: {e}", src.project_id, src.path);
                    skipped.push((src.path.clone(), e));
                }
            }
        }
        files.sort_by(|a, b| a.file.path.cmp(&b.file.path));
        ProjectModel { project_id, files, skipped }
    }

    pub fn elements(&self) -> impl Iterator<Item = (&FileModel, &ProgramElement)> {
        self.files.iter().flat_map(|f| f.elements.iter().map(move |e| (f, e)))
    }

    pub fn find(&self, id: &ElementId) -> Option<(&FileModel, &ProgramElement)> {
        self.files.iter().find_map(|f| f.element(id).map(|e| (f, e)))
    }

    /// Verbatim enclosing statement and function text of an element.
    pub fn enclosing_code(&self, id: &ElementId) -> Result<(String, String), FrontendError> {
        let (file, e) = self.find(id).ok_or_else(|| FrontendError::UnknownElement(id.clone()))?;
        Ok(file.enclosing_code(e))
    }
}

/// Reads a corpus laid out as `<root>/<project>/**.js`, projects sorted by name.
pub fn read_corpus(root: &Path) -> Result<Vec<(String, Vec<SourceFile>)>, FrontendError> {
    let io = |path: &Path, source| FrontendError::Io { path: path.display().to_string(), source };
    let mut projects = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(root)
        .map_err(|e| io(root, e))?
        .filter_map(Result::ok)
        .filter(|e| e.path().is_dir())
        .collect();
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let project = entry.file_name().to_string_lossy().into_owned();
        let mut files = Vec::new();
        collect_js(&entry.path(), &entry.path(), &project, &mut files).map_err(|e| io(&entry.path(), e))?;
        files.sort_by(|a, b| a.path.cmp(&b.path));
        projects.push((project, files));
    }
    Ok(projects)
}

fn collect_js(base: &Path, dir: &Path, project: &str, out: &mut Vec<SourceFile>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_js(base, &path, project, out)?;
        } else if path.extension().is_some_and(|e| e == "js") {
            let rel = path.strip_prefix(base).unwrap_or(&path).to_string_lossy().replace('\\', "/");
            match std::fs::read_to_string(&path) {
                Ok(text) => out.push(SourceFile::new(project, rel, text)),
                Err(e) => log::warn!("skipping unreadable {}: {e}", path.display()),
            }
        }
    }
    Ok(())
}
