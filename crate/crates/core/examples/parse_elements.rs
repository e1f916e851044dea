//! Parses a snippet and lists its program elements.

use taintmine::frontend::{ProjectModel, SourceFile};

const CODE: &str = r#"
const express = require('express');
function handler(req, res) {
  const name = req.query.name;
  db.find({ name: name }, (err, rows) => res.json(rows));
}
"#;

fn main() {
    let model = ProjectModel::from_sources("demo", vec![SourceFile::new("demo", "app.js", CODE)]);
    for (file, e) in model.elements() {
        println!("{}  {:<14} {}", e.id, e.kind.tag(), file.file.slice(e.span).replace('\n', " "));
    }
}
