//! On-disk embedding store: a `manifest.json` plus JSON Lines chunks of at
//! most [`CHUNK_SIZE`] records `{"key", "stmt_vec", "func_vec"}`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CodePair, Embedding};

pub const CHUNK_SIZE: usize = 1000;
const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dim: usize,
    pub records: usize,
    pub chunks: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    key: String,
    stmt_vec: Vec<f64>,
    func_vec: Vec<f64>,
}

/// Replaces the store at `dir` with `entries`.
pub fn write_store<'a>(
    dir: &Path,
    dim: usize,
    entries: impl IntoIterator<Item = (String, &'a CodePair)>,
    chunk_size: usize,
) -> std::io::Result<Manifest> {
    let chunk_size = chunk_size.clamp(1, CHUNK_SIZE);
    if dir.exists() {
        fs::remove_dir_all(dir)?;
    }
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest { dim, records: 0, chunks: Vec::new() };
    let mut out: Option<BufWriter<fs::File>> = None;
    for (key, pair) in entries {
        if manifest.records.is_multiple_of(chunk_size) {
            if let Some(mut w) = out.take() {
                w.flush()?;
            }
            let name = format!("chunk-{:05}.jsonl", manifest.chunks.len());
            out = Some(BufWriter::new(fs::File::create(dir.join(&name))?));
            manifest.chunks.push(name);
        }
        let rec = Record { key, stmt_vec: pair.stmt.0.clone(), func_vec: pair.func.0.clone() };
        let w = out.as_mut().expect("chunk open");
        serde_json::to_writer(&mut *w, &rec)?;
        w.write_all(b"\n")?;
        manifest.records += 1;
    }
    if let Some(mut w) = out {
        w.flush()?;
    }
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn read_store(dir: &Path) -> std::io::Result<(Manifest, Vec<(String, CodePair)>)> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?;
    let mut out = Vec::with_capacity(manifest.records);
    for chunk in &manifest.chunks {
        for line in fs::read_to_string(dir.join(chunk))?.lines() {
            if line.is_empty() {
                continue;
            }
            let r: Record = serde_json::from_str(line)?;
            out.push((r.key, CodePair { stmt: Embedding(r.stmt_vec), func: Embedding(r.func_vec) }));
        }
    }
    Ok((manifest, out))
}
