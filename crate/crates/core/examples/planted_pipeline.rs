//! Runs the whole pipeline on the bundled six-project corpus and compares the
//! ranking before and after similarity refinement.

use std::path::Path;

use taintmine::pipeline::{run_in_memory, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/planted");
    let cfg = PipelineConfig {
        corpus: Some(data.join("train")),
        test_corpus: Some(data.join("test")),
        seeds: Some(data.join("seeds.jsonl")),
        ek_seeds: Some(data.join("pool_seeds.jsonl")),
        ..Default::default()
    };
    let a = run_in_memory(&cfg)?;
    let triples: usize = a.mined.projects.iter().map(|p| p.triples.len()).sum();
    println!("{} projects, {triples} triples, {} known sinks", a.mined.projects.len(), a.known.len());
    println!("\ninferred sink specs");
    for s in &a.specs {
        println!("  {:<16} {:.4}", s.rep.as_str(), s.score);
    }
    println!("\nbefore refinement");
    for p in &a.predictions {
        println!("  {:.4}  {:<14} {}", p.score, p.rep.as_str(), p.stmt);
    }
    println!("\nafter refinement");
    for p in &a.refined {
        println!("  {:.4}  {:<14} {}", p.score, p.rep.as_str(), p.stmt);
    }
    Ok(())
}
