//! Trains on old seed specs and scores the boosted sinks against newer ones,
//! first on the fixed test split, then on random project splits.

use std::path::Path;

use taintmine::pipeline::{evaluate, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/planted");
    let mut cfg = PipelineConfig {
        corpus: Some(data.join("train")),
        test_corpus: Some(data.join("test")),
        seeds_old: Some(data.join("seeds.jsonl")),
        seeds_new: Some(data.join("seeds_new.jsonl")),
        ..Default::default()
    };
    let fixed = evaluate(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&fixed.rounds[0].report)?);

    cfg.test_corpus = None;
    cfg.rounds = 3;
    let s = evaluate(&cfg)?;
    for r in &s.rounds {
        println!("round {}: test {:?} precision {} recall {}", r.round, r.test, r.report.precision, r.report.recall);
    }
    println!("mean precision {} recall {}", s.mean_precision, s.mean_recall);
    Ok(())
}
