//! Sweeps the ban-similar threshold over the labeled fixture and prints the
//! reviewer effort at each setting.

use std::path::Path;

use taintmine::pipeline::io::read_jsonl;
use taintmine::pipeline::{load_labels, simulate_triage};
use taintmine::predictor::PredictedSink;
use taintmine::similarity::{CodePair, TokenHashEmbedder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/triage");
    let refined: Vec<PredictedSink> = read_jsonl(&data.join("refined.jsonl"))?;
    let labels = load_labels(&data.join("labels.jsonl"))?;
    let embedder = TokenHashEmbedder::default();
    let ep = refined.iter().map(|p| (p.id.clone(), CodePair::of(&embedder, &p.stmt, &p.func))).collect();

    println!("alpha  steps  swept  false_negatives");
    for step in 0..=15 {
        let alpha = 0.95 - 0.01 * step as f64;
        let r = simulate_triage(&refined, &labels, &ep, 0.5, 0.2, alpha)?;
        println!("{alpha:.2}   {:>5}  {:>5}  {:>15}", r.steps_to_triage, r.swept, r.false_negatives);
    }
    Ok(())
}
