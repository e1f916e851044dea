//! Embeds code snippets, rescores predictions against known sinks and lists
//! the neighbours a ban-similar click would remove.

use std::path::Path;

use taintmine::pipeline::io::read_jsonl;
use taintmine::predictor::PredictedSink;
use taintmine::similarity::{get_similar, precompute_known, refine, KnownSinkCode, TokenHashEmbedder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ban_similar/predictions.jsonl");
    let preds: Vec<PredictedSink> = read_jsonl(&path)?;
    let embedder = TokenHashEmbedder::default();
    let known = precompute_known(
        &embedder,
        &[KnownSinkCode {
            rep: "find(0)".into(),
            stmt: "db.find({ name: q });".into(),
            func: "function lookup(req, res) {\n  var q = req.query.name;\n  db.find({ name: q });\n}".into(),
        }],
    );
    let (refined, ep) = refine(&embedder, &preds, &known);
    for p in refined.iter().take(6) {
        println!("{:.4}  {:<8} {}", p.score, p.rep.as_str(), p.stmt);
    }
    let clicked = &refined[0];
    for alpha in [0.80, 0.90, 0.95, 1.0] {
        let n = get_similar(&clicked.id, &refined, &ep, alpha)?.len();
        println!("alpha {alpha:.2}: {n} similar to `{}`", clicked.stmt);
    }
    Ok(())
}
