//! Serves the triage API over the bundled predictions.
//!
//! ```text
//! cargo run --example serve_triage -- 127.0.0.1:8080
//! curl localhost:8080/api/representations
//! ```

use std::path::Path;
use std::sync::{Arc, Mutex};

use taintmine::pipeline::io::read_jsonl;
use taintmine::predictor::PredictedSink;
use taintmine::similarity::{CodePair, PredictionEmbeddings, TokenHashEmbedder};
use taintmine::triage::{service, TriageSession};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let addr = std::env::args().nth(1).unwrap_or_else(|| "127.0.0.1:8080".into()).parse()?;
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ban_similar/predictions.jsonl");
    let preds: Vec<PredictedSink> = read_jsonl(&path)?;
    let e = TokenHashEmbedder::default();
    let ep: PredictionEmbeddings = preds.iter().map(|p| (p.id.clone(), CodePair::of(&e, &p.stmt, &p.func))).collect();
    let session = Arc::new(Mutex::new(TriageSession::new(preds, ep)));
    println!("serving on http://{addr}, Ctrl-C to stop");
    service::serve(session, addr).await?;
    Ok(())
}
