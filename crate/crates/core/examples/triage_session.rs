//! Drives a persisted triage session, then reloads it from its audit log.

use std::path::Path;

use taintmine::pipeline::io::read_jsonl;
use taintmine::predictor::PredictedSink;
use taintmine::similarity::{CodePair, PredictionEmbeddings, TokenHashEmbedder};
use taintmine::triage::{TriageSession, ViewFilter};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ban_similar/predictions.jsonl");
    let preds: Vec<PredictedSink> = read_jsonl(&path)?;
    let e = TokenHashEmbedder::default();
    let ep: PredictionEmbeddings = preds.iter().map(|p| (p.id.clone(), CodePair::of(&e, &p.stmt, &p.func))).collect();
    let dir = tempfile::tempdir()?;

    let mut s = TriageSession::open(preds.clone(), ep.clone(), dir.path())?;
    let log_fp = preds.iter().find(|p| p.rep.as_str() == "log(0)").expect("fixture has log sinks");
    let dismissed = s.ban_similar(&log_fp.id, 0.9)?;
    println!("ban-similar dismissed {}", dismissed.len());
    s.toggle_representation(&"exec(0)".into(), true)?;
    s.accept(&s.view(&ViewFilter::default())[0].id.clone())?;
    println!("{:?}", s.stats());
    for r in s.representations() {
        println!("  {:<8} {:>2} {}", r.rep.as_str(), r.count, if r.hidden { "hidden" } else { "" });
    }

    let reopened = TriageSession::open(preds, ep, dir.path())?;
    println!("reloaded state matches: {}", reopened.state() == s.state());
    Ok(())
}
