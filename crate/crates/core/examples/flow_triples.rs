//! Builds the propagation graph of the bundled handler fixture and prints its
//! flow triples.

use std::path::Path;

use taintmine::frontend::{read_corpus, ElementId, ProjectModel};
use taintmine::propagation::{build_graph, mine_triples, DEFAULT_TRIPLE_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/motivating");
    for (project, files) in read_corpus(&root)? {
        let model = ProjectModel::from_sources(project, files);
        let graph = build_graph(&model);
        println!("{} elements, {} edges", graph.len(), graph.edge_count());
        let text = |id: &ElementId| {
            let (f, e) = model.find(id).expect("element exists");
            format!("{}:{}", f.file.path, f.file.slice(e.span))
        };
        for t in mine_triples(&graph, DEFAULT_TRIPLE_CAP)? {
            println!("{}  ->  {}  ->  {}", text(&t.src), text(&t.san), text(&t.snk));
        }
    }
    Ok(())
}
