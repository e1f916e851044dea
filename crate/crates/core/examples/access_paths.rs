//! Shows every access path of each call argument and the one picked as
//! canonical.

use taintmine::frontend::{ElementKind, ProjectModel, SourceFile};
use taintmine::representations::{canonicalize, compute_access_paths};

const CODE: &str = r#"
function getquerySendResponse(sliders) {
  sliders.findByIdAndUpdate({ id: 1 });
}
const cp = require('child_process');
cp.exec(cmd);
app.post('/login', function (req, res) { res.send(req.body); });
"#;

fn main() {
    let model = ProjectModel::from_sources("demo", vec![SourceFile::new("demo", "app.js", CODE)]);
    for (file, e) in model.elements() {
        if !matches!(e.kind, ElementKind::CallArgument(_) | ElementKind::Parameter(_)) {
            continue;
        }
        let paths = compute_access_paths(file, e);
        let canon = canonicalize(&paths).expect("never empty");
        println!("{}", file.file.slice(e.span).replace('\n', " "));
        for p in &paths {
            let mark = if p.to_string() == canon.as_str() { "*" } else { " " };
            println!("  {mark} {:<48} score {}", p.to_string(), p.features().score());
        }
    }
}
