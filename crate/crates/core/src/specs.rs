//! Taint specifications shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::representations::Representation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Src,
    San,
    Snk,
}

impl SpecKind {
    pub const ALL: [SpecKind; 3] = [SpecKind::Src, SpecKind::San, SpecKind::Snk];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecKind::Src => "src",
            SpecKind::San => "san",
            SpecKind::Snk => "snk",
        }
    }
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpecKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "src" => Ok(SpecKind::Src),
            "san" => Ok(SpecKind::San),
            "snk" => Ok(SpecKind::Snk),
            other => Err(format!("unknown spec kind {other:?}")),
        }
    }
}

fn one() -> f64 {
    1.0
}

/// `(rep, kind, score)`; seed specifications carry score 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaintSpec {
    pub rep: Representation,
    pub kind: SpecKind,
    #[serde(default = "one")]
    pub score: f64,
}

impl TaintSpec {
    pub fn new(rep: impl Into<Representation>, kind: SpecKind, score: f64) -> Self {
        TaintSpec { rep: rep.into(), kind, score }
    }

    pub fn seed(rep: impl Into<Representation>, kind: SpecKind) -> Self {
        Self::new(rep, kind, 1.0)
    }
}

/// Specs parsed from JSON Lines. Representations are normalized on read.
pub fn parse_specs(text: &str) -> Result<Vec<TaintSpec>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut spec: TaintSpec = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", n + 1))?;
        spec.rep = Representation::parse(spec.rep.as_str()).map_err(|e| format!("line {}: {e}", n + 1))?;
        if !(0.0..=1.0).contains(&spec.score) {
            return Err(format!("line {}: score {} outside [0,1]", n + 1, spec.score));
        }
        out.push(spec);
    }
    Ok(out)
}

/// One JSON line per spec, score printed with six decimals.
pub fn render_spec_line(spec: &TaintSpec) -> String {
    format!(
        "{{\"rep\":{},\"kind\":\"{}\",\"score\":{:.6}}}",
        serde_json::to_string(spec.rep.as_str()).expect("string serializes"),
        spec.kind,
        spec.score
    )
}
