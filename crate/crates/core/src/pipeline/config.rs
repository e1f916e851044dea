use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::inference::{DEFAULT_C, DEFAULT_LAMBDA};
use crate::propagation::DEFAULT_TRIPLE_CAP;
use crate::similarity::{EmbeddingProvider, FileEmbedder, TokenHashEmbedder};
use crate::triage::DEFAULT_ALPHA;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingChoice {
    TokenHash,
    File(PathBuf),
}

impl FromStr for EmbeddingChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "token-hash" => Ok(EmbeddingChoice::TokenHash),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(EmbeddingChoice::File(p.into())),
                _ => Err(format!("expected token-hash or file:<path>, got {s}")),
            },
        }
    }
}

impl std::fmt::Display for EmbeddingChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingChoice::TokenHash => f.write_str("token-hash"),
            EmbeddingChoice::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl EmbeddingChoice {
    pub fn provider(&self) -> Result<Box<dyn EmbeddingProvider>, ConfigError> {
        match self {
            EmbeddingChoice::TokenHash => Ok(Box::new(TokenHashEmbedder::default())),
            EmbeddingChoice::File(p) => Ok(Box::new(FileEmbedder::load(p).map_err(ConfigError::Invalid)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub test_corpus: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub seeds_old: Option<PathBuf>,
    pub seeds_new: Option<PathBuf>,
    /// Extra specs whose sink occurrences only feed the known-sink embeddings.
    pub ek_seeds: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub c: f64,
    pub lambda: f64,
    pub min_score: f64,
    pub alpha: f64,
    pub score_cutoff: f64,
    pub coarseness_cutoff: f64,
    pub embeddings: EmbeddingChoice,
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub triple_cap: usize,
    pub rounds: usize,
    pub split: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            test_corpus: None,
            seeds: None,
            seeds_old: None,
            seeds_new: None,
            ek_seeds: None,
            labels: None,
            c: DEFAULT_C,
            lambda: DEFAULT_LAMBDA,
            min_score: 0.0,
            alpha: DEFAULT_ALPHA,
            score_cutoff: 0.5,
            coarseness_cutoff: 0.2,
            embeddings: EmbeddingChoice::TokenHash,
            out: PathBuf::from("out"),
            jobs: 0,
            triple_cap: DEFAULT_TRIPLE_CAP,
            rounds: 1,
            split: 0.5,
            seed: 0,
        }
    }
}

#[cfg(test)]
const KEYS: &[&str] = &[
    "corpus",
    "test_corpus",
    "seeds",
    "seeds_old",
    "seeds_new",
    "ek_seeds",
    "labels",
    "c",
    "lambda",
    "min_score",
    "alpha",
    "score_cutoff",
    "coarseness_cutoff",
    "embeddings",
    "out",
    "jobs",
    "triple_cap",
    "rounds",
    "split",
    "seed",
];

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: value.into() })
}

fn path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl PipelineConfig {
    /// Reads `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = PipelineConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: n + 1 })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "corpus" => self.corpus = path(value),
            "test_corpus" => self.test_corpus = path(value),
            "seeds" => self.seeds = path(value),
            "seeds_old" => self.seeds_old = path(value),
            "seeds_new" => self.seeds_new = path(value),
            "ek_seeds" => self.ek_seeds = path(value),
            "labels" => self.labels = path(value),
            "c" => self.c = num(&key, value)?,
            "lambda" => self.lambda = num(&key, value)?,
            "min_score" => self.min_score = num(&key, value)?,
            "alpha" => self.alpha = num(&key, value)?,
            "score_cutoff" => self.score_cutoff = num(&key, value)?,
            "coarseness_cutoff" => self.coarseness_cutoff = num(&key, value)?,
            "embeddings" => {
                self.embeddings =
                    value.parse().map_err(|_| ConfigError::BadValue { key: key.clone(), value: value.into() })?
            }
            "out" => self.out = PathBuf::from(value),
            "jobs" => self.jobs = num(&key, value)?,
            "triple_cap" => self.triple_cap = num(&key, value)?,
            "rounds" => self.rounds = num(&key, value)?,
            "split" => self.split = num(&key, value)?,
            "seed" => self.seed = num(&key, value)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(ConfigError::Invalid(format!("c must lie in (0, 1), got {}", self.c)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ConfigError::Invalid(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        unit("min_score", self.min_score)?;
        unit("alpha", self.alpha)?;
        unit("score_cutoff", self.score_cutoff)?;
        unit("coarseness_cutoff", self.coarseness_cutoff)?;
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(ConfigError::Invalid(format!("split must lie in (0, 1), got {}", self.split)));
        }
        if self.triple_cap == 0 {
            return Err(ConfigError::Invalid("triple_cap must be positive".into()));
        }
        Ok(())
    }

    /// Every key with its current value, in `parse`-able form.
    pub fn render(&self) -> String {
        let p = |v: &Option<PathBuf>| v.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let rows: Vec<(&str, String)> = vec![
            ("corpus", p(&self.corpus)),
            ("test_corpus", p(&self.test_corpus)),
            ("seeds", p(&self.seeds)),
            ("seeds_old", p(&self.seeds_old)),
            ("seeds_new", p(&self.seeds_new)),
            ("ek_seeds", p(&self.ek_seeds)),
            ("labels", p(&self.labels)),
            ("c", self.c.to_string()),
            ("lambda", self.lambda.to_string()),
            ("min_score", self.min_score.to_string()),
            ("alpha", self.alpha.to_string()),
            ("score_cutoff", self.score_cutoff.to_string()),
            ("coarseness_cutoff", self.coarseness_cutoff.to_string()),
            ("embeddings", self.embeddings.to_string()),
            ("out", self.out.display().to_string()),
            ("jobs", self.jobs.to_string()),
            ("triple_cap", self.triple_cap.to_string()),
            ("rounds", self.rounds.to_string()),
            ("split", self.split.to_string()),
            ("seed", self.seed.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
