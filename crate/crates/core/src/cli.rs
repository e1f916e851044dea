//! Command-line front end. Every subcommand accepts the pipeline flags;
//! flags override values read from `--config`.

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand};

use crate::pipeline::{self, ConfigError, PipelineConfig, PipelineError};
use crate::triage::{service, TriageSession};

#[derive(Parser, Debug)]
#[command(name = "taintmine", version, about = "Mine taint sink specifications from JavaScript corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse the training corpus and mine flow triples.
    Mine,
    /// Solve the per-project systems and write averaged sink specs.
    Infer,
    /// Instantiate sink specs on the test corpus.
    Predict,
    /// Rescore predictions by similarity to known sinks.
    Refine,
    /// mine, infer, predict and refine in sequence.
    Run,
    /// Serve the triage API over the refined predictions.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Audit log directory; defaults to `<out>/triage`.
        #[arg(long)]
        triage_dir: Option<PathBuf>,
    },
    /// Compare specs trained on old seeds against newer seeds.
    Eval,
    /// Simulate a reviewer over labeled refined predictions.
    TriageSim,
    /// Configuration helpers.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConfigAction {
    /// Print the effective configuration.
    Show,
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// key=value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub corpus: Option<String>,
    #[arg(long, global = true)]
    pub test_corpus: Option<String>,
    #[arg(long, global = true)]
    pub seeds: Option<String>,
    #[arg(long, global = true)]
    pub seeds_old: Option<String>,
    #[arg(long, global = true)]
    pub seeds_new: Option<String>,
    /// Specs whose sinks only feed the known-sink embeddings.
    #[arg(long, global = true)]
    pub ek_seeds: Option<String>,
    /// JSON Lines `{"id","label":"tp"|"fp"}` for triage-sim.
    #[arg(long, global = true)]
    pub labels: Option<String>,
    #[arg(long, global = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub min_score: Option<String>,
    #[arg(long, global = true)]
    pub score_cutoff: Option<String>,
    #[arg(long, global = true)]
    pub coarseness_cutoff: Option<String>,
    /// token-hash or file:<path>
    #[arg(long, global = true)]
    pub embeddings: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true)]
    pub jobs: Option<String>,
    #[arg(long, global = true)]
    pub triple_cap: Option<String>,
    #[arg(long, global = true)]
    pub rounds: Option<String>,
    #[arg(long, global = true)]
    pub split: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
}

impl Flags {
    pub fn config(&self) -> Result<PipelineConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        let overrides = [
            ("corpus", &self.corpus),
            ("test_corpus", &self.test_corpus),
            ("seeds", &self.seeds),
            ("seeds_old", &self.seeds_old),
            ("seeds_new", &self.seeds_new),
            ("ek_seeds", &self.ek_seeds),
            ("labels", &self.labels),
            ("c", &self.c),
            ("lambda", &self.lambda),
            ("alpha", &self.alpha),
            ("min_score", &self.min_score),
            ("score_cutoff", &self.score_cutoff),
            ("coarseness_cutoff", &self.coarseness_cutoff),
            ("embeddings", &self.embeddings),
            ("out", &self.out),
            ("jobs", &self.jobs),
            ("triple_cap", &self.triple_cap),
            ("rounds", &self.rounds),
            ("split", &self.split),
            ("seed", &self.seed),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn execute(cli: Cli) -> Result<(), PipelineError> {
    let cfg = cli.flags.config()?;
    match cli.command {
        Command::Mine => {
            let m = pipeline::stage_mine(&cfg)?;
            let triples: usize = m.projects.iter().map(|p| p.triples.len()).sum();
            println!("{} projects, {triples} triples, {} skipped", m.projects.len(), m.skipped.len());
        }
        Command::Infer => {
            let specs = pipeline::stage_infer(&cfg)?;
            println!("{} sink specs", specs.len());
        }
        Command::Predict => {
            let p = pipeline::stage_predict(&cfg)?;
            println!("{} predictions", p.len());
        }
        Command::Refine => {
            let r = pipeline::stage_refine(&cfg)?;
            println!("{} refined predictions", r.len());
        }
        Command::Run => {
            let r = pipeline::run_pipeline(&cfg)?;
            println!("{} refined predictions in {}", r.len(), cfg.out.display());
        }
        Command::Serve { addr, triage_dir } => {
            let provider = cfg.embeddings.provider()?;
            let (refined, ep) = pipeline::load_refined(&cfg.out, provider.as_ref())?;
            let dir = triage_dir.unwrap_or_else(|| cfg.out.join("triage"));
            let session = TriageSession::open(refined, ep, &dir).map_err(|e| PipelineError::Stage {
                stage: "serve",
                project: None,
                message: e.to_string(),
            })?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| PipelineError::Stage {
                stage: "serve",
                project: None,
                message: e.to_string(),
            })?;
            rt.block_on(service::serve(Arc::new(Mutex::new(session)), addr)).map_err(|e| PipelineError::Stage {
                stage: "serve",
                project: None,
                message: e.to_string(),
            })?;
        }
        Command::Eval => print_json(&pipeline::evaluate(&cfg)?),
        Command::TriageSim => print_json(&pipeline::triage_sim(&cfg)?),
        Command::Config { action: ConfigAction::Show } => print!("{}", cfg.render()),
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("cfg.txt");
        std::fs::write(&f, "c = 0.6\nalpha = 0.9\n").unwrap();
        let cli =
            Cli::try_parse_from(["taintmine", "config", "show", "--config", f.to_str().unwrap(), "--alpha", "0.85"])
                .unwrap();
        let cfg = cli.flags.config().unwrap();
        assert_eq!((cfg.c, cfg.alpha), (0.6, 0.85));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["taintmine", "config", "show"]), 0);
        assert_eq!(run(["taintmine", "config", "show", "--c", "2"]), 2);
        assert_eq!(run(["taintmine", "bogus"]), 2);
        assert_eq!(run(["taintmine", "mine"]), 2);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(run(["taintmine", "infer", "--out", out]), 3);
    }
}
