//! End-to-end orchestration: mining, inference, prediction and refinement,
//! each stage reading and writing JSON Lines artifacts under one directory.
//!
//! | file | contents |
//! |------|----------|
//! | `elements.jsonl` | training elements with their representation |
//! | `graphs.jsonl` | one propagation graph dump per project |
//! | `triples.jsonl` | flow triples |
//! | `labels.jsonl` | elements matched by seed specs |
//! | `known_sinks.jsonl` | representation and code of every known sink |
//! | `project_scores.jsonl` | per-project solver output |
//! | `specs.jsonl` | averaged sink specs |
//! | `predictions.jsonl` | instantiated sinks on the test corpus |
//! | `refined.jsonl` | predictions after similarity refinement |
//! | `embeddings/` | known-sink and prediction vector stores |

mod config;
mod eval;
pub mod io;

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ConfigError, EmbeddingChoice, PipelineConfig};
pub use eval::{
    eval_boosted, simulate_triage, EvalReport, Label, LabelRecord, Ratio, SimulationError, TriageEffortReport,
};

use crate::frontend::{read_corpus, ElementId, ElementKind, ProjectModel, SourceFile, Span};
use crate::inference::{average_specs, build_constraints, solve, ProjectScores};
use crate::predictor::{get_sinks_above, PredictedSink, RepresentedElement};
use crate::propagation::{build_graph, label_known, mine_triples, FlowTriple, KnownLabel, PropagationError};
use crate::representations::{canonicalize, compute_access_paths, Representation};
use crate::similarity::store::{read_store, write_store, CHUNK_SIZE};
use crate::similarity::{
    precompute_known, refine, CodePair, EmbeddingProvider, KnownSinkCode, KnownSinkEmbeddings, PredictionEmbeddings,
};
use crate::specs::{SpecKind, TaintSpec};
use io::{read_jsonl, read_specs, write_jsonl, write_lines, write_specs};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}{}: {message}", project.as_ref().map(|p| format!(" [{p}]")).unwrap_or_default())]
    Stage { stage: &'static str, project: Option<String>, message: String },
}

impl PipelineError {
    fn stage(stage: &'static str, message: impl ToString) -> Self {
        PipelineError::Stage { stage, project: None, message: message.to_string() }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Stage { .. } => 3,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub id: ElementId,
    pub project: String,
    pub path: String,
    pub kind: ElementKind,
    pub span: Span,
    pub rep: Representation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownSinkRecord {
    pub rep: Representation,
    pub stmt: String,
    pub func: String,
}

/// Canonical representation and enclosing code of every element.
pub fn represent(model: &ProjectModel) -> Vec<RepresentedElement> {
    model
        .elements()
        .map(|(file, e)| {
            let rep = canonicalize(&compute_access_paths(file, e)).expect("access paths are never empty");
            let (stmt, func) = file.enclosing_code(e);
            RepresentedElement { element: e.clone(), rep, stmt, func }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MinedProject {
    pub project: String,
    pub elements: Vec<RepresentedElement>,
    pub graph_dump: String,
    pub triples: Vec<FlowTriple>,
    pub labels: Vec<KnownLabel>,
}

impl MinedProject {
    pub fn reps(&self) -> HashMap<ElementId, Representation> {
        self.elements.iter().map(|e| (e.element.id.clone(), e.rep.clone())).collect()
    }
}

pub fn mine_project(
    project: &str,
    sources: Vec<SourceFile>,
    seeds: &[TaintSpec],
    triple_cap: usize,
) -> Result<MinedProject, PropagationError> {
    let model = ProjectModel::from_sources(project, sources);
    let elements = represent(&model);
    let graph = build_graph(&model);
    let triples = mine_triples(&graph, triple_cap)?;
    let labels = label_known(elements.iter().map(|e| (&e.element.id, e.element.kind, &e.rep)), seeds);
    Ok(MinedProject { project: project.to_string(), elements, graph_dump: graph.dump_json(), triples, labels })
}

#[derive(Debug, Clone, Default)]
pub struct MineOutput {
    pub projects: Vec<MinedProject>,
    /// Projects aborted for exceeding the triple cap.
    pub skipped: Vec<String>,
    pub known_sinks: Vec<KnownSinkCode>,
}

/// Mines every project in parallel. `pool_seeds` contribute known-sink code
/// but no solver labels.
pub fn mine_corpus(
    corpus: Vec<(String, Vec<SourceFile>)>,
    seeds: &[TaintSpec],
    pool_seeds: &[TaintSpec],
    triple_cap: usize,
) -> MineOutput {
    let results: Vec<_> =
        corpus.into_par_iter().map(|(p, files)| (p.clone(), mine_project(&p, files, seeds, triple_cap))).collect();
    let mut out = MineOutput::default();
    let snk_reps: BTreeSet<&Representation> =
        seeds.iter().chain(pool_seeds).filter(|s| s.kind == SpecKind::Snk).map(|s| &s.rep).collect();
    for (project, r) in results {
        match r {
            Ok(m) => {
                for e in &m.elements {
                    if matches!(e.element.kind, ElementKind::CallArgument(_)) && snk_reps.contains(&e.rep) {
                        out.known_sinks.push(KnownSinkCode {
                            rep: e.rep.clone(),
                            stmt: e.stmt.clone(),
                            func: e.func.clone(),
                        });
                    }
                }
                out.projects.push(m);
            }
            Err(e) => {
                log::warn!("skipping project {project}: {e}");
                out.skipped.push(project);
            }
        }
    }
    out
}

/// Project id, its triples, its known labels and the representation of each
/// element.
pub type InferInput = (String, Vec<FlowTriple>, Vec<KnownLabel>, HashMap<ElementId, Representation>);

type Corpus = Vec<(String, Vec<SourceFile>)>;

/// Solves each project's system and averages the results.
pub fn infer_specs(projects: &[InferInput], c: f64, lambda: f64) -> Result<(Vec<ProjectScores>, Vec<TaintSpec>)> {
    let scores = projects
        .par_iter()
        .map(|(project, triples, labels, reps)| {
            let fail = |e: &dyn ToString| PipelineError::Stage {
                stage: "infer",
                project: Some(project.clone()),
                message: e.to_string(),
            };
            let sys = build_constraints(triples, labels, |id| reps.get(id).cloned(), c).map_err(|e| fail(&e))?;
            solve(&sys, lambda, project).map_err(|e| fail(&e))
        })
        .collect::<Result<Vec<_>>>()?;
    let specs = average_specs(&scores);
    Ok((scores, specs))
}

/// Sink specs only, as emitted downstream.
pub fn sink_specs(specs: &[TaintSpec]) -> Vec<TaintSpec> {
    specs.iter().filter(|s| s.kind == SpecKind::Snk).cloned().collect()
}

pub fn represent_corpus(corpus: Vec<(String, Vec<SourceFile>)>) -> Vec<RepresentedElement> {
    corpus
        .into_par_iter()
        .map(|(p, files)| represent(&ProjectModel::from_sources(p, files)))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Everything an in-memory run produces.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub mined: MineOutput,
    pub project_scores: Vec<ProjectScores>,
    /// Averaged sink specs.
    pub specs: Vec<TaintSpec>,
    pub predictions: Vec<PredictedSink>,
    pub refined: Vec<PredictedSink>,
    pub known: KnownSinkEmbeddings,
    pub embeddings: PredictionEmbeddings,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| PipelineError::stage("setup", e))
}

fn need<'a>(v: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    v.as_deref().ok_or_else(|| ConfigError::Invalid(format!("`{key}` is required")).into())
}

fn load_seeds(path: &Option<PathBuf>) -> Result<Vec<TaintSpec>> {
    match path {
        Some(p) => read_specs(p).map_err(|e| ConfigError::Invalid(e).into()),
        None => Ok(Vec::new()),
    }
}

fn load_corpus(path: &Path) -> Result<Vec<(String, Vec<SourceFile>)>> {
    read_corpus(path).map_err(|e| ConfigError::Invalid(e.to_string()).into())
}

/// Runs every stage in memory without touching the output directory.
pub fn run_in_memory(cfg: &PipelineConfig) -> Result<Artifacts> {
    cfg.validate()?;
    let corpus = load_corpus(need(&cfg.corpus, "corpus")?)?;
    let test = match &cfg.test_corpus {
        Some(p) => load_corpus(p)?,
        None => corpus.clone(),
    };
    let seeds = load_seeds(&cfg.seeds)?;
    let pool_seeds = load_seeds(&cfg.ek_seeds)?;
    let provider = cfg.embeddings.provider()?;
    pool(cfg.jobs)?.install(|| {
        let mined = mine_corpus(corpus, &seeds, &pool_seeds, cfg.triple_cap);
        let inputs: Vec<_> =
            mined.projects.iter().map(|m| (m.project.clone(), m.triples.clone(), m.labels.clone(), m.reps())).collect();
        let (project_scores, all) = infer_specs(&inputs, cfg.c, cfg.lambda)?;
        let specs = sink_specs(&all);
        let test_elements = represent_corpus(test);
        let predictions = get_sinks_above(&specs, &seeds, &test_elements, cfg.min_score);
        let known = precompute_known(provider.as_ref(), &mined.known_sinks);
        let (refined, embeddings) = refine(provider.as_ref(), &predictions, &known);
        Ok(Artifacts { mined, project_scores, specs, predictions, refined, known, embeddings })
    })
}

fn io_err(stage: &'static str) -> impl Fn(std::io::Error) -> PipelineError {
    move |e| PipelineError::stage(stage, e)
}

fn read_artifact<T: serde::de::DeserializeOwned>(stage: &'static str, path: &Path) -> Result<Vec<T>> {
    read_jsonl(path).map_err(|e| PipelineError::stage(stage, e))
}

/// Mining stage: parses the training corpus and writes elements, graphs,
/// triples, labels and known sinks.
pub fn stage_mine(cfg: &PipelineConfig) -> Result<MineOutput> {
    cfg.validate()?;
    let corpus = load_corpus(need(&cfg.corpus, "corpus")?)?;
    let seeds = load_seeds(&cfg.seeds)?;
    let pool_seeds = load_seeds(&cfg.ek_seeds)?;
    let mined = pool(cfg.jobs)?.install(|| mine_corpus(corpus, &seeds, &pool_seeds, cfg.triple_cap));
    let out = &cfg.out;
    let e = io_err("mine");
    let elements: Vec<ElementRecord> = mined
        .projects
        .iter()
        .flat_map(|m| &m.elements)
        .map(|r| ElementRecord {
            id: r.element.id.clone(),
            project: r.element.project.clone(),
            path: r.element.path.clone(),
            kind: r.element.kind,
            span: r.element.span,
            rep: r.rep.clone(),
        })
        .collect();
    write_jsonl(&out.join("elements.jsonl"), &elements).map_err(&e)?;
    write_lines(&out.join("graphs.jsonl"), mined.projects.iter().map(|m| m.graph_dump.clone())).map_err(&e)?;
    write_jsonl(&out.join("triples.jsonl"), mined.projects.iter().flat_map(|m| &m.triples)).map_err(&e)?;
    let labels: Vec<LabelLine> = mined
        .projects
        .iter()
        .flat_map(|m| m.labels.iter().map(|l| LabelLine { project: m.project.clone(), label: l.clone() }))
        .collect();
    write_jsonl(&out.join("labels.jsonl"), &labels).map_err(&e)?;
    let known: Vec<KnownSinkRecord> = mined
        .known_sinks
        .iter()
        .map(|k| KnownSinkRecord { rep: k.rep.clone(), stmt: k.stmt.clone(), func: k.func.clone() })
        .collect();
    write_jsonl(&out.join("known_sinks.jsonl"), &known).map_err(&e)?;
    write_lines(&out.join("skipped.txt"), mined.skipped.iter().cloned()).map_err(&e)?;
    Ok(mined)
}

#[derive(Serialize, Deserialize)]
struct LabelLine {
    project: String,
    #[serde(flatten)]
    label: KnownLabel,
}

/// Inference stage: reads the mining artifacts, writes per-project scores
/// and the averaged sink specs.
pub fn stage_infer(cfg: &PipelineConfig) -> Result<Vec<TaintSpec>> {
    cfg.validate()?;
    let out = &cfg.out;
    let elements: Vec<ElementRecord> = read_artifact("infer", &out.join("elements.jsonl"))?;
    let triples: Vec<FlowTriple> = read_artifact("infer", &out.join("triples.jsonl"))?;
    let labels: Vec<LabelLine> = read_artifact("infer", &out.join("labels.jsonl"))?;
    type Parts = (Vec<FlowTriple>, Vec<KnownLabel>, HashMap<ElementId, Representation>);
    let mut by_project: std::collections::BTreeMap<String, Parts> = Default::default();
    for e in elements {
        by_project.entry(e.project).or_default().2.insert(e.id, e.rep);
    }
    for t in triples {
        by_project.entry(t.project.clone()).or_default().0.push(t);
    }
    for l in labels {
        by_project.entry(l.project).or_default().1.push(l.label);
    }
    let inputs: Vec<_> = by_project.into_iter().map(|(p, (t, l, r))| (p, t, l, r)).collect();
    let (scores, all) = pool(cfg.jobs)?.install(|| infer_specs(&inputs, cfg.c, cfg.lambda))?;
    let specs = sink_specs(&all);
    let e = io_err("infer");
    write_jsonl(&out.join("project_scores.jsonl"), &scores).map_err(&e)?;
    write_specs(&out.join("specs.jsonl"), &specs).map_err(&e)?;
    Ok(specs)
}

/// Prediction stage: instantiates the inferred sink specs on the test corpus.
pub fn stage_predict(cfg: &PipelineConfig) -> Result<Vec<PredictedSink>> {
    cfg.validate()?;
    let test_root = match &cfg.test_corpus {
        Some(p) => p.as_path(),
        None => need(&cfg.corpus, "test_corpus")?,
    };
    let test = load_corpus(test_root)?;
    let seeds = load_seeds(&cfg.seeds)?;
    let specs = read_specs(&cfg.out.join("specs.jsonl")).map_err(|e| PipelineError::stage("predict", e))?;
    let elements = pool(cfg.jobs)?.install(|| represent_corpus(test));
    let predictions = get_sinks_above(&specs, &seeds, &elements, cfg.min_score);
    write_jsonl(&cfg.out.join("predictions.jsonl"), &predictions).map_err(io_err("predict"))?;
    Ok(predictions)
}

/// Refinement stage: rescales predictions by similarity to known sinks and
/// stores both embedding sets.
pub fn stage_refine(cfg: &PipelineConfig) -> Result<Vec<PredictedSink>> {
    cfg.validate()?;
    let provider = cfg.embeddings.provider()?;
    let out = &cfg.out;
    let predictions: Vec<PredictedSink> = read_artifact("refine", &out.join("predictions.jsonl"))?;
    let known: Vec<KnownSinkRecord> = read_artifact("refine", &out.join("known_sinks.jsonl"))?;
    let known: Vec<KnownSinkCode> =
        known.into_iter().map(|k| KnownSinkCode { rep: k.rep, stmt: k.stmt, func: k.func }).collect();
    let (refined, ep, ek) = pool(cfg.jobs)?.install(|| {
        let ek = precompute_known(provider.as_ref(), &known);
        let (refined, ep) = refine(provider.as_ref(), &predictions, &ek);
        (refined, ep, ek)
    });
    let e = io_err("refine");
    write_jsonl(&out.join("refined.jsonl"), &refined).map_err(&e)?;
    let known_entries: Vec<(String, &CodePair)> = ek
        .by_rep
        .iter()
        .flat_map(|(rep, pairs)| pairs.iter().enumerate().map(move |(i, p)| (format!("{rep}#{i}"), p)))
        .collect();
    write_store(&out.join("embeddings/known"), provider.dim(), known_entries, CHUNK_SIZE).map_err(&e)?;
    write_store(
        &out.join("embeddings/predictions"),
        provider.dim(),
        ep.iter().map(|(id, p)| (id.as_str().to_string(), p)),
        CHUNK_SIZE,
    )
    .map_err(&e)?;
    Ok(refined)
}

/// All four stages through the artifact directory.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Vec<PredictedSink>> {
    stage_mine(cfg)?;
    stage_infer(cfg)?;
    stage_predict(cfg)?;
    stage_refine(cfg)
}

/// Refined predictions and their embeddings from a finished run. Embeddings
/// missing from the store are recomputed.
pub fn load_refined(
    out: &Path,
    provider: &dyn EmbeddingProvider,
) -> Result<(Vec<PredictedSink>, PredictionEmbeddings)> {
    let refined: Vec<PredictedSink> = read_artifact("load", &out.join("refined.jsonl"))?;
    let mut ep: PredictionEmbeddings = match read_store(&out.join("embeddings/predictions")) {
        Ok((_, entries)) => entries.into_iter().map(|(k, p)| (ElementId(k), p)).collect(),
        Err(_) => PredictionEmbeddings::new(),
    };
    for p in &refined {
        if !ep.contains_key(&p.id) {
            ep.insert(p.id.clone(), CodePair::of(provider, &p.stmt, &p.func));
        }
    }
    Ok((refined, ep))
}

pub fn load_labels(path: &Path) -> Result<HashMap<ElementId, Label>> {
    let records: Vec<LabelRecord> = read_jsonl(path).map_err(ConfigError::Invalid)?;
    Ok(records.into_iter().map(|r| (r.id, r.label)).collect())
}

/// Sink call arguments whose representation is a sink in `specs` with at
/// least `min_score`.
pub fn sink_ids(elements: &[RepresentedElement], specs: &[TaintSpec], min_score: f64) -> BTreeSet<ElementId> {
    let reps: BTreeSet<&Representation> =
        specs.iter().filter(|s| s.kind == SpecKind::Snk && s.score >= min_score).map(|s| &s.rep).collect();
    elements
        .iter()
        .filter(|e| matches!(e.element.kind, ElementKind::CallArgument(_)) && reps.contains(&e.rep))
        .map(|e| e.element.id.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRound {
    pub round: usize,
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub rounds: Vec<EvalRound>,
    pub mean_precision: Ratio,
    pub mean_recall: Ratio,
}

fn mean(values: impl Iterator<Item = Ratio>) -> Ratio {
    let v: Vec<f64> = values.filter_map(Ratio::value).collect();
    if v.is_empty() {
        Ratio::NotApplicable
    } else {
        Ratio::Value(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Trains on the old seed specs and compares the boosted sinks against the
/// new ones. Without a test corpus the training corpus is split at random,
/// once per round.
pub fn evaluate(cfg: &PipelineConfig) -> Result<EvalSummary> {
    cfg.validate()?;
    let corpus = load_corpus(need(&cfg.corpus, "corpus")?)?;
    let old = load_seeds(&Some(need(&cfg.seeds_old, "seeds_old")?.to_path_buf()))?;
    let new = load_seeds(&Some(need(&cfg.seeds_new, "seeds_new")?.to_path_buf()))?;
    let splits: Vec<(Corpus, Corpus)> = match &cfg.test_corpus {
        Some(t) => vec![(corpus, load_corpus(t)?)],
        None => (0..cfg.rounds.max(1))
            .map(|r| {
                let mut projects = corpus.clone();
                projects.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64)));
                let cut =
                    ((projects.len() as f64 * cfg.split).round() as usize).clamp(1.min(projects.len()), projects.len());
                let test = projects.split_off(cut);
                (projects, test)
            })
            .collect(),
    };
    let pool = pool(cfg.jobs)?;
    let mut rounds = Vec::new();
    for (i, (train, test)) in splits.into_iter().enumerate() {
        let names = |c: &[(String, Vec<SourceFile>)]| c.iter().map(|p| p.0.clone()).collect::<Vec<_>>();
        let (train_names, test_names) = (names(&train), names(&test));
        let report = pool.install(|| -> Result<EvalReport> {
            let mined = mine_corpus(train, &old, &[], cfg.triple_cap);
            let inputs: Vec<_> = mined
                .projects
                .iter()
                .map(|m| (m.project.clone(), m.triples.clone(), m.labels.clone(), m.reps()))
                .collect();
            let (_, all) = infer_specs(&inputs, cfg.c, cfg.lambda)?;
            let elements = represent_corpus(test);
            let old_ids = sink_ids(&elements, &old, 0.0);
            let mut boosted = old_ids.clone();
            boosted.extend(sink_ids(&elements, &all, cfg.min_score));
            let new_ids = sink_ids(&elements, &new, 0.0);
            Ok(eval_boosted(&old_ids, &boosted, &new_ids))
        })?;
        rounds.push(EvalRound { round: i, train: train_names, test: test_names, report });
    }
    Ok(EvalSummary {
        mean_precision: mean(rounds.iter().map(|r| r.report.precision)),
        mean_recall: mean(rounds.iter().map(|r| r.report.recall)),
        rounds,
    })
}

/// Triage simulation over a finished run's refined predictions.
pub fn triage_sim(cfg: &PipelineConfig) -> Result<TriageEffortReport> {
    cfg.validate()?;
    let labels = load_labels(need(&cfg.labels, "labels")?)?;
    let provider = cfg.embeddings.provider()?;
    let (refined, ep) = load_refined(&cfg.out, provider.as_ref())?;
    simulate_triage(&refined, &labels, &ep, cfg.score_cutoff, cfg.coarseness_cutoff, cfg.alpha)
        .map_err(|e| PipelineError::stage("triage-sim", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, rel: &str, text: &str) {
        let p = dir.join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, text).unwrap();
    }

    #[test]
    fn empty_corpus_is_fine() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("corpus")).unwrap();
        let cfg = PipelineConfig {
            corpus: Some(dir.path().join("corpus")),
            out: dir.path().join("out"),
            ..Default::default()
        };
        assert!(run_pipeline(&cfg).unwrap().is_empty());
        assert_eq!(std::fs::read_to_string(dir.path().join("out/specs.jsonl")).unwrap(), "");
    }

    #[test]
    fn missing_corpus_is_a_config_error() {
        let err = run_pipeline(&PipelineConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn staged_and_in_memory_agree() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        for p in ["a", "b"] {
            write(d, &format!("corpus/{p}/x.js"), "var v = readInput(); var s = escape(v); store(s);\n");
        }
        write(
            d,
            "seeds.jsonl",
            "{\"rep\":\"readInput()\",\"kind\":\"src\"}\n{\"rep\":\"escape()\",\"kind\":\"san\"}\n",
        );
        let cfg = PipelineConfig {
            corpus: Some(d.join("corpus")),
            seeds: Some(d.join("seeds.jsonl")),
            out: d.join("out"),
            jobs: 2,
            ..Default::default()
        };
        let staged = run_pipeline(&cfg).unwrap();
        let mem = run_in_memory(&cfg).unwrap();
        assert_eq!(staged, mem.refined);
        assert!(mem.specs.iter().any(|s| s.rep.as_str() == "store(0)"));
        let first = std::fs::read(d.join("out/refined.jsonl")).unwrap();
        run_pipeline(&cfg).unwrap();
        assert_eq!(first, std::fs::read(d.join("out/refined.jsonl")).unwrap());
    }
}
