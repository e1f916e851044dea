use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::TriageError;
use crate::frontend::ElementId;
use crate::predictor::PredictedSink;
use crate::representations::Representation;
use crate::similarity::{get_similar, PredictionEmbeddings};
use crate::specs::{SpecKind, TaintSpec};

pub const DEFAULT_ALPHA: f64 = 0.95;
pub const SNAPSHOT_EVERY: usize = 50;
const AUDIT_FILE: &str = "audit.jsonl";
const SNAPSHOT_FILE: &str = "snapshot.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Ban,
    BanSimilar,
    Unban,
    ToggleRepresentation,
    Accept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    /// Milliseconds since the Unix epoch.
    pub ts: u64,
    pub action: Action,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dismissed: Vec<ElementId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeedbackState {
    pub banned: BTreeSet<ElementId>,
    pub hidden_reps: BTreeSet<Representation>,
    pub accepted: BTreeSet<ElementId>,
    #[serde(skip)]
    pub audit_log: Vec<AuditEntry>,
}

impl FeedbackState {
    /// Applies one logged action and records it.
    pub fn apply(&mut self, entry: AuditEntry) {
        match entry.action {
            Action::Ban => self.ban_one(&ElementId(entry.target.clone())),
            Action::BanSimilar => {
                for id in &entry.dismissed {
                    self.ban_one(id);
                }
            }
            Action::Unban => {
                self.banned.remove(&ElementId(entry.target.clone()));
            }
            Action::Accept => {
                let id = ElementId(entry.target.clone());
                self.banned.remove(&id);
                self.accepted.insert(id);
            }
            Action::ToggleRepresentation => {
                let rep = Representation::from(entry.target.as_str());
                if entry.hidden.unwrap_or(true) {
                    self.hidden_reps.insert(rep);
                } else {
                    self.hidden_reps.remove(&rep);
                }
            }
        }
        self.audit_log.push(entry);
    }

    fn ban_one(&mut self, id: &ElementId) {
        self.accepted.remove(id);
        self.banned.insert(id.clone());
    }

    pub fn replay(entries: impl IntoIterator<Item = AuditEntry>) -> Self {
        let mut s = FeedbackState::default();
        for e in entries {
            s.apply(e);
        }
        s
    }

    /// The three sets, ignoring the log.
    pub fn same_sets(&self, other: &FeedbackState) -> bool {
        self.banned == other.banned && self.hidden_reps == other.hidden_reps && self.accepted == other.accepted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub id: ElementId,
    pub rep: Representation,
    pub score: f64,
    pub stmt: String,
    pub func: String,
    pub banned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepCount {
    pub rep: Representation,
    pub count: usize,
    pub hidden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub total: usize,
    pub visible: usize,
    pub banned: usize,
    pub hidden_reps: usize,
    pub steps_taken: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Export {
    pub sinks: Vec<PredictedSink>,
    pub specs: Vec<TaintSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ViewFilter {
    pub min_score: Option<f64>,
    pub include_banned: bool,
    pub rep: Option<Representation>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    audit_len: usize,
    state: FeedbackState,
}

struct Persistence {
    dir: PathBuf,
    audit: File,
}

/// Reviewer session over the refined predictions. All mutations go through
/// `&mut self`, so callers serialize them.
pub struct TriageSession {
    predictions: Vec<PredictedSink>,
    embeddings: PredictionEmbeddings,
    index: HashMap<ElementId, usize>,
    state: FeedbackState,
    persist: Option<Persistence>,
}

fn now_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

impl TriageSession {
    /// In-memory session; `predictions` are re-sorted by score.
    pub fn new(mut predictions: Vec<PredictedSink>, embeddings: PredictionEmbeddings) -> Self {
        crate::predictor::sort_predictions(&mut predictions);
        let index = predictions.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
        TriageSession { predictions, embeddings, index, state: FeedbackState::default(), persist: None }
    }

    /// Session persisted under `dir`, resuming from an existing snapshot and
    /// audit log.
    pub fn open(
        predictions: Vec<PredictedSink>,
        embeddings: PredictionEmbeddings,
        dir: &Path,
    ) -> Result<Self, TriageError> {
        let mut s = Self::new(predictions, embeddings);
        fs::create_dir_all(dir)?;
        s.state = load_state(dir)?;
        let audit = OpenOptions::new().create(true).append(true).open(dir.join(AUDIT_FILE))?;
        s.persist = Some(Persistence { dir: dir.to_path_buf(), audit });
        Ok(s)
    }

    pub fn state(&self) -> &FeedbackState {
        &self.state
    }

    pub fn predictions(&self) -> &[PredictedSink] {
        &self.predictions
    }

    pub fn embeddings(&self) -> &PredictionEmbeddings {
        &self.embeddings
    }

    fn check_id(&self, id: &ElementId) -> Result<(), TriageError> {
        if self.index.contains_key(id) {
            Ok(())
        } else {
            Err(TriageError::UnknownPrediction(id.clone()))
        }
    }

    fn record(&mut self, mut entry: AuditEntry) -> Result<(), TriageError> {
        entry.ts = now_millis();
        if let Some(p) = &mut self.persist {
            let line = serde_json::to_string(&entry).map_err(std::io::Error::from)?;
            writeln!(p.audit, "{line}")?;
            p.audit.flush()?;
        }
        self.state.apply(entry);
        if let Some(p) = &self.persist {
            if self.state.audit_log.len().is_multiple_of(SNAPSHOT_EVERY) {
                let snap = Snapshot { audit_len: self.state.audit_log.len(), state: self.state.clone() };
                let tmp = p.dir.join("snapshot.json.tmp");
                fs::write(&tmp, serde_json::to_string(&snap).map_err(std::io::Error::from)?)?;
                fs::rename(tmp, p.dir.join(SNAPSHOT_FILE))?;
            }
        }
        Ok(())
    }

    fn entry(action: Action, target: impl Into<String>) -> AuditEntry {
        AuditEntry { ts: 0, action, target: target.into(), alpha: None, dismissed: Vec::new(), hidden: None }
    }

    pub fn ban(&mut self, id: &ElementId) -> Result<Vec<ElementId>, TriageError> {
        self.check_id(id)?;
        self.record(Self::entry(Action::Ban, id.as_str()))?;
        Ok(vec![id.clone()])
    }

    /// Bans `id` and every prediction similar to it above `alpha`.
    pub fn ban_similar(&mut self, id: &ElementId, alpha: f64) -> Result<Vec<ElementId>, TriageError> {
        self.check_id(id)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(TriageError::InvalidAlpha(alpha));
        }
        let mut dismissed = vec![id.clone()];
        dismissed.extend(get_similar(id, &self.predictions, &self.embeddings, alpha)?);
        let mut e = Self::entry(Action::BanSimilar, id.as_str());
        e.alpha = Some(alpha);
        e.dismissed = dismissed.clone();
        self.record(e)?;
        Ok(dismissed)
    }

    pub fn unban(&mut self, id: &ElementId) -> Result<(), TriageError> {
        self.check_id(id)?;
        self.record(Self::entry(Action::Unban, id.as_str()))
    }

    pub fn accept(&mut self, id: &ElementId) -> Result<(), TriageError> {
        self.check_id(id)?;
        self.record(Self::entry(Action::Accept, id.as_str()))
    }

    pub fn toggle_representation(&mut self, rep: &Representation, hidden: bool) -> Result<(), TriageError> {
        if !self.predictions.iter().any(|p| &p.rep == rep) {
            return Err(TriageError::UnknownRepresentation(rep.clone()));
        }
        let mut e = Self::entry(Action::ToggleRepresentation, rep.as_str());
        e.hidden = Some(hidden);
        self.record(e)
    }

    pub fn is_visible(&self, p: &PredictedSink) -> bool {
        !self.state.banned.contains(&p.id) && !self.state.hidden_reps.contains(&p.rep)
    }

    pub fn visible(&self) -> Vec<&PredictedSink> {
        self.predictions.iter().filter(|p| self.is_visible(p)).collect()
    }

    pub fn view(&self, filter: &ViewFilter) -> Vec<PredictionRow> {
        self.predictions
            .iter()
            .filter(|p| !self.state.hidden_reps.contains(&p.rep))
            .filter(|p| filter.include_banned || !self.state.banned.contains(&p.id))
            .filter(|p| filter.min_score.is_none_or(|m| p.score >= m))
            .filter(|p| filter.rep.as_ref().is_none_or(|r| &p.rep == r))
            .map(|p| PredictionRow {
                id: p.id.clone(),
                rep: p.rep.clone(),
                score: p.score,
                stmt: p.stmt.clone(),
                func: p.func.clone(),
                banned: self.state.banned.contains(&p.id),
            })
            .collect()
    }

    /// Non-banned prediction counts per representation, largest first.
    pub fn representations(&self) -> Vec<RepCount> {
        let mut counts: BTreeMap<&Representation, usize> = BTreeMap::new();
        for p in &self.predictions {
            let c = counts.entry(&p.rep).or_default();
            if !self.state.banned.contains(&p.id) {
                *c += 1;
            }
        }
        let mut out: Vec<RepCount> = counts
            .into_iter()
            .map(|(rep, count)| RepCount { rep: rep.clone(), count, hidden: self.state.hidden_reps.contains(rep) })
            .collect();
        out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.rep.cmp(&b.rep)));
        out
    }

    pub fn export(&self) -> Export {
        let sinks: Vec<PredictedSink> = self.visible().into_iter().cloned().collect();
        let mut best: BTreeMap<&Representation, f64> = BTreeMap::new();
        for s in &sinks {
            let e = best.entry(&s.rep).or_insert(s.score);
            *e = e.max(s.score);
        }
        let specs = best.into_iter().map(|(rep, score)| TaintSpec::new(rep.clone(), SpecKind::Snk, score)).collect();
        Export { sinks, specs }
    }

    pub fn stats(&self) -> Stats {
        Stats {
            total: self.predictions.len(),
            visible: self.visible().len(),
            banned: self.state.banned.len(),
            hidden_reps: self.state.hidden_reps.len(),
            steps_taken: self.state.audit_log.len(),
        }
    }
}

/// Snapshot (if any) followed by the audit entries written after it.
pub fn load_state(dir: &Path) -> Result<FeedbackState, TriageError> {
    let entries = read_audit(&dir.join(AUDIT_FILE))?;
    let snap_path = dir.join(SNAPSHOT_FILE);
    if snap_path.exists() {
        let snap: Snapshot = serde_json::from_str(&fs::read_to_string(&snap_path)?).map_err(std::io::Error::from)?;
        if snap.audit_len <= entries.len() {
            let mut state = snap.state;
            let mut entries = entries.into_iter();
            state.audit_log = entries.by_ref().take(snap.audit_len).collect();
            for e in entries {
                state.apply(e);
            }
            return Ok(state);
        }
        log::warn!("snapshot is ahead of the audit log; replaying the log");
    }
    Ok(FeedbackState::replay(entries))
}

pub fn read_audit(path: &Path) -> Result<Vec<AuditEntry>, TriageError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(e) => out.push(e),
            // a torn final line from an interrupted write is dropped
            Err(e) => {
                log::warn!("{}:{}: {e}", path.display(), n + 1);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::Span;
    use crate::similarity::{refine, KnownSinkEmbeddings, TokenHashEmbedder};

    fn session() -> TriageSession {
        let p = |id: &str, rep: &str, score: f64, stmt: &str| PredictedSink {
            id: id.into(),
            project: "t".into(),
            path: "a.js".into(),
            span: Span::new(0, 1),
            rep: rep.into(),
            score,
            stmt: stmt.into(),
            func: format!("function h() {{ {stmt} }}"),
        };
        let preds = vec![
            p("a", "save(0)", 0.9, "save(x);"),
            p("b", "save(0)", 0.8, "save(x);"),
            p("c", "log(0)", 0.7, "log(x);"),
            p("d", "save(0)", 0.6, "other + stuff"),
        ];
        let (refined, ep) = refine(&TokenHashEmbedder::default(), &preds, &KnownSinkEmbeddings::default());
        TriageSession::new(refined, ep)
    }

    #[test]
    fn ban_is_idempotent_and_unban_restores() {
        let mut s = session();
        let a = ElementId::from("a");
        s.ban(&a).unwrap();
        let once = s.state().clone();
        s.ban(&a).unwrap();
        assert!(s.state().same_sets(&once));
        assert_eq!(s.stats().steps_taken, 2);
        s.unban(&a).unwrap();
        assert!(s.state().banned.is_empty());
        assert_eq!(s.stats().visible, 4);
    }

    #[test]
    fn ban_similar_and_alpha_one() {
        let mut s = session();
        let a = ElementId::from("a");
        assert_eq!(s.ban_similar(&a, 1.0).unwrap(), vec![a.clone()]);
        let d = s.ban_similar(&a, 0.9).unwrap();
        assert_eq!(d, vec![a.clone(), ElementId::from("b")]);
        assert!(matches!(s.ban_similar(&a, 1.5), Err(TriageError::InvalidAlpha(_))));
        assert!(matches!(s.ban(&"zz".into()), Err(TriageError::UnknownPrediction(_))));
    }

    #[test]
    fn hiding_and_export() {
        let mut s = session();
        s.toggle_representation(&"log(0)".into(), true).unwrap();
        assert_eq!(s.stats().visible, 3);
        let reps = s.representations();
        assert_eq!(reps[0].rep.as_str(), "save(0)");
        assert!(reps[1].hidden);
        let ex = s.export();
        assert_eq!(ex.specs.len(), 1);
        assert_eq!(ex.specs[0].kind, SpecKind::Snk);
        assert!(matches!(s.toggle_representation(&"x(0)".into(), true), Err(TriageError::UnknownRepresentation(_))));
    }

    #[test]
    fn accept_and_ban_are_exclusive() {
        let mut s = session();
        let a = ElementId::from("a");
        s.accept(&a).unwrap();
        s.ban(&a).unwrap();
        assert!(s.state().accepted.is_empty());
        s.accept(&a).unwrap();
        assert!(s.state().banned.is_empty());
    }

    #[test]
    fn reload_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let s0 = session();
        let (preds, ep) = (s0.predictions().to_vec(), s0.embeddings().clone());
        let mut s = TriageSession::open(preds.clone(), ep.clone(), dir.path()).unwrap();
        for i in 0..(SNAPSHOT_EVERY + 3) {
            let id = ElementId::from(["a", "b", "c"][i % 3]);
            if i % 2 == 0 {
                s.ban(&id).unwrap()
            } else {
                s.unban(&id).map(|_| vec![]).unwrap()
            };
        }
        s.toggle_representation(&"log(0)".into(), true).unwrap();
        let back = TriageSession::open(preds, ep, dir.path()).unwrap();
        assert!(back.state().same_sets(s.state()));
        assert_eq!(back.state().audit_log, s.state().audit_log);
        assert!(dir.path().join(SNAPSHOT_FILE).exists());
    }
}
