//! Task assignment, submission handling and live statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use factvc_core::analysis::{agreement, AgreementReport};
use factvc_core::corpus::{
    append_jsonl, read_jsonl, validate_annotation, AnnotationRecord, CaptionDoc, CaptionKey, Corpus, FieldError,
    SentenceLabel, VideoRef,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::Protocol;

pub const ASSIGNMENTS_FILE: &str = "assignments.jsonl";
pub const ANNOTATIONS_FILE: &str = "annotations.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("unknown annotator {0}")]
    UnknownAnnotator(String),
    #[error("unknown task {0}")]
    UnknownTask(String),
    #[error("{0}")]
    Conflict(String),
    #[error("annotation failed validation")]
    Validation(Vec<FieldError>),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Store(#[from] factvc_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pending,
    Submitted,
}

/// One caption assigned to one annotator. Logged as a snapshot on creation
/// and again on each status change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskAssignment {
    pub task_id: String,
    pub annotator_id: String,
    pub video_id: String,
    pub model_id: String,
    pub status: TaskStatus,
}

impl TaskAssignment {
    fn key(&self) -> CaptionKey {
        CaptionKey::new(&self.video_id, &self.model_id)
    }
}

/// What an annotator sees of a task: no model identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskView {
    pub task_id: String,
    pub annotator_id: String,
    pub video_id: String,
    pub status: TaskStatus,
}

impl From<&TaskAssignment> for TaskView {
    fn from(t: &TaskAssignment) -> Self {
        Self {
            task_id: t.task_id.clone(),
            annotator_id: t.annotator_id.clone(),
            video_id: t.video_id.clone(),
            status: t.status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextTask {
    pub task: Option<TaskView>,
    /// Pending tasks left for the annotator, including `task`.
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePayload {
    pub index: usize,
    pub text: String,
    /// Server-side tokens; error spans index into this list.
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionPayload {
    pub task_id: String,
    pub video_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub video_url: Option<String>,
    pub status: TaskStatus,
    pub sentences: Vec<SentencePayload>,
    /// The annotator's current submission for this task, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub submitted: Option<SubmittedLabels>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmittedLabels {
    pub paragraph_score: u8,
    pub sentences: Vec<SentenceLabel>,
}

/// A submission: an annotation record whose caption is identified either
/// by `task_id` or by `video_id` plus `model_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Submission {
    #[serde(default)]
    pub task_id: Option<String>,
    pub annotator_id: String,
    #[serde(default)]
    pub video_id: Option<String>,
    #[serde(default)]
    pub model_id: Option<String>,
    pub paragraph_score: u8,
    pub sentences: Vec<SentenceLabel>,
}

impl From<AnnotationRecord> for Submission {
    fn from(r: AnnotationRecord) -> Self {
        Self {
            task_id: None,
            annotator_id: r.annotator_id,
            video_id: Some(r.video_id),
            model_id: Some(r.model_id),
            paragraph_score: r.paragraph_score,
            sentences: r.sentence_labels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accepted {
    pub record_id: String,
    pub task_id: String,
    /// Whether an earlier submission for the task was superseded.
    pub replaced: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub pending: usize,
    pub submitted: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub annotators_per_caption: usize,
    pub captions: usize,
    pub complete_captions: usize,
    pub tasks: StatusCounts,
    pub per_annotator: BTreeMap<String, StatusCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveAgreement {
    /// `"ok"` or `"insufficient data"`.
    pub status: String,
    pub complete_captions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<AgreementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub const INSUFFICIENT_DATA: &str = "insufficient data";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub annotators: Vec<String>,
    pub annotators_per_caption: usize,
    pub seed: u64,
    pub protocol: Protocol,
}

impl ServiceConfig {
    pub fn new(annotators: Vec<String>) -> Self {
        Self { annotators, annotators_per_caption: 3, seed: 0, protocol: Protocol::builtin() }
    }
}

#[derive(Debug)]
struct State {
    tasks: Vec<TaskAssignment>,
    by_id: HashMap<String, usize>,
    by_key: HashMap<(String, CaptionKey), usize>,
    queues: BTreeMap<String, Vec<usize>>,
    /// Latest record per task, with its record id.
    records: HashMap<usize, (String, AnnotationRecord)>,
    record_count: usize,
}

impl State {
    fn new(tasks: Vec<TaskAssignment>) -> Self {
        let mut s = Self {
            tasks: Vec::new(),
            by_id: HashMap::new(),
            by_key: HashMap::new(),
            queues: BTreeMap::new(),
            records: HashMap::new(),
            record_count: 0,
        };
        for t in tasks {
            s.observe(t);
        }
        s
    }

    /// Fold one logged snapshot into the state.
    fn observe(&mut self, t: TaskAssignment) {
        if let Some(&i) = self.by_id.get(&t.task_id) {
            self.tasks[i].status = t.status;
            return;
        }
        let i = self.tasks.len();
        self.by_id.insert(t.task_id.clone(), i);
        self.by_key.insert((t.annotator_id.clone(), t.key()), i);
        self.queues.entry(t.annotator_id.clone()).or_default().push(i);
        self.tasks.push(t);
    }

    fn complete_captions(&self, k: usize) -> BTreeSet<CaptionKey> {
        let mut done: BTreeMap<CaptionKey, usize> = BTreeMap::new();
        for t in self.tasks.iter().filter(|t| t.status == TaskStatus::Submitted) {
            *done.entry(t.key()).or_default() += 1;
        }
        done.into_iter().filter(|&(_, n)| n >= k).map(|(key, _)| key).collect()
    }
}

pub struct AnnotationService {
    dir: PathBuf,
    captions: BTreeMap<CaptionKey, CaptionDoc>,
    videos: BTreeMap<String, VideoRef>,
    k: usize,
    protocol: Protocol,
    state: Mutex<State>,
}

/// Assign every model caption to `k` distinct annotators, balancing load.
/// Caption order is shuffled once, so each annotator sees the captions of a
/// video in an order unrelated to the model.
pub fn plan_assignments(corpus: &Corpus, annotators: &[String], k: usize, seed: u64) -> Vec<TaskAssignment> {
    let mut keys: Vec<CaptionKey> = corpus.captions.iter().filter(|c| !c.is_human()).map(CaptionDoc::key).collect();
    keys.sort();
    keys.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut tasks = Vec::with_capacity(keys.len() * k);
    for (i, key) in keys.iter().enumerate() {
        for j in 0..k {
            let annotator = &annotators[(i * k + j) % annotators.len()];
            tasks.push(TaskAssignment {
                task_id: format!("t{:06}", tasks.len() + 1),
                annotator_id: annotator.clone(),
                video_id: key.video_id.clone(),
                model_id: key.model_id.clone(),
                status: TaskStatus::Pending,
            });
        }
    }
    tasks
}

impl AnnotationService {
    /// Open the store in `dir`, replaying its logs, or create a fresh
    /// assignment plan when the directory holds none.
    pub fn open(corpus: &Corpus, dir: &Path, config: ServiceConfig) -> Result<Self, ServiceError> {
        let k = config.annotators_per_caption;
        let mut annotators: Vec<String> = config.annotators.clone();
        annotators.sort();
        annotators.dedup();
        if annotators.iter().any(String::is_empty) {
            return Err(ServiceError::BadRequest("annotator ids must be non-empty".into()));
        }
        if k == 0 || annotators.len() < k {
            return Err(ServiceError::BadRequest(format!(
                "{} annotators cannot cover {k} annotations per caption",
                annotators.len()
            )));
        }
        std::fs::create_dir_all(dir).map_err(|e| factvc_core::Error::io(dir, e))?;
        let captions: BTreeMap<CaptionKey, CaptionDoc> = corpus.captions.iter().map(|c| (c.key(), c.clone())).collect();
        let assignments_path = dir.join(ASSIGNMENTS_FILE);
        let logged: Vec<TaskAssignment> =
            if assignments_path.exists() { read_jsonl(&assignments_path)? } else { Vec::new() };
        let state = if logged.is_empty() {
            let plan = plan_assignments(corpus, &annotators, k, config.seed);
            append_jsonl(&assignments_path, &plan)?;
            log::info!("created {} assignments for {} annotators", plan.len(), annotators.len());
            State::new(plan)
        } else {
            let state = State::new(logged);
            let known: BTreeSet<&String> = state.queues.keys().collect();
            let wanted: BTreeSet<&String> = annotators.iter().collect();
            if known != wanted {
                return Err(ServiceError::BadRequest(format!(
                    "store was planned for annotators {known:?}, not {wanted:?}"
                )));
            }
            if let Some(t) = state.tasks.iter().find(|t| !captions.contains_key(&t.key())) {
                return Err(ServiceError::BadRequest(format!("task {} refers to unknown caption {}", t.task_id, t.key())));
            }
            log::info!("replayed {} assignments", state.tasks.len());
            state
        };
        let service = Self {
            dir: dir.to_path_buf(),
            captions,
            videos: corpus.videos.iter().map(|v| (v.video_id.clone(), v.clone())).collect(),
            k,
            protocol: config.protocol,
            state: Mutex::new(state),
        };
        service.replay_annotations()?;
        Ok(service)
    }

    fn replay_annotations(&self) -> Result<(), ServiceError> {
        let path = self.dir.join(ANNOTATIONS_FILE);
        if !path.exists() {
            return Ok(());
        }
        let records: Vec<AnnotationRecord> = read_jsonl(&path)?;
        let mut state = self.lock();
        for (line, r) in records.into_iter().enumerate() {
            let Some(&i) = state.by_key.get(&(r.annotator_id.clone(), r.key())) else {
                return Err(ServiceError::BadRequest(format!(
                    "{}:{}: no assignment of {} to {}",
                    path.display(),
                    line + 1,
                    r.key(),
                    r.annotator_id
                )));
            };
            state.records.insert(i, (record_id(line + 1), r));
            state.record_count = line + 1;
        }
        Ok(())
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn store_dir(&self) -> &Path {
        &self.dir
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn annotators_per_caption(&self) -> usize {
        self.k
    }

    /// The first pending task in the annotator's queue. Repeated calls
    /// return the same task until it is submitted.
    pub fn next_task(&self, annotator: &str) -> Result<NextTask, ServiceError> {
        let state = self.lock();
        let queue = state.queues.get(annotator).ok_or_else(|| ServiceError::UnknownAnnotator(annotator.into()))?;
        let mut pending = queue.iter().map(|&i| &state.tasks[i]).filter(|t| t.status == TaskStatus::Pending);
        let task = pending.next().map(TaskView::from);
        let remaining = usize::from(task.is_some()) + pending.count();
        Ok(NextTask { task, remaining })
    }

    pub fn caption(&self, task_id: &str) -> Result<CaptionPayload, ServiceError> {
        let state = self.lock();
        let &i = state.by_id.get(task_id).ok_or_else(|| ServiceError::UnknownTask(task_id.into()))?;
        let task = &state.tasks[i];
        let doc = &self.captions[&task.key()];
        Ok(CaptionPayload {
            task_id: task.task_id.clone(),
            video_id: task.video_id.clone(),
            video_url: self.videos.get(&task.video_id).and_then(|v| v.url.clone()),
            status: task.status,
            sentences: doc
                .sentences
                .iter()
                .enumerate()
                .map(|(index, s)| SentencePayload { index, text: s.raw.clone(), tokens: s.tokens.clone() })
                .collect(),
            submitted: state.records.get(&i).map(|(_, r)| SubmittedLabels {
                paragraph_score: r.paragraph_score,
                sentences: r.sentence_labels.clone(),
            }),
        })
    }

    fn resolve(&self, state: &State, sub: &Submission) -> Result<usize, ServiceError> {
        if !state.queues.contains_key(&sub.annotator_id) {
            return Err(ServiceError::UnknownAnnotator(sub.annotator_id.clone()));
        }
        let i = match (&sub.task_id, &sub.video_id, &sub.model_id) {
            (Some(id), _, _) => *state
                .by_id
                .get(id)
                .ok_or_else(|| ServiceError::Conflict(format!("no assignment {id}")))?,
            (None, Some(v), Some(m)) => *state
                .by_key
                .get(&(sub.annotator_id.clone(), CaptionKey::new(v, m)))
                .ok_or_else(|| ServiceError::Conflict(format!("{v}/{m} is not assigned to {}", sub.annotator_id)))?,
            _ => {
                return Err(ServiceError::Validation(vec![FieldError {
                    field: "task_id".into(),
                    message: "give task_id, or video_id and model_id".into(),
                }]))
            }
        };
        let t = &state.tasks[i];
        if t.annotator_id != sub.annotator_id {
            return Err(ServiceError::Conflict(format!("task {} is assigned to another annotator", t.task_id)));
        }
        if sub.video_id.as_ref().is_some_and(|v| *v != t.video_id) || sub.model_id.as_ref().is_some_and(|m| *m != t.model_id) {
            return Err(ServiceError::Conflict(format!("task {} is for a different caption", t.task_id)));
        }
        Ok(i)
    }

    /// Validate and persist a submission. A second submission for the same
    /// task supersedes the first.
    pub fn submit(&self, sub: Submission) -> Result<Accepted, ServiceError> {
        let mut state = self.lock();
        let i = self.resolve(&state, &sub)?;
        let task = state.tasks[i].clone();
        let record = AnnotationRecord {
            annotator_id: sub.annotator_id,
            video_id: task.video_id.clone(),
            model_id: task.model_id.clone(),
            paragraph_score: sub.paragraph_score,
            sentence_labels: sub.sentences,
        };
        validate_annotation(&record, &self.captions[&task.key()]).map_err(ServiceError::Validation)?;
        append_jsonl(&self.dir.join(ANNOTATIONS_FILE), std::slice::from_ref(&record))?;
        state.record_count += 1;
        let id = record_id(state.record_count);
        let replaced = state.records.insert(i, (id.clone(), record)).is_some();
        if replaced {
            log::info!("task {} resubmitted by {}; {id} supersedes the earlier record", task.task_id, task.annotator_id);
        }
        if task.status == TaskStatus::Pending {
            let done = TaskAssignment { status: TaskStatus::Submitted, ..task.clone() };
            append_jsonl(&self.dir.join(ASSIGNMENTS_FILE), std::slice::from_ref(&done))?;
            state.tasks[i].status = TaskStatus::Submitted;
        }
        Ok(Accepted { record_id: id, task_id: task.task_id, replaced })
    }

    pub fn progress(&self) -> Progress {
        let state = self.lock();
        let mut tasks = StatusCounts::default();
        let mut per_annotator: BTreeMap<String, StatusCounts> = BTreeMap::new();
        for t in &state.tasks {
            let entry = per_annotator.entry(t.annotator_id.clone()).or_default();
            match t.status {
                TaskStatus::Pending => {
                    tasks.pending += 1;
                    entry.pending += 1;
                }
                TaskStatus::Submitted => {
                    tasks.submitted += 1;
                    entry.submitted += 1;
                }
            }
        }
        let captions: BTreeSet<CaptionKey> = state.tasks.iter().map(TaskAssignment::key).collect();
        Progress {
            annotators_per_caption: self.k,
            captions: captions.len(),
            complete_captions: state.complete_captions(self.k).len(),
            tasks,
            per_annotator,
        }
    }

    /// Latest record per task, in task order.
    pub fn latest_annotations(&self) -> Vec<AnnotationRecord> {
        let state = self.lock();
        let mut ids: Vec<&usize> = state.records.keys().collect();
        ids.sort();
        ids.into_iter().map(|i| state.records[i].1.clone()).collect()
    }

    /// The corpus restricted to captions with all `k` submissions.
    pub fn complete_corpus(&self) -> Corpus {
        let state = self.lock();
        let complete = state.complete_captions(self.k);
        let mut ids: Vec<&usize> = state.records.keys().collect();
        ids.sort();
        Corpus {
            captions: complete.iter().map(|k| self.captions[k].clone()).collect(),
            annotations: ids
                .into_iter()
                .map(|i| &state.records[i].1)
                .filter(|r| complete.contains(&r.key()))
                .cloned()
                .collect(),
            ..Default::default()
        }
    }

    pub fn live_agreement(&self) -> LiveAgreement {
        let corpus = self.complete_corpus();
        let n = corpus.captions.len();
        let insufficient = |detail: Option<String>| LiveAgreement {
            status: INSUFFICIENT_DATA.into(),
            complete_captions: n,
            report: None,
            detail,
        };
        if n == 0 {
            return insufficient(None);
        }
        match agreement(&corpus) {
            Ok(report) => LiveAgreement { status: "ok".into(), complete_captions: n, report: Some(report), detail: None },
            Err(e) => insufficient(Some(e.to_string())),
        }
    }
}

fn record_id(line: usize) -> String {
    format!("r{line:06}")
}
