//! Refinement sessions: the accept/edit/repair policy, per-iteration memory,
//! append-only persistence and the build hand-off.
//!
//! A session directory holds `bundle.json`, `events.jsonl` (one JSON event
//! per line, never rewritten) and, once built, `model.obj`,
//! `script.py.txt` and `plan.json`.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bim::{build, compile, emit_script_text, export_obj, BuildError, BuildPlan, CompileError};
use crate::edit::{parse_feedback, EditCommand, EditError, FeedbackAgent, GrammarAgent};
use crate::eval::{score_snapshots, EvalError, IterationTrace};
use crate::extract::{extract_layout, ExtractOptions, SketchBundle, StageError};
use crate::layout::hex_digest;
use crate::validate::{auto_repair, validate, ValidationReport};
use crate::Layout;

/// Hough vote thresholds tried by successive bare rejections.
pub const REJECT_SUPPORT_SCHEDULE: [usize; 6] = [16, 24, 12, 28, 18, 22];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    AwaitFeedback,
    Finalized,
    Building,
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackEntry {
    /// Iteration this feedback produced.
    pub iteration: usize,
    pub text: String,
    pub commands: Vec<EditCommand>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub layout: Layout,
    pub report: Option<ValidationReport>,
    #[serde(default)]
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMemory {
    /// Digest of the sketch bundle.
    pub input_id: String,
    pub summary: String,
    pub current_layout: Layout,
    pub feedback_history: Vec<FeedbackEntry>,
    /// Latest validation report.
    pub constraints: ValidationReport,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub phase: Phase,
    pub memory: SessionMemory,
}

/// Everything a session has recorded; the `eval-session` input format.
/// Only `snapshots[].layout` is required when reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    #[serde(default)]
    pub session_id: String,
    #[serde(default)]
    pub input_id: String,
    #[serde(default)]
    pub summary: String,
    #[serde(default = "default_phase")]
    pub phase: Phase,
    pub snapshots: Vec<Snapshot>,
    #[serde(default)]
    pub feedback: Vec<FeedbackEntry>,
    #[serde(default)]
    pub extraction_warnings: Vec<String>,
}

fn default_phase() -> Phase {
    Phase::AwaitFeedback
}

impl SessionLog {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("logs serialize")
    }
}

/// Scores every snapshot of a session log against ground truth.
pub fn score_session(log: &SessionLog, gt: &Layout) -> Result<IterationTrace, EvalError> {
    let layouts: Vec<Layout> = log.snapshots.iter().map(|s| s.layout.clone()).collect();
    score_snapshots(&layouts, gt)
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no session {0}")]
    UnknownSession(String),
    #[error("session is {actual:?}; this needs {expected}")]
    PhaseViolation { expected: &'static str, actual: Phase },
    #[error("extraction failed at {0}")]
    Extract(#[from] StageError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("session was opened from a layout; there is no sketch to re-extract")]
    NoSketch,
    #[error("session storage: {0}")]
    Io(String),
}

impl From<std::io::Error> for SessionError {
    fn from(e: std::io::Error) -> Self {
        SessionError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    Start {
        session_id: String,
        input_id: String,
        summary: String,
        warnings: Vec<String>,
        snapshot: Snapshot,
    },
    Feedback {
        entry: FeedbackEntry,
        snapshot: Snapshot,
        phase: Phase,
        rejects: usize,
    },
    Built {
        timestamp_ms: u64,
        repairs: usize,
        warnings: Vec<String>,
    },
}

/// Files produced by a build.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub obj: Vec<u8>,
    pub script: String,
    pub plan: BuildPlan,
    pub repairs: usize,
    pub warnings: Vec<String>,
}

impl Artifacts {
    pub const FILES: [&'static str; 3] = ["model.obj", "script.py.txt", "plan.json"];

    pub fn plan_json(&self) -> String {
        self.plan.to_json_pretty()
    }
}

#[derive(Debug)]
struct Session {
    id: String,
    phase: Phase,
    bundle: Option<SketchBundle>,
    summary: String,
    input_id: String,
    extraction_warnings: Vec<String>,
    snapshots: Vec<Snapshot>,
    feedback: Vec<FeedbackEntry>,
    rejects: usize,
    artifacts: Option<Artifacts>,
    dir: Option<PathBuf>,
}

impl Session {
    fn current(&self) -> &Snapshot {
        self.snapshots.last().expect("sessions start with a snapshot")
    }

    fn report(&self) -> ValidationReport {
        self.current().report.clone().unwrap_or_else(|| validate(&self.current().layout))
    }

    fn state(&self) -> SessionState {
        SessionState {
            phase: self.phase,
            memory: SessionMemory {
                input_id: self.input_id.clone(),
                summary: self.summary.clone(),
                current_layout: self.current().layout.clone(),
                feedback_history: self.feedback.clone(),
                constraints: self.report(),
                iteration: self.feedback.len(),
            },
        }
    }

    fn log(&self) -> SessionLog {
        SessionLog {
            session_id: self.id.clone(),
            input_id: self.input_id.clone(),
            summary: self.summary.clone(),
            phase: self.phase,
            snapshots: self.snapshots.clone(),
            feedback: self.feedback.clone(),
            extraction_warnings: self.extraction_warnings.clone(),
        }
    }

    fn append(&self, event: &Event) -> Result<(), SessionError> {
        if let Some(dir) = &self.dir {
            let mut f = OpenOptions::new().create(true).append(true).open(dir.join("events.jsonl"))?;
            let line = serde_json::to_string(event).expect("events serialize");
            writeln!(f, "{line}")?;
            f.sync_data()?;
        }
        Ok(())
    }

    fn apply(&mut self, event: Event) {
        match event {
            Event::Start { .. } => {}
            Event::Feedback {
                entry,
                snapshot,
                phase,
                rejects,
            } => {
                self.feedback.push(entry);
                self.snapshots.push(snapshot);
                self.phase = phase;
                self.rejects = rejects;
            }
            Event::Built { .. } => self.phase = Phase::Done,
        }
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Validates, repairs once when invalid, and re-validates.
fn checked(layout: Layout) -> (Layout, ValidationReport, Vec<String>) {
    let report = validate(&layout);
    if report.passes {
        return (layout, report, Vec::new());
    }
    let repaired = auto_repair(&layout, &report);
    let after = validate(&repaired);
    let notes = vec![format!(
        "auto-repair: {} violations before, {} after",
        report.violations.len(),
        after.violations.len()
    )];
    (repaired, after, notes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Started {
    pub session_id: String,
    pub layout: Layout,
    pub summary: String,
    pub report: ValidationReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackResult {
    pub phase: Phase,
    pub iteration: usize,
    pub layout: Layout,
    pub report: ValidationReport,
    pub warnings: Vec<String>,
}

/// Holds every live session. Calls on one session are serialized by its own
/// lock; different sessions proceed in parallel.
pub struct SessionManager {
    root: Option<PathBuf>,
    extract: ExtractOptions,
    agent: Arc<dyn FeedbackAgent>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    next: Mutex<usize>,
}

impl SessionManager {
    /// Sessions kept in memory only.
    pub fn in_memory() -> Self {
        Self::build(None, ExtractOptions::default())
    }

    /// Sessions persisted under `root`; existing session directories are
    /// reloaded.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, SessionError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        let m = Self::build(Some(root.clone()), ExtractOptions::default());
        let mut dirs: Vec<PathBuf> = fs::read_dir(&root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("events.jsonl").is_file())
            .collect();
        dirs.sort();
        for d in dirs {
            let s = load_session(&d)?;
            let mut sessions = m.sessions.write().expect("lock");
            sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
        }
        let last = m
            .ids()
            .iter()
            .filter_map(|id| id.get(1..5).and_then(|n| n.parse::<usize>().ok()))
            .max()
            .unwrap_or(0);
        *m.next.lock().expect("lock") = last + 1;
        Ok(m)
    }

    fn build(root: Option<PathBuf>, extract: ExtractOptions) -> Self {
        Self {
            root,
            extract,
            agent: Arc::new(GrammarAgent),
            sessions: RwLock::new(BTreeMap::new()),
            next: Mutex::new(1),
        }
    }

    pub fn with_extract_options(mut self, opts: ExtractOptions) -> Self {
        self.extract = opts;
        self
    }

    pub fn with_agent(mut self, agent: Arc<dyn FeedbackAgent>) -> Self {
        self.agent = agent;
        self
    }

    pub fn ids(&self) -> Vec<String> {
        self.sessions.read().expect("lock").keys().cloned().collect()
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    /// Extracts, validates (repairing once) and stores snapshot 0.
    pub fn start_session(&self, bundle: SketchBundle) -> Result<Started, SessionError> {
        let ex = extract_layout(&bundle, &self.extract)?;
        let input_id = hex_digest(bundle.to_json().as_bytes());
        self.open_session(Some(bundle), input_id, ex.layout, ex.summary, ex.warnings)
    }

    /// Opens a session on an existing layout document instead of a sketch.
    /// A bare Reject has nothing to re-extract in such a session.
    pub fn start_from_layout(&self, layout: Layout) -> Result<Started, SessionError> {
        let input_id = layout.digest();
        let summary = crate::extract::summarize(&layout);
        self.open_session(None, input_id, layout, summary, Vec::new())
    }

    fn open_session(
        &self,
        bundle: Option<SketchBundle>,
        input_id: String,
        layout: Layout,
        summary: String,
        mut warnings: Vec<String>,
    ) -> Result<Started, SessionError> {
        let (layout, report, notes) = checked(layout);
        warnings.extend(notes);
        let id = {
            let mut n = self.next.lock().expect("lock");
            let id = format!("s{:04}-{}", *n, &input_id[..8]);
            *n += 1;
            id
        };
        let dir = match &self.root {
            Some(root) => {
                let d = root.join(&id);
                fs::create_dir_all(&d)?;
                if let Some(b) = &bundle {
                    fs::write(d.join("bundle.json"), b.to_json())?;
                }
                Some(d)
            }
            None => None,
        };
        let snapshot = Snapshot {
            iteration: 0,
            layout: layout.clone(),
            report: Some(report.clone()),
            timestamp_ms: now_ms(),
        };
        let session = Session {
            id: id.clone(),
            phase: Phase::AwaitFeedback,
            bundle,
            summary: summary.clone(),
            input_id: input_id.clone(),
            extraction_warnings: warnings.clone(),
            snapshots: vec![snapshot.clone()],
            feedback: Vec::new(),
            rejects: 0,
            artifacts: None,
            dir,
        };
        session.append(&Event::Start {
            session_id: id.clone(),
            input_id,
            summary: summary.clone(),
            warnings: warnings.clone(),
            snapshot,
        })?;
        self.sessions
            .write()
            .expect("lock")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(Started {
            session_id: id,
            layout,
            summary,
            report,
            warnings,
        })
    }

    /// One step of the refinement policy. Accept on a valid layout
    /// finalizes; on an invalid one the layout is repaired and stays open.
    /// Edits apply to the current layout, repaired first when invalid. A
    /// bare Reject re-extracts with the next vote threshold. Parse and edit
    /// errors leave the session untouched.
    pub fn submit_feedback(&self, id: &str, text: &str) -> Result<FeedbackResult, SessionError> {
        let handle = self.get(id)?;
        let mut s = handle.lock().expect("lock");
        if s.phase != Phase::AwaitFeedback {
            return Err(SessionError::PhaseViolation {
                expected: "AwaitFeedback",
                actual: s.phase,
            });
        }
        let commands = parse_feedback(text)?;
        let current = s.current().layout.clone();
        let report = s.report();
        let mut warnings = Vec::new();
        let mut phase = Phase::AwaitFeedback;
        let mut rejects = s.rejects;
        let accept = commands.iter().any(|c| matches!(c, EditCommand::Accept));
        let bare_reject = commands.iter().all(|c| matches!(c, EditCommand::Reject));

        let next = if accept && commands.iter().all(EditCommand::is_decision) {
            if report.passes {
                phase = Phase::Finalized;
                current
            } else {
                warnings.push(format!(
                    "not finalized: {} violations",
                    report.violations.len()
                ));
                auto_repair(&current, &report)
            }
        } else if bare_reject {
            let support_min = REJECT_SUPPORT_SCHEDULE[rejects % REJECT_SUPPORT_SCHEDULE.len()];
            rejects += 1;
            let opts = ExtractOptions {
                support_min,
                seed: rejects as u64,
                ..self.extract.clone()
            };
            let bundle = s.bundle.as_ref().ok_or(SessionError::NoSketch)?;
            let ex = extract_layout(bundle, &opts)?;
            warnings.push(format!("re-extracted with vote threshold {support_min}"));
            warnings.extend(ex.warnings);
            ex.layout
        } else {
            let base = if report.passes {
                current
            } else {
                warnings.push(format!("repaired {} violations before editing", report.violations.len()));
                auto_repair(&current, &report)
            };
            let out = self.agent.refine(&base, text, &s.summary)?;
            warnings.extend(out.warnings);
            out.new_layout
        };
        let (layout, report, notes) = if phase == Phase::Finalized {
            (next, report, Vec::new())
        } else {
            checked(next)
        };
        warnings.extend(notes);
        if phase != Phase::Finalized && !report.passes {
            warnings.extend(report.violations.iter().map(|v| format!("{}: {}", v.code.as_str(), v.message)));
        }
        let iteration = s.feedback.len() + 1;
        let ts = now_ms();
        let entry = FeedbackEntry {
            iteration,
            text: text.to_string(),
            commands,
            warnings: warnings.clone(),
            timestamp_ms: ts,
        };
        let snapshot = Snapshot {
            iteration,
            layout: layout.clone(),
            report: Some(report.clone()),
            timestamp_ms: ts,
        };
        let event = Event::Feedback {
            entry,
            snapshot,
            phase,
            rejects,
        };
        s.append(&event)?;
        s.apply(event);
        Ok(FeedbackResult {
            phase,
            iteration,
            layout,
            report,
            warnings,
        })
    }

    /// Shorthand for submitting "Accept".
    pub fn finalize(&self, id: &str) -> Result<FeedbackResult, SessionError> {
        self.submit_feedback(id, "Accept")
    }

    /// Compiles, checks, executes with repair and stores the model, script
    /// and plan. Allowed once finalized, and again after a build.
    pub fn finalize_and_build(&self, id: &str) -> Result<Artifacts, SessionError> {
        let handle = self.get(id)?;
        let mut s = handle.lock().expect("lock");
        if !matches!(s.phase, Phase::Finalized | Phase::Done) {
            return Err(SessionError::PhaseViolation {
                expected: "Finalized",
                actual: s.phase,
            });
        }
        let previous = s.phase;
        s.phase = Phase::Building;
        let result = build_artifacts(&s.current().layout);
        let art = match result {
            Ok(a) => a,
            Err(e) => {
                s.phase = previous;
                return Err(e);
            }
        };
        if let Some(dir) = &s.dir {
            let write = || -> std::io::Result<()> {
                fs::write(dir.join("model.obj"), &art.obj)?;
                fs::write(dir.join("script.py.txt"), &art.script)?;
                fs::write(dir.join("plan.json"), art.plan_json())
            };
            if let Err(e) = write() {
                s.phase = previous;
                return Err(e.into());
            }
        }
        let event = Event::Built {
            timestamp_ms: now_ms(),
            repairs: art.repairs,
            warnings: art.warnings.clone(),
        };
        if let Err(e) = s.append(&event) {
            s.phase = previous;
            return Err(e);
        }
        s.apply(event);
        s.artifacts = Some(art.clone());
        Ok(art)
    }

    pub fn state(&self, id: &str) -> Result<SessionState, SessionError> {
        Ok(self.get(id)?.lock().expect("lock").state())
    }

    pub fn layout(&self, id: &str) -> Result<Layout, SessionError> {
        Ok(self.get(id)?.lock().expect("lock").current().layout.clone())
    }

    pub fn session_log(&self, id: &str) -> Result<SessionLog, SessionError> {
        Ok(self.get(id)?.lock().expect("lock").log())
    }

    /// The built model; rebuilt from the final layout after a reload.
    pub fn model_obj(&self, id: &str) -> Result<Vec<u8>, SessionError> {
        let handle = self.get(id)?;
        let mut s = handle.lock().expect("lock");
        if s.phase != Phase::Done {
            return Err(SessionError::PhaseViolation {
                expected: "Done",
                actual: s.phase,
            });
        }
        if s.artifacts.is_none() {
            s.artifacts = Some(build_artifacts(&s.current().layout)?);
        }
        Ok(s.artifacts.as_ref().expect("set above").obj.clone())
    }
}

/// Compile, static check, execute with repair, and render the artifacts.
pub fn build_artifacts(layout: &Layout) -> Result<Artifacts, SessionError> {
    let plan = compile(layout)?;
    let out = build(&plan, Some(layout))?;
    Ok(Artifacts {
        obj: export_obj(&out.model),
        script: emit_script_text(&out.plan),
        plan: out.plan,
        repairs: out.repairs,
        warnings: out.warnings,
    })
}

fn load_session(dir: &Path) -> Result<Session, SessionError> {
    let path = dir.join("bundle.json");
    let bundle = if path.is_file() {
        let b = SketchBundle::from_json(&fs::read_to_string(&path)?)
            .map_err(|e| SessionError::Io(format!("{}: {e}", dir.display())))?;
        Some(b)
    } else {
        None
    };
    let text = fs::read_to_string(dir.join("events.jsonl"))?;
    let mut events = text.lines().filter(|l| !l.trim().is_empty()).map(|l| {
        serde_json::from_str::<Event>(l).map_err(|e| SessionError::Io(format!("{}: {e}", dir.display())))
    });
    let Some(Event::Start {
        session_id,
        input_id,
        summary,
        warnings,
        snapshot,
    }) = events.next().transpose()?
    else {
        return Err(SessionError::Io(format!("{}: log does not begin with a start event", dir.display())));
    };
    let mut s = Session {
        id: session_id,
        phase: Phase::AwaitFeedback,
        bundle,
        summary,
        input_id,
        extraction_warnings: warnings,
        snapshots: vec![snapshot],
        feedback: Vec::new(),
        rejects: 0,
        artifacts: None,
        dir: Some(dir.to_path_buf()),
    };
    for e in events {
        s.apply(e?);
    }
    Ok(s)
}
