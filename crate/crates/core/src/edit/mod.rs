//! Deterministic feedback editing: a controlled grammar turns user text into
//! [`EditCommand`]s which are applied to a layout one at a time.

pub mod apply;
pub mod grammar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::Layout;

pub use apply::apply_command;
pub use grammar::{parse_feedback, AddSpec, Direction, EditCommand, EndRef, EndSelector, KeepConstraint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("feedback is empty")]
    EmptyFeedback,
    #[error("cannot parse \"{clause}\": {reason} ({suggestion})")]
    UnparsableClause {
        clause: String,
        reason: String,
        suggestion: String,
    },
    #[error("no element {0} in the layout")]
    UnknownTarget(String),
    #[error("{target} cannot be used here: {reason}")]
    InvalidTarget { target: String, reason: String },
    #[error("geometrically impossible: {0}")]
    GeometricallyImpossible(String),
    #[error("id {0} is already taken")]
    IdConflict(String),
}

impl EditError {
    pub fn kind(&self) -> &'static str {
        match self {
            EditError::EmptyFeedback => "EmptyFeedback",
            EditError::UnparsableClause { .. } => "UnparsableClause",
            EditError::UnknownTarget(_) => "UnknownTarget",
            EditError::InvalidTarget { .. } => "InvalidTarget",
            EditError::GeometricallyImpossible(_) => "GeometricallyImpossible",
            EditError::IdConflict(_) => "IdConflict",
        }
    }
}

/// A single command's result.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub layout: Layout,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackOutcome {
    pub new_layout: Layout,
    pub applied: Vec<EditCommand>,
    pub warnings: Vec<String>,
}

/// Parses `text` and applies every command in clause order. Any failure
/// aborts the whole batch; the caller's layout is never touched.
pub fn apply_feedback(layout: &Layout, text: &str) -> Result<FeedbackOutcome, EditError> {
    let cmds = parse_feedback(text)?;
    let mut current = layout.clone();
    let mut warnings = Vec::new();
    for cmd in &cmds {
        let a = apply_command(&current, cmd)?;
        current = a.layout;
        warnings.extend(a.warnings);
    }
    Ok(FeedbackOutcome {
        new_layout: current,
        applied: cmds,
        warnings,
    })
}

/// Refines a layout from user feedback. `summary` is the session's running
/// description of earlier iterations; the grammar agent ignores it, model
/// backed agents may use it.
pub trait FeedbackAgent: Send + Sync {
    fn refine(&self, layout: &Layout, feedback: &str, summary: &str) -> Result<FeedbackOutcome, EditError>;
}

/// The built-in deterministic agent.
#[derive(Debug, Clone, Copy, Default)]
pub struct GrammarAgent;

impl FeedbackAgent for GrammarAgent {
    fn refine(&self, layout: &Layout, feedback: &str, _summary: &str) -> Result<FeedbackOutcome, EditError> {
        apply_feedback(layout, feedback)
    }
}
