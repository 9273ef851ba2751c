use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A state, label or rm-state index outside the object it was used with.
    #[error("unknown {kind} `{name}`")]
    Domain { kind: &'static str, name: String },

    #[error("transition undefined for label `{label}` at state `{state}`")]
    TransitionUndefined { state: String, label: String },

    /// Structural problems in a constructed or parsed object.
    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// A caller broke an operation's precondition (infeasible action,
    /// empty action set handed to the chooser, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("state space exceeds the cap of {cap} states")]
    ResourceCap { cap: usize },

    /// The runtime filter let a controllable action reach a violation state.
    #[error("supervisor bug: controllable action `{action}` reaches a violation state")]
    SupervisorBug { action: String },

    /// An uncontrollable action drove a spec into a violation state.
    #[error("controllability violation: uncontrollable action `{action}` after `{trace}`")]
    ControllabilityViolation { action: String, trace: String },

    /// The plant and specs fail the controllability check.
    #[error("specs are not controllable; counterexample: {counterexample}")]
    Uncontrollable { counterexample: String },

    #[error("{path}:{line}: {reason}")]
    Parse { path: String, line: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("incompatible bank: {0}")]
    Incompatible(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation { what, reason: reason.into() }
    }

    pub(crate) fn parse(path: &str, line: usize, reason: impl Into<String>) -> Self {
        Error::Parse { path: path.to_string(), line, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
