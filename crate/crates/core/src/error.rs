use alloc::string::String;
use core::fmt;

/// Kinds of entity and association records held by a knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    /// An activity node.
    Activity,
    /// An implementation edge.
    Implementation,
    /// An agent.
    Agent,
    /// A context cue.
    ContextCue,
    /// A value.
    Value,
    /// A belief of an agent in an activity view.
    Belief,
    /// A habitual trigger between an activity and a cue.
    HabitualTrigger,
    /// A related value between an activity and a value.
    RelatedValue,
    /// An adhered value between an agent and a value.
    AdheredValue,
    /// A `same` link between two activity views.
    SameLink,
    /// Anything a habitual trigger may name as its cue: a context cue, an
    /// agent or an activity.
    Cue,
}

impl EntityKind {
    /// Name used in messages.
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Activity => "activity",
            EntityKind::Implementation => "implementation",
            EntityKind::Agent => "agent",
            EntityKind::ContextCue => "context cue",
            EntityKind::Value => "value",
            EntityKind::Belief => "belief",
            EntityKind::HabitualTrigger => "habitual trigger",
            EntityKind::RelatedValue => "related value",
            EntityKind::AdheredValue => "adhered value",
            EntityKind::SameLink => "same link",
            EntityKind::Cue => "cue",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Errors raised by knowledge base operations.
///
/// Rule violations found by the validator are data (see
/// [`crate::validate::Violation`]), not errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An id did not resolve to an entity of the expected kind.
    #[error("unknown {kind} `{id}`")]
    UnknownId {
        /// Expected kind.
        kind: EntityKind,
        /// The id that failed to resolve.
        id: String,
    },
    /// A record with the same key already exists.
    #[error("duplicate {kind} `{key}`")]
    Duplicate {
        /// Kind of record.
        kind: EntityKind,
        /// Rendered key of the record.
        key: String,
    },
    /// The operation requires a property the input does not have, such as a
    /// valid activity tree.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// An invariant the engine relies on did not hold.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn unknown(kind: EntityKind, id: &str) -> Self {
        Error::UnknownId {
            kind,
            id: id.into(),
        }
    }
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
