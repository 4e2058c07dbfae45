//! Knowledge base engine for social practice agents.
//!
//! A world is a tree of activities (connected by `allOf` generalisation and
//! `partOf` composition edges), a set of agents, context cues and values, and
//! the weighted associations among them: beliefs, habitual triggers, related
//! values and adhered values. On top of the in-memory [`KnowledgeBase`] this
//! crate provides
//!
//! - [`validate`]: structural rule checking with a deterministic report,
//! - [`inference`]: bottom-up value inheritance, `same` view closure and
//!   social view queries,
//! - [`decision`]: stepwise descent of the activity tree that contrasts
//!   habitual (context-cue driven) and intentional (value driven) choice.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, serialization and the
//! command line live in the `sopra` crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod decision;
mod error;
pub mod inference;
pub mod model;
pub mod scenarios;
mod tree;
mod unionfind;
pub mod validate;

pub use decision::{
    decide, explain, habit_activation, intentional_score, BeliefFilter, DecisionConfig,
    EnactmentPlan, Explanation, Pathway, PerformanceContext,
};
pub use error::{EntityKind, Error, Result};
pub use inference::{
    common_ground, expected_values, infer_related_values, personal_views, same_closure,
    shared_views, InferredValueTable, ViewPartition,
};
pub use model::{
    Activity, ActivityType, AdheredValue, Agent, Belief, ContextCue, CueKind, HabitualTrigger,
    ImplType, Implementation, KnowledgeBase, Provenance, RelatedValue, SameLink, Value,
};
pub use validate::{validate, RuleId, Severity, ValidationReport, Violation};
