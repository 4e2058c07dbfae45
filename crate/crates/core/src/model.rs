//! Domain types and the in-memory knowledge base.
//!
//! Entities are identified by string id. Association records are keyed by
//! the ids they connect, so each pair appears at most once. Insertion only
//! rejects duplicate keys; referential integrity, strength ranges and the
//! tree rules are checked by [`crate::validate`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{EntityKind, Error, Result};

/// Position of an activity in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityType {
    /// A leaf.
    Action,
    /// An interior node.
    AbstractAction,
    /// The root.
    TopAction,
}

/// Kind of an implementation edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ImplType {
    /// The child is one way of doing the parent.
    AllOf,
    /// The child is one of the parts that together complete the parent.
    PartOf,
}

/// What a context cue is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CueKind {
    /// A physical object.
    Object,
    /// A place.
    Location,
    /// An agent; the cue id must be a declared agent.
    Agent,
    /// An activity; the cue id must be a declared activity.
    Activity,
}

/// Whether a related value was stated in the input or computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    /// Stated in the input.
    Asserted,
    /// Produced by value inheritance.
    Inferred,
}

/// Error returned when an enum name is not recognised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName(pub String);

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown name `{}`", self.0)
    }
}

macro_rules! named_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            /// Canonical name as written in scenario files.
            pub fn as_str(self) -> &'static str {
                match self {
                    $($ty::$variant => $name),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = UnknownName;

            /// Names are matched case-insensitively.
            fn from_str(s: &str) -> core::result::Result<Self, UnknownName> {
                $(if s.eq_ignore_ascii_case($name) {
                    return Ok($ty::$variant);
                })+
                Err(UnknownName(s.into()))
            }
        }
    };
}

named_enum!(ActivityType {
    Action => "Action",
    AbstractAction => "AbstractAction",
    TopAction => "TopAction",
});
named_enum!(ImplType { AllOf => "allOf", PartOf => "partOf" });
named_enum!(CueKind {
    Object => "object",
    Location => "location",
    Agent => "agent",
    Activity => "activity",
});
named_enum!(Provenance {
    Asserted => "asserted",
    Inferred => "inferred",
});

/// A node of the activity tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Activity {
    /// Unique id.
    pub id: String,
    /// Display name.
    pub label: String,
    /// Type stated in the input, if any. The effective type is always derived
    /// from the tree; a stated type is only cross-checked.
    pub declared_type: Option<ActivityType>,
}

impl Activity {
    /// An activity whose label equals its id and with no stated type.
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Activity {
            label: id.clone(),
            id,
            declared_type: None,
        }
    }

    /// Sets the stated type.
    pub fn with_type(mut self, ty: ActivityType) -> Self {
        self.declared_type = Some(ty);
        self
    }
}

/// An edge of the activity tree from `child` up to `parent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implementation {
    /// Child activity id.
    pub child: String,
    /// Parent activity id.
    pub parent: String,
    /// Edge kind.
    pub kind: ImplType,
}

/// An agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    /// Unique id.
    pub id: String,
    /// Habit acquisition rate in `[0, 1]`. Stored and round-tripped only.
    pub habit_rate: f64,
}

/// An element of the setting that can trigger activities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextCue {
    /// Unique id.
    pub id: String,
    /// What the cue is.
    pub kind: CueKind,
}

/// A value such as comfort or environmentalism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Value {
    /// Unique id.
    pub id: String,
    /// Display name.
    pub label: String,
}

impl Value {
    /// A value whose label equals its id.
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Value {
            label: id.clone(),
            id,
        }
    }
}

/// An agent's belief in one view of an activity.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    /// Agent id.
    pub agent: String,
    /// Activity id.
    pub activity: String,
    /// How much the agent itself agrees with the view.
    pub personal: f64,
    /// How much the agent thinks others agree with the view.
    pub shared: f64,
}

/// A cue that habitually triggers an activity.
#[derive(Debug, Clone, PartialEq)]
pub struct HabitualTrigger {
    /// Activity id.
    pub activity: String,
    /// Context cue, agent or activity id.
    pub cue: String,
    /// Trigger strength.
    pub strength: f64,
}

/// How strongly an activity promotes a value.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatedValue {
    /// Activity id.
    pub activity: String,
    /// Value id.
    pub value: String,
    /// Strength of the relation.
    pub strength: f64,
    /// Asserted or inferred.
    pub provenance: Provenance,
}

/// How much an agent values a value.
#[derive(Debug, Clone, PartialEq)]
pub struct AdheredValue {
    /// Agent id.
    pub agent: String,
    /// Value id.
    pub value: String,
    /// Strength of adherence.
    pub strength: f64,
}

/// Two activity views of the same bodily movement. Unordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SameLink {
    /// First activity id; never greater than `b`.
    pub a: String,
    /// Second activity id.
    pub b: String,
}

impl SameLink {
    /// Builds a link with its ends in canonical order.
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            SameLink { a, b }
        } else {
            SameLink { a: b, b: a }
        }
    }
}

type Pair = (String, String);

/// The complete loaded world.
///
/// Every collection is keyed and ordered, so iteration is deterministic and
/// two knowledge bases holding the same records compare equal regardless of
/// insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    activities: BTreeMap<String, Activity>,
    implementations: BTreeMap<Pair, Implementation>,
    agents: BTreeMap<String, Agent>,
    context_cues: BTreeMap<String, ContextCue>,
    values: BTreeMap<String, Value>,
    beliefs: BTreeMap<Pair, Belief>,
    habitual_triggers: BTreeMap<Pair, HabitualTrigger>,
    related_values: BTreeMap<(String, String, Provenance), RelatedValue>,
    adhered_values: BTreeMap<Pair, AdheredValue>,
    same_links: BTreeSet<SameLink>,
}

fn pair_key(a: &str, b: &str) -> String {
    let mut s = String::with_capacity(a.len() + b.len() + 3);
    s.push_str(a);
    s.push_str(" / ");
    s.push_str(b);
    s
}

fn insert_unique<K: Ord, V>(
    map: &mut BTreeMap<K, V>,
    key: K,
    value: V,
    kind: EntityKind,
    rendered: impl FnOnce() -> String,
) -> Result<()> {
    use alloc::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Occupied(_) => Err(Error::Duplicate {
            kind,
            key: rendered(),
        }),
        Entry::Vacant(slot) => {
            slot.insert(value);
            Ok(())
        }
    }
}

impl KnowledgeBase {
    /// An empty knowledge base.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an activity; fails if the id is taken.
    pub fn insert_activity(&mut self, activity: Activity) -> Result<()> {
        let id = activity.id.clone();
        insert_unique(
            &mut self.activities,
            id.clone(),
            activity,
            EntityKind::Activity,
            || id,
        )
    }

    /// Adds an implementation edge; fails if the `(child, parent)` pair exists.
    pub fn insert_implementation(&mut self, imp: Implementation) -> Result<()> {
        let key = (imp.child.clone(), imp.parent.clone());
        let rendered = pair_key(&imp.child, &imp.parent);
        insert_unique(
            &mut self.implementations,
            key,
            imp,
            EntityKind::Implementation,
            || rendered,
        )
    }

    /// Adds an agent; fails if the id is taken.
    pub fn insert_agent(&mut self, agent: Agent) -> Result<()> {
        let id = agent.id.clone();
        insert_unique(
            &mut self.agents,
            id.clone(),
            agent,
            EntityKind::Agent,
            || id,
        )
    }

    /// Adds a context cue; fails if the id is taken.
    pub fn insert_context_cue(&mut self, cue: ContextCue) -> Result<()> {
        let id = cue.id.clone();
        insert_unique(
            &mut self.context_cues,
            id.clone(),
            cue,
            EntityKind::ContextCue,
            || id,
        )
    }

    /// Adds a value; fails if the id is taken.
    pub fn insert_value(&mut self, value: Value) -> Result<()> {
        let id = value.id.clone();
        insert_unique(
            &mut self.values,
            id.clone(),
            value,
            EntityKind::Value,
            || id,
        )
    }

    /// Adds a belief; fails if the `(agent, activity)` pair exists.
    pub fn insert_belief(&mut self, belief: Belief) -> Result<()> {
        let key = (belief.agent.clone(), belief.activity.clone());
        let rendered = pair_key(&belief.agent, &belief.activity);
        insert_unique(&mut self.beliefs, key, belief, EntityKind::Belief, || {
            rendered
        })
    }

    /// Adds a habitual trigger; fails if the `(activity, cue)` pair exists.
    pub fn insert_habitual_trigger(&mut self, trigger: HabitualTrigger) -> Result<()> {
        let key = (trigger.activity.clone(), trigger.cue.clone());
        let rendered = pair_key(&trigger.activity, &trigger.cue);
        insert_unique(
            &mut self.habitual_triggers,
            key,
            trigger,
            EntityKind::HabitualTrigger,
            || rendered,
        )
    }

    /// Adds a related value; fails if the `(activity, value)` pair exists for
    /// the same provenance.
    pub fn insert_related_value(&mut self, rv: RelatedValue) -> Result<()> {
        let key = (rv.activity.clone(), rv.value.clone(), rv.provenance);
        let rendered = pair_key(&rv.activity, &rv.value);
        insert_unique(
            &mut self.related_values,
            key,
            rv,
            EntityKind::RelatedValue,
            || rendered,
        )
    }

    /// Adds an adhered value; fails if the `(agent, value)` pair exists.
    pub fn insert_adhered_value(&mut self, av: AdheredValue) -> Result<()> {
        let key = (av.agent.clone(), av.value.clone());
        let rendered = pair_key(&av.agent, &av.value);
        insert_unique(
            &mut self.adhered_values,
            key,
            av,
            EntityKind::AdheredValue,
            || rendered,
        )
    }

    /// Adds a `same` link; fails if the unordered pair exists.
    pub fn insert_same_link(&mut self, link: SameLink) -> Result<()> {
        let link = SameLink::new(link.a, link.b);
        let rendered = pair_key(&link.a, &link.b);
        if self.same_links.insert(link) {
            Ok(())
        } else {
            Err(Error::Duplicate {
                kind: EntityKind::SameLink,
                key: rendered,
            })
        }
    }

    /// Activity by id.
    pub fn activity(&self, id: &str) -> Option<&Activity> {
        self.activities.get(id)
    }

    /// Agent by id.
    pub fn agent(&self, id: &str) -> Option<&Agent> {
        self.agents.get(id)
    }

    /// Context cue by id.
    pub fn context_cue(&self, id: &str) -> Option<&ContextCue> {
        self.context_cues.get(id)
    }

    /// Value by id.
    pub fn value(&self, id: &str) -> Option<&Value> {
        self.values.get(id)
    }

    /// Belief of `agent` in `activity`.
    pub fn belief(&self, agent: &str, activity: &str) -> Option<&Belief> {
        self.beliefs.get(&(agent.into(), activity.into()))
    }

    /// Whether `id` names anything a habitual trigger may use as its cue.
    ///
    /// Agents and activities specialise context cues, so all three resolve.
    pub fn is_cue(&self, id: &str) -> bool {
        self.context_cues.contains_key(id)
            || self.agents.contains_key(id)
            || self.activities.contains_key(id)
    }

    /// All activities, ordered by id.
    pub fn activities(&self) -> impl Iterator<Item = &Activity> + '_ {
        self.activities.values()
    }

    /// All implementation edges, ordered by `(child, parent)`.
    pub fn implementations(&self) -> impl Iterator<Item = &Implementation> + '_ {
        self.implementations.values()
    }

    /// All agents, ordered by id.
    pub fn agents(&self) -> impl Iterator<Item = &Agent> + '_ {
        self.agents.values()
    }

    /// All context cues, ordered by id.
    pub fn context_cues(&self) -> impl Iterator<Item = &ContextCue> + '_ {
        self.context_cues.values()
    }

    /// All values, ordered by id.
    pub fn values(&self) -> impl Iterator<Item = &Value> + '_ {
        self.values.values()
    }

    /// All beliefs, ordered by `(agent, activity)`.
    pub fn beliefs(&self) -> impl Iterator<Item = &Belief> + '_ {
        self.beliefs.values()
    }

    /// Beliefs held by one agent, ordered by activity id.
    pub fn beliefs_of<'a>(&'a self, agent: &'a str) -> impl Iterator<Item = &'a Belief> + 'a {
        self.beliefs.values().filter(move |b| b.agent == agent)
    }

    /// All habitual triggers, ordered by `(activity, cue)`.
    pub fn habitual_triggers(&self) -> impl Iterator<Item = &HabitualTrigger> + '_ {
        self.habitual_triggers.values()
    }

    /// All related values, ordered by `(activity, value, provenance)`.
    pub fn related_values(&self) -> impl Iterator<Item = &RelatedValue> + '_ {
        self.related_values.values()
    }

    /// The related value for `(activity, value)` with the given provenance.
    pub fn related_value(
        &self,
        activity: &str,
        value: &str,
        provenance: Provenance,
    ) -> Option<&RelatedValue> {
        self.related_values
            .get(&(activity.into(), value.into(), provenance))
    }

    /// All adhered values, ordered by `(agent, value)`.
    pub fn adhered_values(&self) -> impl Iterator<Item = &AdheredValue> + '_ {
        self.adhered_values.values()
    }

    /// Adhered values of one agent, ordered by value id.
    pub fn adhered_values_of<'a>(
        &'a self,
        agent: &'a str,
    ) -> impl Iterator<Item = &'a AdheredValue> + 'a {
        self.adhered_values
            .values()
            .filter(move |a| a.agent == agent)
    }

    /// All stored `same` links.
    pub fn same_links(&self) -> impl Iterator<Item = &SameLink> + '_ {
        self.same_links.iter()
    }

    /// Ids of the activities implementing `parent`, over both edge kinds.
    pub fn children(&self, parent: &str) -> Result<BTreeSet<&str>> {
        if !self.activities.contains_key(parent) {
            return Err(Error::unknown(EntityKind::Activity, parent));
        }
        Ok(self
            .implementations
            .values()
            .filter(|imp| imp.parent == parent)
            .map(|imp| imp.child.as_str())
            .collect())
    }

    /// Path of parents from `activity` (exclusive) up to the root
    /// (inclusive). Empty for the root.
    ///
    /// Fails with a precondition error if some activity on the path has more
    /// than one parent or the path cycles.
    pub fn ancestors(&self, activity: &str) -> Result<Vec<&str>> {
        if !self.activities.contains_key(activity) {
            return Err(Error::unknown(EntityKind::Activity, activity));
        }
        let mut path: Vec<&str> = Vec::new();
        let mut current = activity;
        loop {
            let mut parents = self
                .implementations
                .values()
                .filter(|imp| imp.child == current)
                .map(|imp| imp.parent.as_str());
            let Some(parent) = parents.next() else {
                return Ok(path);
            };
            if parents.next().is_some() {
                return Err(Error::Precondition(alloc::format!(
                    "activity `{current}` has more than one parent"
                )));
            }
            if parent == activity || path.contains(&parent) {
                return Err(Error::Precondition(alloc::format!(
                    "implementation cycle through `{parent}`"
                )));
            }
            path.push(parent);
            current = parent;
        }
    }

    /// Number of records of each kind, in canonical section order.
    pub fn counts(&self) -> Counts {
        Counts {
            activities: self.activities.len(),
            agents: self.agents.len(),
            context_cues: self.context_cues.len(),
            values: self.values.len(),
            implementations: self.implementations.len(),
            beliefs: self.beliefs.len(),
            habitual_triggers: self.habitual_triggers.len(),
            related_values: self.related_values.len(),
            adhered_values: self.adhered_values.len(),
            same_links: self.same_links.len(),
        }
    }
}

/// Record counts of a knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[allow(missing_docs)]
pub struct Counts {
    pub activities: usize,
    pub agents: usize,
    pub context_cues: usize,
    pub values: usize,
    pub implementations: usize,
    pub beliefs: usize,
    pub habitual_triggers: usize,
    pub related_values: usize,
    pub adhered_values: usize,
    pub same_links: usize,
}
