//! Rule checking.
//!
//! Every check returns its findings as [`Violation`]s; nothing here fails.
//! [`validate`] runs all checks and returns a [`ValidationReport`] sorted by
//! rule then entity ids, so the same knowledge base always yields the same
//! report.
//!
//! Rules:
//!
//! | rule | severity | condition |
//! |------|----------|-----------|
//! | `TREE` | error | implementation graph is not a directed tree with a unique root |
//! | `ROOT_UNIQUE` | error | more than one activity has no parent |
//! | `TYPE_PARTITION` | error | a parent mixes `allOf` and `partOf` children |
//! | `PARTOF_SIBLING` | error | a parent has exactly one `partOf` child |
//! | `RANGE` | error | a strength or habit rate outside `[0, 1]` |
//! | `REF` | error | a record names an undeclared entity |
//! | `SAME_KIND` | error | a cue's kind contradicts the entity it names |
//! | `TYPE_MISMATCH` | error | a stated activity type differs from the derived one |
//! | `VALUE_INHERITANCE` | warning | an asserted non-leaf related value differs from the inherited mean |

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{ActivityType, CueKind, ImplType, KnowledgeBase};

/// Identifies the rule a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(missing_docs)]
pub enum RuleId {
    Tree,
    RootUnique,
    TypePartition,
    PartofSibling,
    Range,
    Ref,
    SameKind,
    TypeMismatch,
    ValueInheritance,
}

impl RuleId {
    /// Upper-case rule name.
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Tree => "TREE",
            RuleId::RootUnique => "ROOT_UNIQUE",
            RuleId::TypePartition => "TYPE_PARTITION",
            RuleId::PartofSibling => "PARTOF_SIBLING",
            RuleId::Range => "RANGE",
            RuleId::Ref => "REF",
            RuleId::SameKind => "SAME_KIND",
            RuleId::TypeMismatch => "TYPE_MISMATCH",
            RuleId::ValueInheritance => "VALUE_INHERITANCE",
        }
    }

    /// Severity every violation of this rule carries.
    pub fn severity(self) -> Severity {
        match self {
            RuleId::ValueInheritance => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How serious a violation is. Only errors make a knowledge base invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    /// Makes the knowledge base invalid.
    Error,
    /// Reported but does not block loading.
    Warning,
}

impl Severity {
    /// Lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Broken rule.
    pub rule: RuleId,
    /// Severity, derived from the rule.
    pub severity: Severity,
    /// Ids of the entities involved. The first one is the entity the finding
    /// is about.
    pub entities: Vec<String>,
    /// Human readable description.
    pub message: String,
}

impl Violation {
    /// Creates a violation with the rule's severity.
    pub fn new<I, S>(rule: RuleId, entities: I, message: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Violation {
            rule,
            severity: rule.severity(),
            entities: entities.into_iter().map(Into::into).collect(),
            message: message.into(),
        }
    }

    fn sort_key(&self) -> (RuleId, &[String], &str) {
        (self.rule, &self.entities, &self.message)
    }
}

/// Result of [`validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Findings, sorted by rule then entity ids.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_unsorted(mut violations: Vec<Violation>) -> Self {
        violations.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        violations.dedup();
        ValidationReport { violations }
    }

    /// True when no error-severity violation was found.
    pub fn is_valid(&self) -> bool {
        self.error_count() == 0
    }

    /// Number of errors.
    pub fn error_count(&self) -> usize {
        self.count(Severity::Error)
    }

    /// Number of warnings.
    pub fn warning_count(&self) -> usize {
        self.count(Severity::Warning)
    }

    fn count(&self, severity: Severity) -> usize {
        self.violations
            .iter()
            .filter(|v| v.severity == severity)
            .count()
    }

    /// Violations of one rule.
    pub fn of_rule(&self, rule: RuleId) -> impl Iterator<Item = &Violation> + '_ {
        self.violations.iter().filter(move |v| v.rule == rule)
    }
}

/// Checks that every record names declared entities of the right kind.
pub fn check_references(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut missing = |kind: &str, id: &str, record: String| {
        out.push(Violation::new(
            RuleId::Ref,
            [id],
            format!("{record} names undeclared {kind} `{id}`"),
        ));
    };
    for imp in kb.implementations() {
        let record = format!("implementation `{}` -> `{}`", imp.child, imp.parent);
        for end in [&imp.child, &imp.parent] {
            if kb.activity(end).is_none() {
                missing("activity", end, record.clone());
            }
        }
    }
    for b in kb.beliefs() {
        let record = format!("belief `{}` in `{}`", b.agent, b.activity);
        if kb.agent(&b.agent).is_none() {
            missing("agent", &b.agent, record.clone());
        }
        if kb.activity(&b.activity).is_none() {
            missing("activity", &b.activity, record);
        }
    }
    for t in kb.habitual_triggers() {
        let record = format!("habitual trigger `{}` <- `{}`", t.activity, t.cue);
        if kb.activity(&t.activity).is_none() {
            missing("activity", &t.activity, record.clone());
        }
        if !kb.is_cue(&t.cue) {
            missing("cue", &t.cue, record);
        }
    }
    for rv in kb.related_values() {
        let record = format!("related value `{}` ~ `{}`", rv.activity, rv.value);
        if kb.activity(&rv.activity).is_none() {
            missing("activity", &rv.activity, record.clone());
        }
        if kb.value(&rv.value).is_none() {
            missing("value", &rv.value, record);
        }
    }
    for av in kb.adhered_values() {
        let record = format!("adhered value `{}` ~ `{}`", av.agent, av.value);
        if kb.agent(&av.agent).is_none() {
            missing("agent", &av.agent, record.clone());
        }
        if kb.value(&av.value).is_none() {
            missing("value", &av.value, record);
        }
    }
    for link in kb.same_links() {
        let record = format!("same link `{}` = `{}`", link.a, link.b);
        for end in [&link.a, &link.b] {
            if kb.activity(end).is_none() {
                missing("activity", end, record.clone());
            }
        }
    }
    out
}

fn in_unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Checks every strength and habit rate lies in `[0, 1]`.
pub fn check_ranges(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |x: f64, entities: [&str; 2], what: &str| {
        if !in_unit_interval(x) {
            let entities = entities.into_iter().filter(|e| !e.is_empty());
            out.push(Violation::new(
                RuleId::Range,
                entities,
                format!("{what} {x} is outside [0, 1]"),
            ));
        }
    };
    for a in kb.agents() {
        check(a.habit_rate, [&a.id, ""], "habitRate");
    }
    for b in kb.beliefs() {
        check(b.personal, [&b.agent, &b.activity], "personalStrength");
        check(b.shared, [&b.agent, &b.activity], "sharedStrength");
    }
    for t in kb.habitual_triggers() {
        check(
            t.strength,
            [&t.activity, &t.cue],
            "habitual trigger strength",
        );
    }
    for rv in kb.related_values() {
        check(
            rv.strength,
            [&rv.activity, &rv.value],
            "related value strength",
        );
    }
    for av in kb.adhered_values() {
        check(
            av.strength,
            [&av.agent, &av.value],
            "adhered value strength",
        );
    }
    out
}

/// Checks that cue kinds agree with the entities they name, plus
/// [`check_ranges`].
pub fn check_cue_kinds(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut out = Vec::new();
    for cue in kb.context_cues() {
        let is_agent = kb.agent(&cue.id).is_some();
        let is_activity = kb.activity(&cue.id).is_some();
        let problem = match cue.kind {
            CueKind::Agent if !is_agent => {
                Some("is declared as an agent cue but no such agent exists")
            }
            CueKind::Activity if !is_activity => {
                Some("is declared as an activity cue but no such activity exists")
            }
            CueKind::Object | CueKind::Location if is_agent => {
                Some("shares its id with an agent but is not declared as an agent cue")
            }
            CueKind::Object | CueKind::Location if is_activity => {
                Some("shares its id with an activity but is not declared as an activity cue")
            }
            _ => None,
        };
        if let Some(problem) = problem {
            out.push(Violation::new(
                RuleId::SameKind,
                [cue.id.as_str()],
                format!("{} cue `{}` {problem}", cue.kind, cue.id),
            ));
        }
    }
    out.extend(check_ranges(kb));
    out
}

/// All edges whose ends are declared activities, as `(child, parent)`.
fn resolved_edges(kb: &KnowledgeBase) -> impl Iterator<Item = (&str, &str, ImplType)> + '_ {
    kb.implementations()
        .filter(|imp| kb.activity(&imp.child).is_some() && kb.activity(&imp.parent).is_some())
        .map(|imp| (imp.child.as_str(), imp.parent.as_str(), imp.kind))
}

/// Checks the implementation graph is a directed tree with a unique root:
/// every activity has at most one parent, exactly one has none, there are no
/// cycles, every activity reaches the root and `|I| = |A| - 1`.
///
/// Edges naming undeclared activities are left to [`check_references`].
pub fn validate_tree(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut out = Vec::new();
    let activity_count = kb.activities().count();
    if activity_count == 0 {
        out.push(Violation::new(
            RuleId::Tree,
            core::iter::empty::<&str>(),
            "no activities declared; a tree needs a root",
        ));
        return out;
    }

    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut edge_count = 0usize;
    for (child, parent, _) in resolved_edges(kb) {
        edge_count += 1;
        if child == parent {
            out.push(Violation::new(
                RuleId::Tree,
                [child],
                format!("activity `{child}` implements itself"),
            ));
        }
        parents.entry(child).or_default().push(parent);
        children.entry(parent).or_default().push(child);
    }

    for (child, ps) in &parents {
        if ps.len() > 1 {
            let mut entities = alloc::vec![*child];
            entities.extend(ps.iter().copied());
            out.push(Violation::new(
                RuleId::Tree,
                entities,
                format!("activity `{child}` has {} parents", ps.len()),
            ));
        }
    }

    let roots: Vec<&str> = kb
        .activities()
        .map(|a| a.id.as_str())
        .filter(|id| !parents.contains_key(id))
        .collect();
    match roots.len() {
        0 => out.push(Violation::new(
            RuleId::Tree,
            core::iter::empty::<&str>(),
            "no root: every activity has a parent",
        )),
        1 => {}
        n => {
            out.push(Violation::new(
                RuleId::RootUnique,
                roots.iter().copied(),
                format!("{n} activities have no parent"),
            ));
            out.push(Violation::new(
                RuleId::Tree,
                roots.iter().copied(),
                format!("implementation graph is disconnected into {n} rooted parts"),
            ));
        }
    }

    // Activities reachable downward from a root; the rest sit on or below a
    // cycle and never reach it.
    let mut reached: BTreeSet<&str> = BTreeSet::new();
    let mut stack: Vec<&str> = roots.clone();
    while let Some(node) = stack.pop() {
        if reached.insert(node) {
            if let Some(cs) = children.get(node) {
                stack.extend(cs.iter().copied());
            }
        }
    }
    let unreached: Vec<&str> = kb
        .activities()
        .map(|a| a.id.as_str())
        .filter(|id| !reached.contains(id))
        .collect();
    if !unreached.is_empty() && !roots.is_empty() {
        out.push(Violation::new(
            RuleId::Tree,
            unreached.iter().copied(),
            format!(
                "{} activities lie on an implementation cycle and do not reach the root",
                unreached.len()
            ),
        ));
    }

    if out.is_empty() && edge_count + 1 != activity_count {
        out.push(Violation::new(
            RuleId::Tree,
            core::iter::empty::<&str>(),
            format!("{edge_count} implementations for {activity_count} activities"),
        ));
    }
    out
}

/// Activity types derived from tree position, with mismatches against the
/// stated types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeClassification {
    /// Derived type per activity id.
    pub types: BTreeMap<String, ActivityType>,
    /// `TYPE_MISMATCH` violations.
    pub violations: Vec<Violation>,
}

/// Derives activity types: the root is a `TopAction`, other leaves are
/// `Action`s and everything else is an `AbstractAction`.
///
/// A single-activity tree's only node is the root and is classified
/// `TopAction`. Fails if [`validate_tree`] reports anything.
pub fn classify_types(kb: &KnowledgeBase) -> Result<TypeClassification> {
    if !validate_tree(kb).is_empty() {
        return Err(Error::Precondition(
            "activity types are only defined on a valid tree".into(),
        ));
    }
    let mut has_parent: BTreeSet<&str> = BTreeSet::new();
    let mut has_child: BTreeSet<&str> = BTreeSet::new();
    for (child, parent, _) in resolved_edges(kb) {
        has_parent.insert(child);
        has_child.insert(parent);
    }
    let mut types = BTreeMap::new();
    let mut violations = Vec::new();
    for a in kb.activities() {
        let derived = if !has_parent.contains(a.id.as_str()) {
            ActivityType::TopAction
        } else if !has_child.contains(a.id.as_str()) {
            ActivityType::Action
        } else {
            ActivityType::AbstractAction
        };
        if let Some(stated) = a.declared_type {
            if stated != derived {
                violations.push(Violation::new(
                    RuleId::TypeMismatch,
                    [a.id.as_str()],
                    format!(
                        "`{}` is declared {stated} but its position makes it {derived}",
                        a.id
                    ),
                ));
            }
        }
        types.insert(a.id.clone(), derived);
    }
    Ok(TypeClassification { types, violations })
}

/// Checks that no parent has exactly one `partOf` child.
pub fn check_part_of(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut part_children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (child, parent, kind) in resolved_edges(kb) {
        if kind == ImplType::PartOf {
            part_children.entry(parent).or_default().push(child);
        }
    }
    part_children
        .into_iter()
        .filter(|(_, cs)| cs.len() == 1)
        .map(|(parent, cs)| {
            Violation::new(
                RuleId::PartofSibling,
                [parent, cs[0]],
                format!(
                    "`{parent}` has `{}` as its only partOf child; a composition needs at least two parts",
                    cs[0]
                ),
            )
        })
        .collect()
}

/// Checks that no parent mixes `allOf` and `partOf` children.
pub fn check_type_partition(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut kinds: BTreeMap<&str, BTreeSet<ImplType>> = BTreeMap::new();
    for (_, parent, kind) in resolved_edges(kb) {
        kinds.entry(parent).or_default().insert(kind);
    }
    kinds
        .into_iter()
        .filter(|(_, ks)| ks.len() > 1)
        .map(|(parent, _)| {
            Violation::new(
                RuleId::TypePartition,
                [parent],
                format!("`{parent}` has both allOf and partOf children"),
            )
        })
        .collect()
}

/// Every error-severity check, unsorted.
pub(crate) fn structural_violations(kb: &KnowledgeBase) -> Vec<Violation> {
    let mut out = check_references(kb);
    out.extend(check_cue_kinds(kb));
    let tree = validate_tree(kb);
    let tree_ok = tree.is_empty();
    out.extend(tree);
    out.extend(check_type_partition(kb));
    out.extend(check_part_of(kb));
    if tree_ok {
        if let Ok(classified) = classify_types(kb) {
            out.extend(classified.violations);
        }
    }
    out
}

/// Fails with a precondition error unless the knowledge base has no
/// error-severity violations.
pub(crate) fn require_valid(kb: &KnowledgeBase) -> Result<()> {
    let errors = structural_violations(kb);
    match errors.first() {
        None => Ok(()),
        Some(first) => Err(Error::Precondition(format!(
            "knowledge base is invalid ({} errors; first: {} {})",
            errors.len(),
            first.rule,
            first.message
        ))),
    }
}

/// Runs every check. Value-inheritance conflicts are looked for only when no
/// error was found.
pub fn validate(kb: &KnowledgeBase) -> ValidationReport {
    let mut out = structural_violations(kb);
    if out.is_empty() {
        if let Ok(table) = crate::inference::infer_related_values(kb) {
            out.extend(table.conflicts.iter().map(|c| {
                Violation::new(
                    RuleId::ValueInheritance,
                    [c.activity.as_str(), c.value.as_str()],
                    format!(
                        "asserted strength {} differs from inherited mean {}",
                        c.asserted, c.computed
                    ),
                )
            }));
        }
    }
    ValidationReport::from_unsorted(out)
}
