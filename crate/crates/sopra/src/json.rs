//! JSON mirror of the scenario format.
//!
//! The document is one object with a `version` field and one array per
//! section, named exactly like the text sections. Missing arrays are empty.
//!
//! ```json
//! {
//!   "version": 1,
//!   "activities": [{ "id": "Commuting 1", "type": "TopAction" }],
//!   "beliefs": [{ "agent": "Alice", "activity": "Commuting 1", "personal": 0.1, "shared": 0.8 }]
//! }
//! ```

use serde::{Deserialize, Serialize};
use sopra_core::model::*;

use crate::scenario::{ParseError, ParseErrors};

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct Document {
    #[serde(default = "version_one")]
    version: u32,
    #[serde(default)]
    activities: Vec<ActivityDto>,
    #[serde(default)]
    agents: Vec<AgentDto>,
    #[serde(default, alias = "contextelements")]
    contextcues: Vec<CueDto>,
    #[serde(default)]
    values: Vec<ValueDto>,
    #[serde(default)]
    implementations: Vec<ImplementationDto>,
    #[serde(default)]
    beliefs: Vec<BeliefDto>,
    #[serde(default)]
    habitualtriggers: Vec<TriggerDto>,
    #[serde(default)]
    relatedvalues: Vec<RelatedValueDto>,
    #[serde(default)]
    adheredvalues: Vec<AdheredValueDto>,
    #[serde(default)]
    same: Vec<SameDto>,
}

fn version_one() -> u32 {
    1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivityDto {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    ty: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AgentDto {
    id: String,
    habit_rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CueDto {
    id: String,
    kind: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueDto {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImplementationDto {
    child: String,
    parent: String,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeliefDto {
    agent: String,
    activity: String,
    personal: f64,
    shared: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriggerDto {
    activity: String,
    cue: String,
    strength: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelatedValueDto {
    activity: String,
    value: String,
    strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdheredValueDto {
    agent: String,
    value: String,
    strength: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SameDto {
    a: String,
    b: String,
}

/// Canonical JSON text of a knowledge base (pretty-printed, sorted rows).
pub fn to_json(kb: &KnowledgeBase) -> String {
    let label = |id: &str, label: &str| (label != id).then(|| label.to_string());
    let doc = Document {
        version: 1,
        activities: kb
            .activities()
            .map(|a| ActivityDto {
                id: a.id.clone(),
                label: label(&a.id, &a.label),
                ty: a.declared_type.map(|t| t.as_str().into()),
            })
            .collect(),
        agents: kb
            .agents()
            .map(|a| AgentDto {
                id: a.id.clone(),
                habit_rate: a.habit_rate,
            })
            .collect(),
        contextcues: kb
            .context_cues()
            .map(|c| CueDto {
                id: c.id.clone(),
                kind: c.kind.as_str().into(),
            })
            .collect(),
        values: kb
            .values()
            .map(|v| ValueDto {
                id: v.id.clone(),
                label: label(&v.id, &v.label),
            })
            .collect(),
        implementations: kb
            .implementations()
            .map(|i| ImplementationDto {
                child: i.child.clone(),
                parent: i.parent.clone(),
                ty: i.kind.as_str().into(),
            })
            .collect(),
        beliefs: kb
            .beliefs()
            .map(|b| BeliefDto {
                agent: b.agent.clone(),
                activity: b.activity.clone(),
                personal: b.personal,
                shared: b.shared,
            })
            .collect(),
        habitualtriggers: kb
            .habitual_triggers()
            .map(|t| TriggerDto {
                activity: t.activity.clone(),
                cue: t.cue.clone(),
                strength: t.strength,
            })
            .collect(),
        relatedvalues: kb
            .related_values()
            .map(|r| RelatedValueDto {
                activity: r.activity.clone(),
                value: r.value.clone(),
                strength: r.strength,
                provenance: (r.provenance == Provenance::Inferred)
                    .then(|| r.provenance.as_str().into()),
            })
            .collect(),
        adheredvalues: kb
            .adhered_values()
            .map(|a| AdheredValueDto {
                agent: a.agent.clone(),
                value: a.value.clone(),
                strength: a.strength,
            })
            .collect(),
        same: kb
            .same_links()
            .map(|l| SameDto {
                a: l.a.clone(),
                b: l.b.clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data always serializes");
    text.push('\n');
    text
}

/// Semantic problems have no precise position once the JSON is decoded; they
/// are reported at 1:1 with the offending array element named in the message.
fn semantic(path: String, expected: &str, found: String, message: String) -> ParseError {
    ParseError {
        line: 1,
        column: 1,
        expected: expected.into(),
        found,
        message: format!("{path}: {message}"),
    }
}

struct Builder {
    kb: KnowledgeBase,
    errors: Vec<ParseError>,
}

impl Builder {
    fn strength(&mut self, path: String, what: &str, x: f64) -> bool {
        let ok = (0.0..=1.0).contains(&x);
        if !ok {
            self.errors.push(semantic(
                path,
                "number in [0, 1]",
                x.to_string(),
                format!("{what} {x} is outside [0, 1]"),
            ));
        }
        ok
    }

    fn name<T: std::str::FromStr>(
        &mut self,
        path: String,
        text: &str,
        expected: &str,
    ) -> Option<T> {
        let parsed = text.parse().ok();
        if parsed.is_none() {
            self.errors.push(semantic(
                path,
                expected,
                format!("`{text}`"),
                format!("expected one of {expected}"),
            ));
        }
        parsed
    }

    fn insert(&mut self, path: String, result: sopra_core::Result<()>) {
        if let Err(e) = result {
            self.errors
                .push(semantic(path, "unique key", String::new(), e.to_string()));
        }
    }
}

/// Reads the JSON mirror, with the same checks as [`crate::scenario::parse`].
pub fn from_json(text: &str) -> Result<KnowledgeBase, ParseErrors> {
    let doc: Document = serde_json::from_str(text).map_err(|e| {
        ParseErrors(vec![ParseError {
            line: e.line().max(1),
            column: e.column().max(1),
            expected: "scenario JSON document".into(),
            found: format!("{:?}", e.classify()).to_lowercase(),
            message: e.to_string(),
        }])
    })?;
    let mut b = Builder {
        kb: KnowledgeBase::new(),
        errors: Vec::new(),
    };
    if doc.version != 1 {
        b.errors.push(semantic(
            "version".into(),
            "1",
            doc.version.to_string(),
            "unsupported version".into(),
        ));
    }
    for (i, a) in doc.activities.into_iter().enumerate() {
        let path = || format!("activities[{i}]");
        let mut activity = Activity::new(a.id);
        if let Some(label) = a.label {
            activity.label = label;
        }
        if let Some(ty) = a.ty {
            match b.name(path(), &ty, "Action, AbstractAction, TopAction") {
                Some(t) => activity.declared_type = Some(t),
                None => continue,
            }
        }
        let r = b.kb.insert_activity(activity);
        b.insert(path(), r);
    }
    for (i, a) in doc.agents.into_iter().enumerate() {
        let path = || format!("agents[{i}]");
        if b.strength(path(), "habitRate", a.habit_rate) {
            let r = b.kb.insert_agent(Agent {
                id: a.id,
                habit_rate: a.habit_rate,
            });
            b.insert(path(), r);
        }
    }
    for (i, c) in doc.contextcues.into_iter().enumerate() {
        let path = || format!("contextcues[{i}]");
        if let Some(kind) = b.name(path(), &c.kind, "object, location, agent, activity") {
            let r = b.kb.insert_context_cue(ContextCue { id: c.id, kind });
            b.insert(path(), r);
        }
    }
    for (i, v) in doc.values.into_iter().enumerate() {
        let mut value = Value::new(v.id);
        if let Some(label) = v.label {
            value.label = label;
        }
        let r = b.kb.insert_value(value);
        b.insert(format!("values[{i}]"), r);
    }
    for (i, imp) in doc.implementations.into_iter().enumerate() {
        let path = || format!("implementations[{i}]");
        if let Some(kind) = b.name(path(), &imp.ty, "allOf, partOf") {
            let r = b.kb.insert_implementation(Implementation {
                child: imp.child,
                parent: imp.parent,
                kind,
            });
            b.insert(path(), r);
        }
    }
    for (i, x) in doc.beliefs.into_iter().enumerate() {
        let path = || format!("beliefs[{i}]");
        let p = b.strength(path(), "personalStrength", x.personal);
        let s = b.strength(path(), "sharedStrength", x.shared);
        if p && s {
            let r = b.kb.insert_belief(Belief {
                agent: x.agent,
                activity: x.activity,
                personal: x.personal,
                shared: x.shared,
            });
            b.insert(path(), r);
        }
    }
    for (i, t) in doc.habitualtriggers.into_iter().enumerate() {
        let path = || format!("habitualtriggers[{i}]");
        if b.strength(path(), "strength", t.strength) {
            let r = b.kb.insert_habitual_trigger(HabitualTrigger {
                activity: t.activity,
                cue: t.cue,
                strength: t.strength,
            });
            b.insert(path(), r);
        }
    }
    for (i, rv) in doc.relatedvalues.into_iter().enumerate() {
        let path = || format!("relatedvalues[{i}]");
        let provenance = match rv.provenance {
            None => Some(Provenance::Asserted),
            Some(p) => b.name(path(), &p, "asserted, inferred"),
        };
        if let (true, Some(provenance)) = (b.strength(path(), "strength", rv.strength), provenance)
        {
            let r = b.kb.insert_related_value(RelatedValue {
                activity: rv.activity,
                value: rv.value,
                strength: rv.strength,
                provenance,
            });
            b.insert(path(), r);
        }
    }
    for (i, a) in doc.adheredvalues.into_iter().enumerate() {
        let path = || format!("adheredvalues[{i}]");
        if b.strength(path(), "strength", a.strength) {
            let r = b.kb.insert_adhered_value(AdheredValue {
                agent: a.agent,
                value: a.value,
                strength: a.strength,
            });
            b.insert(path(), r);
        }
    }
    for (i, s) in doc.same.into_iter().enumerate() {
        let r = b.kb.insert_same_link(SameLink::new(s.a, s.b));
        b.insert(format!("same[{i}]"), r);
    }

    for v in sopra_core::validate::check_references(&b.kb) {
        let id = v.entities.first().cloned().unwrap_or_default();
        b.errors.push(semantic(
            "references".into(),
            "declared id",
            format!("`{id}`"),
            v.message,
        ));
    }
    if b.kb.activities().next().is_none() {
        b.errors.push(semantic(
            "activities".into(),
            "at least one activity",
            "none".into(),
            "no activities declared".into(),
        ));
    }
    if b.errors.is_empty() {
        Ok(b.kb)
    } else {
        Err(ParseErrors(b.errors))
    }
}
