//! Text and JSON renderings of engine results.
//!
//! Every renderer builds its output from the same borrowed data, so the text
//! and JSON forms carry the same fields. Text ids are quoted the way the
//! scenario format quotes them and numbers use the shortest exact decimal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{json, Value as Json};
use sopra_core::decision::{BeliefFilter, ChoicePoint, Explanation};
use sopra_core::model::{KnowledgeBase, Provenance};
use sopra_core::validate::{Severity, ValidationReport};
use sopra_core::{EnactmentPlan, InferredValueTable};

use crate::scenario::{number, quote, related_value_row, ParseErrors};

/// Whether to emit ANSI colour codes in text output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Style {
    /// Colour severities and pathways.
    pub color: bool,
}

impl Style {
    fn paint(self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn severity(self, s: Severity) -> String {
        match s {
            Severity::Error => self.paint("31", s.as_str()),
            Severity::Warning => self.paint("33", s.as_str()),
        }
    }
}

fn ids<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    items
        .into_iter()
        .map(|s| quote(s))
        .collect::<Vec<_>>()
        .join(",")
}

fn pretty(value: &Json) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values always serialize");
    s.push('\n');
    s
}

/// `RULEID severity entity[,entity…] message` per violation, then a summary.
pub fn report_text(report: &ValidationReport, style: Style) -> String {
    let mut out = String::new();
    for v in &report.violations {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            v.rule.as_str(),
            style.severity(v.severity),
            ids(&v.entities),
            v.message
        );
    }
    let _ = writeln!(out, "{}", summary(report));
    out
}

/// `N errors, M warnings`.
pub fn summary(report: &ValidationReport) -> String {
    let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
    format!(
        "{}, {}",
        plural(report.error_count(), "error"),
        plural(report.warning_count(), "warning")
    )
}

/// The report as a JSON document.
pub fn report_json(report: &ValidationReport) -> String {
    let violations: Vec<Json> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "ruleId": v.rule.as_str(),
                "severity": v.severity.as_str(),
                "entities": v.entities,
                "message": v.message,
            })
        })
        .collect();
    pretty(&json!({
        "valid": report.is_valid(),
        "errors": report.error_count(),
        "warnings": report.warning_count(),
        "violations": violations,
    }))
}

/// Parse errors, one `line:column: message (expected …, found …)` per line.
pub fn parse_errors_text(errors: &ParseErrors) -> String {
    let mut out = String::new();
    for e in &errors.0 {
        let _ = writeln!(out, "{e} (expected {}, found {})", e.expected, e.found);
    }
    out
}

/// Parse errors as a JSON document.
pub fn parse_errors_json(errors: &ParseErrors) -> String {
    let list: Vec<Json> = errors
        .0
        .iter()
        .map(|e| {
            json!({
                "line": e.line,
                "column": e.column,
                "expected": e.expected,
                "found": e.found,
                "message": e.message,
            })
        })
        .collect();
    pretty(&json!({ "parseErrors": list }))
}

/// One row of the dense inference table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow<'a> {
    /// Activity id.
    pub activity: &'a str,
    /// Value id.
    pub value: &'a str,
    /// Inherited strength, 0 where nothing below asserts the value.
    pub strength: f64,
    /// Where the strength comes from.
    pub provenance: Provenance,
}

/// Every declared `(activity, value)` pair, optionally restricted to one
/// activity and/or one value, in id order.
pub fn table_rows<'a>(
    kb: &'a KnowledgeBase,
    table: &InferredValueTable,
    activity: Option<&str>,
    value: Option<&str>,
) -> Vec<TableRow<'a>> {
    let mut rows = Vec::new();
    for a in kb
        .activities()
        .filter(|a| activity.is_none_or(|f| f == a.id))
    {
        for v in kb.values().filter(|v| value.is_none_or(|f| f == v.id)) {
            let (strength, provenance) = table
                .get(&a.id, &v.id)
                .map_or((0.0, Provenance::Inferred), |e| (e.strength, e.provenance));
            rows.push(TableRow {
                activity: &a.id,
                value: &v.id,
                strength,
                provenance,
            });
        }
    }
    rows
}

fn conflicts_of<'t>(
    table: &'t InferredValueTable,
    activity: Option<&'t str>,
    value: Option<&'t str>,
) -> impl Iterator<Item = &'t sopra_core::inference::ValueConflict> + 't {
    table.conflicts.iter().filter(move |c| {
        activity.is_none_or(|f| f == c.activity) && value.is_none_or(|f| f == c.value)
    })
}

/// The table as a `[relatedvalues]` section of the scenario format; conflicts
/// follow as comment lines so the section stays readable by the parser.
pub fn table_text(
    rows: &[TableRow<'_>],
    table: &InferredValueTable,
    activity: Option<&str>,
    value: Option<&str>,
) -> String {
    let mut out = String::from("[relatedvalues]\n");
    for r in rows {
        out.push_str(&related_value_row(
            r.activity,
            r.value,
            r.strength,
            Some(r.provenance),
        ));
        out.push('\n');
    }
    for c in conflicts_of(table, activity, value) {
        let _ = writeln!(
            out,
            "# conflict {} {} asserted={} computed={}",
            quote(&c.activity),
            quote(&c.value),
            number(c.asserted),
            number(c.computed)
        );
    }
    out
}

/// The table as a JSON document.
pub fn table_json(
    rows: &[TableRow<'_>],
    table: &InferredValueTable,
    activity: Option<&str>,
    value: Option<&str>,
) -> String {
    let entries: Vec<Json> = rows
        .iter()
        .map(|r| {
            json!({
                "activity": r.activity,
                "value": r.value,
                "strength": r.strength,
                "provenance": r.provenance.as_str(),
            })
        })
        .collect();
    let conflicts: Vec<Json> = conflicts_of(table, activity, value)
        .map(|c| {
            json!({
                "activity": c.activity,
                "value": c.value,
                "asserted": c.asserted,
                "computed": c.computed,
            })
        })
        .collect();
    pretty(&json!({ "relatedvalues": entries, "conflicts": conflicts }))
}

fn filter_text(filter: BeliefFilter) -> String {
    match filter {
        BeliefFilter::Off => "off".into(),
        BeliefFilter::Personal(t) => format!("personal:{}", number(t)),
    }
}

fn plan_lines(out: &mut String, plan: &EnactmentPlan, style: Style) {
    for s in &plan.steps {
        let pathway = style.paint("1", s.pathway.as_str());
        let _ = write!(
            out,
            "step {} {pathway} score={}",
            quote(&s.activity),
            number(s.score)
        );
        if s.filter_fallback {
            out.push_str(" fallback");
        }
        out.push('\n');
    }
    for leaf in &plan.leaf_actions {
        let _ = writeln!(out, "leaf {}", quote(leaf));
    }
}

fn header(out: &mut String, agent: &str, context: &BTreeSet<String>) {
    let _ = writeln!(out, "agent {}", quote(agent));
    let _ = writeln!(out, "context {}", ids(context));
}

/// A plan: the visited steps in descent order, then the leaf actions.
pub fn plan_text(
    agent: &str,
    context: &BTreeSet<String>,
    plan: &EnactmentPlan,
    style: Style,
) -> String {
    let mut out = String::new();
    header(&mut out, agent, context);
    plan_lines(&mut out, plan, style);
    out
}

fn plan_value(plan: &EnactmentPlan) -> Json {
    let steps: Vec<Json> = plan
        .steps
        .iter()
        .map(|s| {
            json!({
                "activity": s.activity,
                "pathway": s.pathway.as_str(),
                "score": s.score,
                "filterFallback": s.filter_fallback,
            })
        })
        .collect();
    json!({ "steps": steps, "leafActions": plan.leaf_actions })
}

/// A plan as a JSON document.
pub fn plan_json(agent: &str, context: &BTreeSet<String>, plan: &EnactmentPlan) -> String {
    let mut value = plan_value(plan);
    value["agent"] = json!(agent);
    value["context"] = json!(context);
    pretty(&value)
}

fn choice_text(out: &mut String, point: &ChoicePoint) {
    let _ = writeln!(
        out,
        "choice {} {} rule={} filter={}{}{} selected={}",
        quote(&point.parent),
        point.kind,
        point.rule.as_str(),
        filter_text(point.filter),
        if point.filter_fallback {
            " fallback"
        } else {
            ""
        },
        if point.tie_broken { " tie" } else { "" },
        ids(&point.selected)
    );
    for c in &point.candidates {
        let _ = writeln!(
            out,
            "  candidate {} activation={} score={}{}",
            quote(&c.activity),
            number(c.activation),
            number(c.score),
            if c.passed_filter { "" } else { " filtered" }
        );
    }
}

/// A plan followed by every choice point of the descent.
pub fn explanation_text(exp: &Explanation, style: Style) -> String {
    let mut out = String::new();
    header(&mut out, &exp.agent, &exp.context.present_cues);
    let _ = writeln!(
        out,
        "config habit-threshold={} belief-filter={}",
        number(exp.config.habit_threshold),
        filter_text(exp.config.belief_filter)
    );
    plan_lines(&mut out, &exp.plan, style);
    for point in &exp.choice_points {
        choice_text(&mut out, point);
    }
    out
}

/// An explanation as a JSON document.
pub fn explanation_json(exp: &Explanation) -> String {
    let choices: Vec<Json> = exp
        .choice_points
        .iter()
        .map(|p| {
            let candidates: Vec<Json> = p
                .candidates
                .iter()
                .map(|c| {
                    json!({
                        "activity": c.activity,
                        "activation": c.activation,
                        "score": c.score,
                        "passedFilter": c.passed_filter,
                    })
                })
                .collect();
            json!({
                "parent": p.parent,
                "kind": p.kind.as_str(),
                "rule": p.rule.as_str(),
                "filter": filter_text(p.filter),
                "filterFallback": p.filter_fallback,
                "tieBroken": p.tie_broken,
                "selected": p.selected,
                "candidates": candidates,
            })
        })
        .collect();
    pretty(&json!({
        "agent": exp.agent,
        "context": exp.context.present_cues,
        "config": {
            "habitThreshold": exp.config.habit_threshold,
            "beliefFilter": filter_text(exp.config.belief_filter),
        },
        "plan": plan_value(&exp.plan),
        "choicePoints": choices,
    }))
}

/// A set of activities, one per line.
pub fn views_text(views: &BTreeSet<String>) -> String {
    views.iter().map(|v| format!("{}\n", quote(v))).collect()
}

/// A set of activities as a JSON array.
pub fn views_json(views: &BTreeSet<String>) -> String {
    pretty(&json!(views))
}

/// Matching view pairs, one `first second` pair per line.
pub fn pairs_text(pairs: &BTreeSet<(String, String)>) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{} {}\n", quote(a), quote(b)))
        .collect()
}

/// Matching view pairs as a JSON array of two-element arrays.
pub fn pairs_json(pairs: &BTreeSet<(String, String)>) -> String {
    let list: Vec<[&str; 2]> = pairs
        .iter()
        .map(|(a, b)| [a.as_str(), b.as_str()])
        .collect();
    pretty(&json!(list))
}

/// Expected strengths, one `value strength` per line.
pub fn expected_text(values: &BTreeMap<String, f64>) -> String {
    values
        .iter()
        .map(|(v, s)| format!("{} {}\n", quote(v), number(*s)))
        .collect()
}

/// Expected strengths as a JSON object.
pub fn expected_json(values: &BTreeMap<String, f64>) -> String {
    pretty(&json!(values))
}
