//! Format round trips, canonical output and robustness on arbitrary input.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use common::arb_world;
use proptest::prelude::*;
use sopra::json::{from_json, to_json};
use sopra::scenario::{parse, serialize};
use sopra_core::model::*;

const COMMUTING: &str = include_str!("../scenarios/commuting.sopra");

/// Reverses the section order and the record order inside every section.
fn reorder(text: &str) -> String {
    let mut sections: Vec<(String, Vec<&str>)> = Vec::new();
    for line in text.lines() {
        if line.starts_with('[') {
            sections.push((line.to_string(), Vec::new()));
        } else if let Some(last) = sections.last_mut() {
            if !line.trim().is_empty() {
                last.1.push(line);
            }
        }
    }
    let mut out = String::new();
    for (header, mut rows) in sections.into_iter().rev() {
        rows.reverse();
        out.push_str(&header.to_uppercase());
        out.push('\n');
        for r in rows {
            out.push_str(r);
            out.push('\n');
        }
    }
    out
}

fn assert_located(errors: &[sopra::scenario::ParseError]) {
    assert!(!errors.is_empty());
    for e in errors {
        assert!(e.line >= 1 && e.column >= 1, "{e:?}");
        assert!(!e.message.is_empty());
    }
}

fn odd_id() -> impl Strategy<Value = String> {
    prop_oneof![
        any::<String>(),
        "[ \"\\\\#=\\[\\]a-z\t\r\n]{1,8}",
        "[A-Za-z0-9_.:/+'-]{1,8}",
    ]
    .prop_filter("ids are non-empty", |s| !s.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_inverts_serialize(kb in arb_world(15)) {
        let text = serialize(&kb);
        prop_assert_eq!(parse(&text).unwrap(), kb);
    }

    #[test]
    fn json_inverts_to_json(kb in arb_world(15)) {
        prop_assert_eq!(from_json(&to_json(&kb)).unwrap(), kb);
    }

    #[test]
    fn row_order_does_not_change_canonical_text(kb in arb_world(15)) {
        let text = serialize(&kb);
        let shuffled = parse(&reorder(&text)).unwrap();
        prop_assert_eq!(&shuffled, &kb);
        prop_assert_eq!(serialize(&shuffled), text);
    }

    #[test]
    fn any_id_survives_quoting(id in odd_id(), label in odd_id(), s in 0.0..=1.0f64) {
        let mut kb = KnowledgeBase::new();
        let mut a = Activity::new(id.clone());
        a.label = label;
        kb.insert_activity(a).unwrap();
        kb.insert_agent(Agent { id: id.clone(), habit_rate: s }).unwrap();
        kb.insert_value(Value::new(id.clone())).unwrap();
        kb.insert_related_value(RelatedValue {
            activity: id.clone(),
            value: id,
            strength: s,
            provenance: Provenance::Asserted,
        })
        .unwrap();
        prop_assert_eq!(&parse(&serialize(&kb)).unwrap(), &kb);
        prop_assert_eq!(&from_json(&to_json(&kb)).unwrap(), &kb);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
        let text = String::from_utf8_lossy(&bytes);
        if let Err(e) = parse(&text) {
            assert_located(&e.0);
        }
        if let Err(e) = from_json(&text) {
            assert_located(&e.0);
        }
    }

    #[test]
    fn mangled_scenarios_never_panic(
        edits in prop::collection::vec(
            (any::<prop::sample::Index>(), 0..20usize, "[\"\\\\=#\\[\\] a-zA-Z0-9.\n-]{0,6}"),
            1..6,
        ),
    ) {
        let mut text: Vec<char> = COMMUTING.chars().collect();
        for (at, len, insert) in edits {
            let start = at.index(text.len() + 1);
            let end = (start + len).min(text.len());
            text.splice(start..end, insert.chars());
        }
        let text: String = text.into_iter().collect();
        match parse(&text) {
            Ok(kb) => prop_assert_eq!(parse(&serialize(&kb)).unwrap(), kb),
            Err(e) => assert_located(&e.0),
        }
    }
}

#[test]
fn shortest_decimal_for_inherited_mean() {
    let mut kb = KnowledgeBase::new();
    kb.insert_activity(Activity::new("a")).unwrap();
    kb.insert_value(Value::new("v")).unwrap();
    kb.insert_related_value(RelatedValue {
        activity: "a".into(),
        value: "v".into(),
        strength: (0.7 + 0.0) / 2.0,
        provenance: Provenance::Inferred,
    })
    .unwrap();
    assert!(serialize(&kb).contains("relatedvalue a v strength=0.35 provenance=inferred\n"));
}

#[test]
fn every_error_is_collected() {
    let text = "[activities]\nactivity a\nactivity a\n[agents]\nagent x habitRate=7\n\
                [relatedvalues]\nrelatedvalue a Fun strength=0.1\nrelatedvalue Ghost v strength=x\n";
    let errors = parse(text).unwrap_err().0;
    let lines: Vec<usize> = errors.iter().map(|e| e.line).collect();
    assert_eq!(lines, [3, 5, 7, 8]);
}
