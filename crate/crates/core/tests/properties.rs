mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use sopra_core::decision::SelectionRule;
use sopra_core::model::*;
use sopra_core::validate::{classify_types, RuleId};
use sopra_core::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inheritance_matches_naive_recursion(spec in arb_tree(50)) {
        let kb = spec.build();
        let table = infer_related_values(&kb).unwrap();
        for i in 0..spec.len() {
            for v in 0..VALUES {
                let want = spec.naive_strength(i, v);
                let got = table.strength(&node_id(i), &value_id(v));
                prop_assert!((got - want).abs() <= 1e-12, "node {i} value {v}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn root_strength_stays_in_leaf_hull(spec in arb_tree(50)) {
        let kb = spec.build();
        let table = infer_related_values(&kb).unwrap();
        let leaves: Vec<usize> = (0..spec.len()).filter(|&i| spec.is_leaf(i)).collect();
        for v in 0..VALUES {
            let lo = leaves.iter().map(|&l| spec.leaf_strength(l, v)).fold(f64::INFINITY, f64::min);
            let hi = leaves.iter().map(|&l| spec.leaf_strength(l, v)).fold(f64::NEG_INFINITY, f64::max);
            let root = table.strength(&node_id(0), &value_id(v));
            prop_assert!(lo <= root && root <= hi);
        }
    }

    #[test]
    fn uniform_leaves_are_inherited_exactly(mut spec in arb_tree(50), k in 0.0..=1.0f64) {
        for row in &mut spec.asserted {
            row[0] = Some(k);
        }
        let table = infer_related_values(&spec.build()).unwrap();
        for i in 0..spec.len() {
            prop_assert_eq!(table.strength(&node_id(i), &value_id(0)), k);
        }
    }

    #[test]
    fn inheritance_ignores_child_order(spec in arb_tree(40)) {
        // Reversed names reverse the id order, hence the child iteration order.
        let reversed = |i: usize| format!("r{:03}", 999 - i);
        let a = infer_related_values(&spec.build()).unwrap();
        let b = infer_related_values(&spec.build_named(reversed)).unwrap();
        for i in 0..spec.len() {
            for v in 0..VALUES {
                let x = a.strength(&node_id(i), &value_id(v));
                let y = b.strength(&reversed(i), &value_id(v));
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn tree_verdict_matches_oracle(g in arb_digraph(30)) {
        let kb = g.build();
        let flagged = validate(&kb).of_rule(RuleId::Tree).next().is_some();
        prop_assert_eq!(flagged, !g.is_rooted_tree());
    }

    #[test]
    fn valid_trees_partition_types(spec in arb_tree(30)) {
        let kb = spec.build();
        let report = validate(&kb);
        prop_assert!(report.is_valid(), "{:?}", report);
        let types = classify_types(&kb).unwrap().types;
        prop_assert_eq!(types.len(), spec.len());
        prop_assert_eq!(types.values().filter(|t| **t == ActivityType::TopAction).count(), 1);
        prop_assert_eq!(kb.implementations().count() + 1, spec.len());
        for i in 0..spec.len() {
            let id = node_id(i);
            let path = kb.ancestors(&id).unwrap();
            prop_assert_eq!(path.last().copied().unwrap_or(id.as_str()), node_id(0));
        }
        prop_assert_eq!(validate(&kb), report);
    }

    #[test]
    fn closure_matches_components(spec in arb_same(25)) {
        let partition = same_closure(&spec.build()).unwrap();
        let got: BTreeSet<BTreeSet<String>> = partition.classes().iter().cloned().collect();
        prop_assert_eq!(got, spec.components());
    }

    #[test]
    fn view_queries_are_monotone(kb in arb_world(12), t1 in 0.0..=1.0f64, t2 in 0.0..=1.0f64) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        for agent in kb.agents() {
            let s_lo = shared_views(&kb, &agent.id, lo).unwrap();
            let s_hi = shared_views(&kb, &agent.id, hi).unwrap();
            prop_assert!(s_hi.is_subset(&s_lo));
            let p_lo = personal_views(&kb, &agent.id, lo).unwrap();
            let p_hi = personal_views(&kb, &agent.id, hi).unwrap();
            prop_assert!(p_hi.is_subset(&p_lo));
            let all: BTreeSet<String> = kb.beliefs_of(&agent.id).map(|b| b.activity.clone()).collect();
            prop_assert_eq!(personal_views(&kb, &agent.id, 0.0).unwrap(), all);
        }
    }

    #[test]
    fn activation_is_monotone_in_cues(kb in arb_world(12), mask in prop::collection::vec(any::<bool>(), 4)) {
        let cues = ["Home", "Other Agent", "umbrella", AGENT];
        let small = PerformanceContext::new(cues.iter().zip(&mask).filter(|(_, m)| **m).map(|(c, _)| *c));
        let large = PerformanceContext::new(cues);
        for a in kb.activities() {
            let x = habit_activation(&kb, &a.id, &small).unwrap();
            let y = habit_activation(&kb, &a.id, &large).unwrap();
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn intentional_descent_matches_brute_force(spec in arb_tree(6)) {
        let kb = spec.build();
        let plan = decide(&kb, AGENT, &PerformanceContext::default(), &DecisionConfig::default()).unwrap();
        let index = index_of(&spec);
        let got: f64 = plan.leaf_actions.iter().map(|l| spec.leaf_score(index[l])).sum();
        let totals: Vec<(f64, BTreeSet<String>)> = spec
            .completions(0)
            .into_iter()
            .map(|c| (c.iter().map(|&l| spec.leaf_score(l)).sum(), c.iter().map(|&l| node_id(l)).collect()))
            .collect();
        let best = totals.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((got - best).abs() <= 1e-9, "plan {got} vs best {best}");
        let winners: Vec<_> = totals.iter().filter(|t| (t.0 - best).abs() <= 1e-9).collect();
        if winners.len() == 1 {
            prop_assert_eq!(&plan.leaf_actions, &winners[0].1);
        }
    }

    #[test]
    fn argmax_is_scale_invariant(spec in arb_tree(30), f in 0.001..=1.0f64) {
        let kb = spec.build();
        let max = kb.adhered_values().map(|a| a.strength).fold(0.0, f64::max);
        let factor = if max > 0.0 { f / max } else { f };
        let scaled = scale_adherence(&kb, AGENT, factor);
        let ctx = PerformanceContext::default();
        let cfg = DecisionConfig::default();
        let a = decide(&kb, AGENT, &ctx, &cfg).unwrap();
        let b = decide(&scaled, AGENT, &ctx, &cfg).unwrap();
        prop_assert_eq!(a.leaf_actions, b.leaf_actions);
    }

    #[test]
    fn plans_are_complete_and_deterministic(
        spec in arb_tree(30),
        triggers in prop::collection::vec((any::<prop::sample::Index>(), 0.0..=1.0f64), 0..10),
        threshold in 0.0..=1.0f64,
    ) {
        let mut kb = spec.build();
        kb.insert_context_cue(ContextCue { id: "cue".into(), kind: CueKind::Object }).unwrap();
        for (idx, s) in triggers {
            let _ = kb.insert_habitual_trigger(HabitualTrigger {
                activity: node_id(idx.index(spec.len())),
                cue: "cue".into(),
                strength: s,
            });
        }
        let ctx = PerformanceContext::new(["cue"]);
        let cfg = DecisionConfig { habit_threshold: threshold, ..DecisionConfig::default() };
        let exp = explain(&kb, AGENT, &ctx, &cfg).unwrap();
        prop_assert_eq!(&exp, &explain(&kb, AGENT, &ctx, &cfg).unwrap());

        let visited: BTreeSet<&str> = exp.plan.steps.iter().map(|s| s.activity.as_str()).collect();
        let index = index_of(&spec);
        for step in &exp.plan.steps {
            let i = index[&step.activity];
            if spec.kind(i) == ImplType::PartOf && !spec.is_leaf(i) {
                for c in spec.children(i) {
                    prop_assert!(visited.contains(node_id(c).as_str()));
                }
            }
            prop_assert_eq!(spec.is_leaf(i), exp.plan.leaf_actions.contains(&step.activity));
        }
        for point in &exp.choice_points {
            let over: Vec<_> = point.candidates.iter().filter(|c| c.activation >= threshold).collect();
            if point.kind == ImplType::AllOf && over.len() == 1 {
                prop_assert_eq!(point.rule, SelectionRule::Habitual);
                prop_assert_eq!(&point.selected, &vec![over[0].activity.clone()]);
            }
        }
    }
}
