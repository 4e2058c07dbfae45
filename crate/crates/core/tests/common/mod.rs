//! Generators and independent oracles shared by the property suites.
//!
//! Oracles here work on the raw generated specs (parent arrays, edge lists),
//! never on engine accessors.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;
use proptest::sample::Index;
use sopra_core::model::*;

pub const VALUES: usize = 3;

/// A random activity tree: `parent[0]` is the root, every other node has a
/// parent with a smaller index.
#[derive(Debug, Clone)]
pub struct TreeSpec {
    pub parent: Vec<Option<usize>>,
    /// Preferred edge kind below each node; `partOf` is used only when the
    /// node has at least two children.
    pub part_of: Vec<bool>,
    /// Asserted strengths per node and value; only leaf assertions are
    /// written to the knowledge base.
    pub asserted: Vec<Vec<Option<f64>>>,
    /// Adherence of the deciding agent per value.
    pub adherence: Vec<Option<f64>>,
}

pub fn node_id(i: usize) -> String {
    format!("n{i:02}")
}

pub fn value_id(v: usize) -> String {
    format!("v{v}")
}

pub const AGENT: &str = "agent";

impl TreeSpec {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.parent[c] == Some(node))
            .collect()
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children(node).is_empty()
    }

    pub fn kind(&self, node: usize) -> ImplType {
        if self.part_of[node] && self.children(node).len() >= 2 {
            ImplType::PartOf
        } else {
            ImplType::AllOf
        }
    }

    pub fn leaf_strength(&self, node: usize, value: usize) -> f64 {
        self.asserted[node][value].unwrap_or(0.0)
    }

    /// Builds the knowledge base, naming node `i` with `name(i)`.
    pub fn build_named(&self, name: impl Fn(usize) -> String) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for i in 0..self.len() {
            kb.insert_activity(Activity::new(name(i))).unwrap();
        }
        for v in 0..VALUES {
            kb.insert_value(Value::new(value_id(v))).unwrap();
        }
        kb.insert_agent(Agent {
            id: AGENT.into(),
            habit_rate: 0.5,
        })
        .unwrap();
        for (c, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                kb.insert_implementation(Implementation {
                    child: name(c),
                    parent: name(p),
                    kind: self.kind(p),
                })
                .unwrap();
            }
        }
        for i in (0..self.len()).filter(|&i| self.is_leaf(i)) {
            for v in 0..VALUES {
                if let Some(s) = self.asserted[i][v] {
                    kb.insert_related_value(RelatedValue {
                        activity: name(i),
                        value: value_id(v),
                        strength: s,
                        provenance: Provenance::Asserted,
                    })
                    .unwrap();
                }
            }
        }
        for v in 0..VALUES {
            if let Some(s) = self.adherence[v] {
                kb.insert_adhered_value(AdheredValue {
                    agent: AGENT.into(),
                    value: value_id(v),
                    strength: s,
                })
                .unwrap();
            }
        }
        kb
    }

    pub fn build(&self) -> KnowledgeBase {
        self.build_named(node_id)
    }

    /// Straight recursive evaluation of value inheritance.
    pub fn naive_strength(&self, node: usize, value: usize) -> f64 {
        let children = self.children(node);
        if children.is_empty() {
            self.leaf_strength(node, value)
        } else {
            let sum: f64 = children
                .iter()
                .map(|&c| self.naive_strength(c, value))
                .sum();
            sum / children.len() as f64
        }
    }

    /// Value score of a leaf for the deciding agent.
    pub fn leaf_score(&self, leaf: usize) -> f64 {
        (0..VALUES)
            .map(|v| self.adherence[v].unwrap_or(0.0) * self.leaf_strength(leaf, v))
            .sum()
    }

    /// Every set of leaves a descent from `node` can reach.
    pub fn completions(&self, node: usize) -> Vec<Vec<usize>> {
        let children = self.children(node);
        if children.is_empty() {
            return vec![vec![node]];
        }
        match self.kind(node) {
            ImplType::AllOf => children.iter().flat_map(|&c| self.completions(c)).collect(),
            ImplType::PartOf => {
                let mut acc: Vec<Vec<usize>> = vec![vec![]];
                for &c in &children {
                    let options = self.completions(c);
                    acc = acc
                        .iter()
                        .flat_map(|prefix| {
                            options.iter().map(move |o| {
                                let mut v = prefix.clone();
                                v.extend(o);
                                v
                            })
                        })
                        .collect();
                }
                acc
            }
        }
    }
}

fn opt_strength() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![
        1 => Just(None),
        1 => Just(Some(0.0)),
        1 => Just(Some(1.0)),
        4 => (0.0..=1.0f64).prop_map(Some),
    ]
}

pub fn arb_tree(max_nodes: usize) -> impl Strategy<Value = TreeSpec> {
    (1..=max_nodes).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<Index>(), n - 1),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(prop::collection::vec(opt_strength(), VALUES), n),
            prop::collection::vec(opt_strength(), VALUES),
        )
            .prop_map(|(parents, part_of, asserted, adherence)| {
                let mut parent = vec![None];
                for (i, idx) in parents.iter().enumerate() {
                    parent.push(Some(idx.index(i + 1)));
                }
                TreeSpec {
                    parent,
                    part_of,
                    asserted,
                    adherence,
                }
            })
    })
}

/// A random directed graph over `n` nodes as `(child, parent)` edges.
#[derive(Debug, Clone)]
pub struct Digraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn build(&self) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for i in 0..self.n {
            kb.insert_activity(Activity::new(node_id(i))).unwrap();
        }
        for &(c, p) in &self.edges {
            kb.insert_implementation(Implementation {
                child: node_id(c),
                parent: node_id(p),
                kind: ImplType::AllOf,
            })
            .unwrap();
        }
        kb
    }

    /// Rooted-tree test by edge count, parent counts and undirected
    /// connectivity (breadth-first search).
    pub fn is_rooted_tree(&self) -> bool {
        if self.n == 0 || self.edges.len() + 1 != self.n {
            return false;
        }
        let mut parent_count = vec![0usize; self.n];
        let mut adjacent = vec![Vec::new(); self.n];
        for &(c, p) in &self.edges {
            if c == p {
                return false;
            }
            parent_count[c] += 1;
            adjacent[c].push(p);
            adjacent[p].push(c);
        }
        if parent_count.iter().any(|&k| k > 1) {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adjacent[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

pub fn arb_digraph(max_nodes: usize) -> impl Strategy<Value = Digraph> {
    let random = (0..=max_nodes).prop_flat_map(|n| {
        let m = n.max(1);
        prop::collection::btree_set((0..m, 0..m), 0..=(2 * m))
            .prop_map(move |edges| Digraph { n, edges })
    });
    let perturbed_tree = (1..=max_nodes).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<Index>(), n - 1),
            0..4u8,
            any::<Index>(),
            any::<Index>(),
        )
            .prop_map(move |(parents, mode, a, b)| {
                let mut edges: BTreeSet<(usize, usize)> = parents
                    .iter()
                    .enumerate()
                    .map(|(i, idx)| (i + 1, idx.index(i + 1)))
                    .collect();
                match mode {
                    1 => {
                        edges.insert((a.index(n), b.index(n)));
                    }
                    2 => {
                        if let Some(&e) = edges.iter().nth(a.index(edges.len().max(1))) {
                            edges.remove(&e);
                        }
                    }
                    3 => {
                        // reverse one edge
                        if let Some(&(c, p)) = edges.iter().nth(a.index(edges.len().max(1))) {
                            edges.remove(&(c, p));
                            edges.insert((p, c));
                        }
                    }
                    _ => {}
                }
                Digraph { n, edges }
            })
    });
    prop_oneof![random, perturbed_tree]
}

/// Activities plus `same` links.
#[derive(Debug, Clone)]
pub struct SameSpec {
    pub n: usize,
    pub links: BTreeSet<(usize, usize)>,
}

pub fn arb_same(max_nodes: usize) -> impl Strategy<Value = SameSpec> {
    (1..=max_nodes).prop_flat_map(|n| {
        prop::collection::btree_set((0..n, 0..n), 0..=n)
            .prop_map(move |links| SameSpec { n, links })
    })
}

impl SameSpec {
    pub fn build(&self) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for i in 0..self.n {
            kb.insert_activity(Activity::new(node_id(i))).unwrap();
        }
        for &(a, b) in &self.links {
            // (a, b) and (b, a) are the same unordered link
            let _ = kb.insert_same_link(SameLink::new(node_id(a), node_id(b)));
        }
        kb
    }

    /// Connected components of the undirected link graph by breadth-first
    /// search.
    pub fn components(&self) -> BTreeSet<BTreeSet<String>> {
        let mut adjacent = vec![Vec::new(); self.n];
        for &(a, b) in &self.links {
            adjacent[a].push(b);
            adjacent[b].push(a);
        }
        let mut seen = vec![false; self.n];
        let mut out = BTreeSet::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut class = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(x) = queue.pop_front() {
                class.insert(node_id(x));
                for &y in &adjacent[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            out.insert(class);
        }
        out
    }
}

/// A valid world with every record kind populated, for format round trips.
pub fn arb_world(max_nodes: usize) -> impl Strategy<Value = KnowledgeBase> {
    (
        arb_tree(max_nodes),
        any::<bool>(),
        prop::collection::vec((any::<Index>(), 0.0..=1.0f64, 0.0..=1.0f64), 0..8),
        prop::collection::vec((any::<Index>(), any::<Index>(), 0.0..=1.0f64), 0..8),
        prop::collection::vec((any::<Index>(), any::<Index>()), 0..4),
        prop::collection::vec(0.0..=1.0f64, 2),
    )
        .prop_map(|(tree, declare_types, beliefs, triggers, same, rates)| {
            let name = |i: usize| match i % 3 {
                0 => format!("Act {i}"),
                1 => format!("act_{i}"),
                _ => format!("Say \"hi\" #{i}"),
            };
            let base = tree.build_named(name);
            let mut kb = KnowledgeBase::new();
            let ids: Vec<String> = (0..tree.len()).map(name).collect();
            for (i, a) in base.activities().enumerate() {
                let mut a = a.clone();
                if i % 2 == 0 {
                    a.label = format!("Label of {}", a.id);
                }
                if declare_types {
                    let idx = ids.iter().position(|x| *x == a.id).unwrap();
                    a.declared_type = Some(if idx == 0 {
                        ActivityType::TopAction
                    } else if tree.is_leaf(idx) {
                        ActivityType::Action
                    } else {
                        ActivityType::AbstractAction
                    });
                }
                kb.insert_activity(a).unwrap();
            }
            for imp in base.implementations() {
                kb.insert_implementation(imp.clone()).unwrap();
            }
            for v in base.values() {
                kb.insert_value(v.clone()).unwrap();
            }
            for rv in base.related_values() {
                kb.insert_related_value(rv.clone()).unwrap();
            }
            for av in base.adhered_values() {
                kb.insert_adhered_value(av.clone()).unwrap();
            }
            kb.insert_agent(Agent {
                id: AGENT.into(),
                habit_rate: rates[0],
            })
            .unwrap();
            kb.insert_agent(Agent {
                id: "Other Agent".into(),
                habit_rate: rates[1],
            })
            .unwrap();
            kb.insert_context_cue(ContextCue {
                id: "Home".into(),
                kind: CueKind::Location,
            })
            .unwrap();
            kb.insert_context_cue(ContextCue {
                id: "Other Agent".into(),
                kind: CueKind::Agent,
            })
            .unwrap();
            kb.insert_context_cue(ContextCue {
                id: "umbrella".into(),
                kind: CueKind::Object,
            })
            .unwrap();
            let cues = ["Home", "Other Agent", "umbrella", AGENT];
            for (idx, p, s) in beliefs {
                let agent = if p < 0.5 { AGENT } else { "Other Agent" };
                let _ = kb.insert_belief(Belief {
                    agent: agent.into(),
                    activity: ids[idx.index(ids.len())].clone(),
                    personal: p,
                    shared: s,
                });
            }
            for (a, c, s) in triggers {
                let _ = kb.insert_habitual_trigger(HabitualTrigger {
                    activity: ids[a.index(ids.len())].clone(),
                    cue: cues[c.index(cues.len())].into(),
                    strength: s,
                });
            }
            for (a, b) in same {
                let _ = kb.insert_same_link(SameLink::new(
                    ids[a.index(ids.len())].clone(),
                    ids[b.index(ids.len())].clone(),
                ));
            }
            if let Some(first) = base.activities().next() {
                if let Some(v) = base.values().next() {
                    let _ = kb.insert_related_value(RelatedValue {
                        activity: first.id.clone(),
                        value: v.id.clone(),
                        strength: 0.125,
                        provenance: Provenance::Inferred,
                    });
                }
            }
            kb
        })
}

/// Multiplies every adherence of the deciding agent by `factor`.
pub fn scale_adherence(kb: &KnowledgeBase, agent: &str, factor: f64) -> KnowledgeBase {
    let mut out = KnowledgeBase::new();
    for a in kb.activities() {
        out.insert_activity(a.clone()).unwrap();
    }
    for i in kb.implementations() {
        out.insert_implementation(i.clone()).unwrap();
    }
    for a in kb.agents() {
        out.insert_agent(a.clone()).unwrap();
    }
    for c in kb.context_cues() {
        out.insert_context_cue(c.clone()).unwrap();
    }
    for v in kb.values() {
        out.insert_value(v.clone()).unwrap();
    }
    for b in kb.beliefs() {
        out.insert_belief(b.clone()).unwrap();
    }
    for t in kb.habitual_triggers() {
        out.insert_habitual_trigger(t.clone()).unwrap();
    }
    for r in kb.related_values() {
        out.insert_related_value(r.clone()).unwrap();
    }
    for av in kb.adhered_values() {
        let mut av = av.clone();
        if av.agent == agent {
            av.strength *= factor;
        }
        out.insert_adhered_value(av).unwrap();
    }
    for l in kb.same_links() {
        out.insert_same_link(l.clone()).unwrap();
    }
    out
}

/// Maps each node id to its index.
pub fn index_of(spec: &TreeSpec) -> BTreeMap<String, usize> {
    (0..spec.len()).map(|i| (node_id(i), i)).collect()
}
