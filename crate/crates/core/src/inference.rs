//! Derived knowledge.
//!
//! - Value inheritance: a parent's strength for a value is the mean of its
//!   children's strengths, over both edge kinds, down to the leaves whose
//!   asserted strengths seed the computation (unasserted leaves count as 0).
//! - View closure: `same` links generate an equivalence relation over
//!   activities.
//! - Social queries over beliefs: shared and personal views, common ground
//!   between two agents, and the values an observer expects a view to carry.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{EntityKind, Error, Result};
use crate::model::{KnowledgeBase, Provenance};
use crate::tree::Tree;
use crate::unionfind::UnionFind;

/// Largest difference between an asserted and an inherited strength that is
/// not reported as a conflict.
pub const CONFLICT_TOLERANCE: f64 = 1e-9;

/// One inherited strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferredEntry {
    /// The strength.
    pub strength: f64,
    /// `Asserted` for a leaf's stated strength, `Inferred` for a mean.
    pub provenance: Provenance,
}

/// A non-leaf whose asserted strength differs from the inherited mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueConflict {
    /// Activity id.
    pub activity: String,
    /// Value id.
    pub value: String,
    /// Strength stated in the input.
    pub asserted: f64,
    /// Mean inherited from the children.
    pub computed: f64,
}

/// Result of [`infer_related_values`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InferredValueTable {
    /// Strengths for every `(activity, value)` pair where some leaf below the
    /// activity asserts the value. Other pairs have strength 0.
    pub entries: BTreeMap<(String, String), InferredEntry>,
    /// Asserted non-leaf strengths that disagree with inheritance, ordered by
    /// `(activity, value)`.
    pub conflicts: Vec<ValueConflict>,
}

impl InferredValueTable {
    /// Entry for a pair, if some leaf below `activity` asserts `value`.
    pub fn get(&self, activity: &str, value: &str) -> Option<&InferredEntry> {
        self.entries.get(&(activity.into(), value.into()))
    }

    /// Inherited strength, 0 for unsupported pairs.
    pub fn strength(&self, activity: &str, value: &str) -> f64 {
        self.get(activity, value).map_or(0.0, |e| e.strength)
    }

    /// Supported entries of one activity, ordered by value id.
    pub fn entries_of<'a>(
        &'a self,
        activity: &'a str,
    ) -> impl Iterator<Item = (&'a str, &'a InferredEntry)> + 'a {
        self.entries
            .iter()
            .filter(move |((a, _), _)| a == activity)
            .map(|((_, v), e)| (v.as_str(), e))
    }
}

/// Computes inherited value strengths bottom-up over the activity tree.
///
/// Leaves take their asserted strength (0 when unasserted); every other
/// activity takes the mean over all of its children. Asserted strengths on
/// non-leaves are not used in the computation, only compared against it.
/// Stored `inferred` rows are ignored.
pub fn infer_related_values(kb: &KnowledgeBase) -> Result<InferredValueTable> {
    let tree = Tree::new(kb)?;
    let mut table = InferredValueTable::default();

    for value in kb.values() {
        let v = value.id.as_str();
        // (strength, supported) per activity
        let mut computed: BTreeMap<&str, (f64, bool)> = BTreeMap::new();
        for &node in tree.order.iter().rev() {
            let children = tree.children(node);
            let (strength, supported, provenance) = if children.is_empty() {
                match kb.related_value(node, v, Provenance::Asserted) {
                    Some(rv) => (rv.strength, true, Provenance::Asserted),
                    None => (0.0, false, Provenance::Inferred),
                }
            } else {
                // Running mean: equal children give back exactly their value
                // and rounding never leaves the children's hull.
                let mut mean = 0.0;
                let mut supported = false;
                for (i, c) in children.iter().enumerate() {
                    let (s, sup) = computed[c];
                    mean += (s - mean) / (i + 1) as f64;
                    supported |= sup;
                }
                (mean, supported, Provenance::Inferred)
            };
            computed.insert(node, (strength, supported));
            if supported {
                table.entries.insert(
                    (node.into(), v.into()),
                    InferredEntry {
                        strength,
                        provenance,
                    },
                );
            }
        }
    }

    for rv in kb.related_values() {
        if rv.provenance != Provenance::Asserted || tree.is_leaf(&rv.activity) {
            continue;
        }
        let computed = table.strength(&rv.activity, &rv.value);
        if (rv.strength - computed).abs() > CONFLICT_TOLERANCE {
            table.conflicts.push(ValueConflict {
                activity: rv.activity.clone(),
                value: rv.value.clone(),
                asserted: rv.strength,
                computed,
            });
        }
    }
    Ok(table)
}

/// Partition of the activities into classes of views of the same bodily
/// movement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViewPartition {
    classes: Vec<BTreeSet<String>>,
    index: BTreeMap<String, usize>,
}

impl ViewPartition {
    /// The classes, ordered by their smallest member.
    pub fn classes(&self) -> &[BTreeSet<String>] {
        &self.classes
    }

    /// The class holding `activity`.
    pub fn class_of(&self, activity: &str) -> Option<&BTreeSet<String>> {
        self.index.get(activity).map(|&i| &self.classes[i])
    }

    /// Whether both activities are views of the same movement. Reflexive for
    /// any known activity.
    pub fn contains(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

/// Reflexive, symmetric and transitive closure of the stored `same` links.
pub fn same_closure(kb: &KnowledgeBase) -> Result<ViewPartition> {
    let ids: Vec<&str> = kb.activities().map(|a| a.id.as_str()).collect();
    let position = |id: &str| {
        ids.binary_search(&id)
            .map_err(|_| Error::unknown(EntityKind::Activity, id))
    };
    let mut uf = UnionFind::new(ids.len());
    for link in kb.same_links() {
        let (a, b) = (position(&link.a)?, position(&link.b)?);
        uf.union(a, b);
    }
    let mut by_root: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        by_root.entry(uf.find(i)).or_default().insert((*id).into());
    }
    let mut classes: Vec<BTreeSet<String>> = by_root.into_values().collect();
    classes.sort_by(|a, b| a.first().cmp(&b.first()));
    let index = classes
        .iter()
        .enumerate()
        .flat_map(|(i, class)| class.iter().map(move |id| (id.clone(), i)))
        .collect();
    Ok(ViewPartition { classes, index })
}

fn check_threshold(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Precondition(alloc::format!(
            "threshold {theta} is outside [0, 1]"
        )))
    }
}

fn require_agent(kb: &KnowledgeBase, agent: &str) -> Result<()> {
    kb.agent(agent)
        .map(|_| ())
        .ok_or_else(|| Error::unknown(EntityKind::Agent, agent))
}

fn views_by(
    kb: &KnowledgeBase,
    agent: &str,
    theta: f64,
    strength: impl Fn(&crate::model::Belief) -> f64,
) -> Result<BTreeSet<String>> {
    require_agent(kb, agent)?;
    check_threshold(theta)?;
    Ok(kb
        .beliefs_of(agent)
        .filter(|b| strength(b) >= theta)
        .map(|b| b.activity.clone())
        .collect())
}

/// Activities `agent` believes others hold with `sharedStrength >= theta`.
pub fn shared_views(kb: &KnowledgeBase, agent: &str, theta: f64) -> Result<BTreeSet<String>> {
    views_by(kb, agent, theta, |b| b.shared)
}

/// Activities `agent` itself holds with `personalStrength >= theta`.
pub fn personal_views(kb: &KnowledgeBase, agent: &str, theta: f64) -> Result<BTreeSet<String>> {
    views_by(kb, agent, theta, |b| b.personal)
}

/// Pairs `(v1, v2)` of personal views of `a1` and `a2` (both at or above
/// `theta`) that are views of the same movement. Identical ids always match.
pub fn common_ground(
    kb: &KnowledgeBase,
    a1: &str,
    a2: &str,
    theta: f64,
) -> Result<BTreeSet<(String, String)>> {
    let first = personal_views(kb, a1, theta)?;
    let second = personal_views(kb, a2, theta)?;
    let partition = same_closure(kb)?;
    let mut out = BTreeSet::new();
    for v1 in &first {
        for v2 in &second {
            if partition.contains(v1, v2) {
                out.insert((v1.clone(), v2.clone()));
            }
        }
    }
    Ok(out)
}

/// Values `observer` expects a performer of `activity` to pursue.
///
/// Every view the observer believes shared (at or above `theta`) that is the
/// same movement as `activity` contributes its value strengths: the asserted
/// strength on the view where one exists, else the inherited one. Only
/// supported values contribute. Several views are averaged per value.
pub fn expected_values(
    kb: &KnowledgeBase,
    observer: &str,
    activity: &str,
    theta: f64,
) -> Result<BTreeMap<String, f64>> {
    if kb.activity(activity).is_none() {
        return Err(Error::unknown(EntityKind::Activity, activity));
    }
    let views = shared_views(kb, observer, theta)?;
    let partition = same_closure(kb)?;
    let qualifying: Vec<&String> = views
        .iter()
        .filter(|v| partition.contains(v, activity))
        .collect();
    if qualifying.is_empty() {
        return Ok(BTreeMap::new());
    }
    let table = infer_related_values(kb)?;

    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for view in qualifying {
        let mut strengths: BTreeMap<&str, f64> = table
            .entries_of(view)
            .map(|(v, e)| (v, e.strength))
            .collect();
        for rv in kb
            .related_values()
            .filter(|rv| rv.activity == *view && rv.provenance == Provenance::Asserted)
        {
            strengths.insert(&rv.value, rv.strength);
        }
        for (v, s) in strengths {
            let slot = acc.entry(v.into()).or_insert((0.0, 0));
            slot.0 += s;
            slot.1 += 1;
        }
    }
    Ok(acc
        .into_iter()
        .map(|(v, (sum, n))| (v, sum / n as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;
    use crate::scenarios::{self, ids};
    use alloc::vec;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn go_to_work_inherits_means() {
        let table = infer_related_values(&scenarios::commuting()).unwrap();
        assert_eq!(table.strength(ids::GO_TO_WORK, ids::COMFORT), 0.35);
        assert_eq!(table.strength(ids::GO_TO_WORK, ids::ENVIRONMENT), 0.5);
        assert_eq!(
            table.strength(ids::NON_CAR_COMMUTING, ids::ENVIRONMENT),
            0.5
        );
        assert_eq!(table.strength(ids::COMMUTING, ids::ENVIRONMENT), 0.25);
        assert_eq!(
            table.get(ids::TRAIN, ids::COMFORT).unwrap().provenance,
            Provenance::Asserted
        );
        assert_eq!(
            table.get(ids::GO_TO_WORK, ids::COMFORT).unwrap().provenance,
            Provenance::Inferred
        );
    }

    #[test]
    fn unsupported_pairs_are_absent() {
        let table = infer_related_values(&scenarios::commuting()).unwrap();
        assert!(table.get(ids::CAR_COMMUTING, ids::COMFORT).is_none());
        assert!(table.get(ids::BIKE, ids::ENVIRONMENT).is_none());
        assert_eq!(table.strength(ids::CAR_COMMUTING, ids::COMFORT), 0.0);
    }

    #[test]
    fn commuting_conflicts() {
        let table = infer_related_values(&scenarios::commuting()).unwrap();
        assert_eq!(
            table.conflicts,
            vec![
                ValueConflict {
                    activity: ids::CAR_COMMUTING.into(),
                    value: ids::COMFORT.into(),
                    asserted: 0.9,
                    computed: 0.0,
                },
                ValueConflict {
                    activity: ids::COMMUTING.into(),
                    value: ids::COMFORT.into(),
                    asserted: 0.9,
                    computed: 0.175,
                },
            ]
        );
    }

    #[test]
    fn single_leaf_keeps_its_assertion() {
        let mut kb = KnowledgeBase::new();
        kb.insert_activity(Activity::new("a")).unwrap();
        kb.insert_value(Value::new("v")).unwrap();
        kb.insert_related_value(RelatedValue {
            activity: "a".into(),
            value: "v".into(),
            strength: 0.6,
            provenance: Provenance::Asserted,
        })
        .unwrap();
        let table = infer_related_values(&kb).unwrap();
        assert_eq!(table.strength("a", "v"), 0.6);
        assert!(table.conflicts.is_empty());
    }

    #[test]
    fn inference_requires_valid_kb() {
        assert!(matches!(
            infer_related_values(&KnowledgeBase::new()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closure_of_commuting_is_singletons() {
        let p = same_closure(&scenarios::commuting()).unwrap();
        assert_eq!(p.classes().len(), 8);
        assert!(p.classes().iter().all(|c| c.len() == 1));
        assert!(p.contains(ids::TRAIN, ids::TRAIN));
        assert!(!p.contains(ids::TRAIN, ids::BIKE));
    }

    #[test]
    fn closure_is_transitive_and_symmetric() {
        let mut kb = KnowledgeBase::new();
        for id in ["a", "b", "c", "d"] {
            kb.insert_activity(Activity::new(id)).unwrap();
        }
        kb.insert_same_link(SameLink::new("a", "b")).unwrap();
        kb.insert_same_link(SameLink::new("c", "b")).unwrap();
        let p = same_closure(&kb).unwrap();
        assert_eq!(p.class_of("a"), Some(&set(&["a", "b", "c"])));
        assert!(p.contains("b", "a"));
        assert!(p.contains("a", "c"));
        assert!(!p.contains("a", "d"));
        assert_eq!(p.classes().len(), 2);
    }

    #[test]
    fn closure_rejects_unknown_activities() {
        let mut kb = KnowledgeBase::new();
        kb.insert_activity(Activity::new("a")).unwrap();
        kb.insert_same_link(SameLink::new("a", "zz")).unwrap();
        assert_eq!(
            same_closure(&kb),
            Err(Error::unknown(EntityKind::Activity, "zz"))
        );
    }

    #[test]
    fn shared_views_of_alice() {
        let kb = scenarios::commuting();
        let all: BTreeSet<String> = kb
            .beliefs_of(ids::ALICE)
            .map(|b| b.activity.clone())
            .collect();
        assert_eq!(all.len(), 7);
        assert_eq!(shared_views(&kb, ids::ALICE, 0.8).unwrap(), all);
        assert!(shared_views(&kb, ids::ALICE, 0.81).unwrap().is_empty());
        assert!(shared_views(&kb, ids::KID1, 0.0).unwrap().is_empty());
        assert!(matches!(
            shared_views(&kb, "Carol", 0.5),
            Err(Error::UnknownId { .. })
        ));
        assert!(matches!(
            shared_views(&kb, ids::ALICE, 1.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn personal_views_split_alice_and_bob() {
        let kb = scenarios::commuting();
        assert_eq!(
            personal_views(&kb, ids::ALICE, 0.5).unwrap(),
            set(&[ids::NON_CAR_COMMUTING, ids::GO_TO_WORK, ids::TRAIN])
        );
        assert_eq!(
            personal_views(&kb, ids::BOB, 0.5).unwrap(),
            set(&[
                ids::COMMUTING,
                ids::CAR_COMMUTING,
                ids::BRING_KIDS,
                ids::WORK_BY_CAR
            ])
        );
        assert_eq!(personal_views(&kb, ids::BOB, 0.0).unwrap().len(), 4);
    }

    #[test]
    fn common_ground_of_alice_and_bob() {
        let kb = scenarios::commuting();
        let got = common_ground(&kb, ids::ALICE, ids::BOB, 0.05).unwrap();
        let want: BTreeSet<(String, String)> = [
            ids::COMMUTING,
            ids::CAR_COMMUTING,
            ids::BRING_KIDS,
            ids::WORK_BY_CAR,
        ]
        .iter()
        .map(|v| (String::from(*v), String::from(*v)))
        .collect();
        assert_eq!(got, want);
        assert!(common_ground(&kb, ids::ALICE, ids::BOB, 0.5)
            .unwrap()
            .is_empty());
        let own = common_ground(&kb, ids::BOB, ids::BOB, 0.5).unwrap();
        assert_eq!(own.len(), 4);
        assert!(own.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn common_ground_follows_same_links() {
        let mut kb = scenarios::commuting();
        kb.insert_same_link(SameLink::new(ids::TRAIN, ids::WORK_BY_CAR))
            .unwrap();
        let got = common_ground(&kb, ids::ALICE, ids::BOB, 0.5).unwrap();
        assert_eq!(
            got,
            [(String::from(ids::TRAIN), String::from(ids::WORK_BY_CAR))]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn alice_expects_car_commuters_to_value_comfort() {
        let kb = scenarios::commuting();
        let got = expected_values(&kb, ids::ALICE, ids::CAR_COMMUTING, 0.8).unwrap();
        assert_eq!(
            got,
            [(String::from(ids::COMFORT), 0.9)].into_iter().collect()
        );
        assert!(expected_values(&kb, ids::ALICE, ids::BIKE, 0.8)
            .unwrap()
            .is_empty());
        let train = expected_values(&kb, ids::ALICE, ids::TRAIN, 0.8).unwrap();
        assert_eq!(train[ids::COMFORT], 0.7);
        assert_eq!(train[ids::ENVIRONMENT], 1.0);
    }

    #[test]
    fn expected_values_average_same_views() {
        let mut kb = scenarios::commuting();
        kb.insert_same_link(SameLink::new(ids::TRAIN, ids::GO_TO_WORK))
            .unwrap();
        let got = expected_values(&kb, ids::ALICE, ids::TRAIN, 0.8).unwrap();
        // train: comfort 0.7, env 1.0; go to work: comfort 0.35, env 0.5
        assert!((got[ids::COMFORT] - 0.525).abs() < 1e-12);
        assert!((got[ids::ENVIRONMENT] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn expected_values_without_beliefs_is_empty() {
        let mut kb = KnowledgeBase::new();
        kb.insert_activity(Activity::new("a")).unwrap();
        kb.insert_agent(Agent {
            id: "x".into(),
            habit_rate: 0.0,
        })
        .unwrap();
        assert!(expected_values(&kb, "x", "a", 0.0).unwrap().is_empty());
        assert!(matches!(
            expected_values(&kb, "x", "b", 0.0),
            Err(Error::UnknownId { .. })
        ));
    }
}
