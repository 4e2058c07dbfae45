//! Stepwise action selection.
//!
//! An agent descends the activity tree from the root. Below a `partOf`
//! parent every child is entered. Below an `allOf` parent exactly one child
//! is chosen: habitually when some candidate's trigger activation from the
//! present cues reaches the habit threshold, otherwise intentionally by the
//! best value score achievable beneath each candidate. The leaves reached
//! form the enactment plan.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{EntityKind, Error, Result};
use crate::inference::{infer_related_values, InferredValueTable};
use crate::model::{ImplType, KnowledgeBase};
use crate::tree::Tree;

/// Relative tolerance under which two scores count as tied.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-9;

/// Cues present where the agent decides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PerformanceContext {
    /// Ids of context cues, agents or activities.
    pub present_cues: BTreeSet<String>,
}

impl PerformanceContext {
    /// A context holding the given cues.
    pub fn new<I, S>(cues: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PerformanceContext {
            present_cues: cues.into_iter().map(Into::into).collect(),
        }
    }
}

/// Restricts `allOf` candidates to views the agent personally holds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BeliefFilter {
    /// All children are candidates.
    #[default]
    Off,
    /// Only children the agent believes with at least this personal strength.
    /// Falls back to all children when none qualifies.
    Personal(f64),
}

/// Decision parameters. Ties are always broken by the smallest activity id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionConfig {
    /// Activation at or above which a candidate is chosen habitually.
    pub habit_threshold: f64,
    /// Candidate filter at `allOf` choice points.
    pub belief_filter: BeliefFilter,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            habit_threshold: 0.5,
            belief_filter: BeliefFilter::Off,
        }
    }
}

impl DecisionConfig {
    fn check(&self) -> Result<()> {
        if self.habit_threshold.is_nan() || self.habit_threshold < 0.0 {
            return Err(Error::Precondition(format!(
                "habit threshold {} must be non-negative",
                self.habit_threshold
            )));
        }
        if let BeliefFilter::Personal(theta) = self.belief_filter {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::Precondition(format!(
                    "belief filter threshold {theta} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// How an activity entered the plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pathway {
    /// Chosen because present cues trigger it.
    Habitual,
    /// Chosen for the values it promotes.
    Intentional,
    /// Entered without a choice: the root, or a part of a composition.
    Forced,
}

impl Pathway {
    /// Lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            Pathway::Habitual => "habitual",
            Pathway::Intentional => "intentional",
            Pathway::Forced => "forced",
        }
    }
}

impl core::fmt::Display for Pathway {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One visited activity.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// Activity id.
    pub activity: String,
    /// How it was entered.
    pub pathway: Pathway,
    /// Activation for habitual steps, best achievable value score otherwise.
    pub score: f64,
    /// The belief filter left no candidate at this choice and was ignored.
    pub filter_fallback: bool,
}

/// Result of [`decide`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnactmentPlan {
    /// Visited activities in depth-first order, children by id.
    pub steps: Vec<Step>,
    /// The leaves reached.
    pub leaf_actions: BTreeSet<String>,
}

impl EnactmentPlan {
    /// The step for `activity`, if it was visited.
    pub fn step(&self, activity: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.activity == activity)
    }
}

/// A child considered at a choice point.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Activity id.
    pub activity: String,
    /// Summed strength of its triggers among the present cues.
    pub activation: f64,
    /// Best value score achievable beneath it.
    pub score: f64,
    /// Whether it passed the belief filter.
    pub passed_filter: bool,
}

/// Which rule settled a choice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// `partOf` parent: every child is entered.
    Composition,
    /// Highest activation at or above the habit threshold.
    Habitual,
    /// Highest value score.
    Intentional,
}

impl SelectionRule {
    /// Lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionRule::Composition => "composition",
            SelectionRule::Habitual => "habitual",
            SelectionRule::Intentional => "intentional",
        }
    }
}

/// The candidates and outcome at one visited parent.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoicePoint {
    /// Parent activity id.
    pub parent: String,
    /// Edge kind of the parent's children.
    pub kind: ImplType,
    /// All children, by id.
    pub candidates: Vec<Candidate>,
    /// Filter in force.
    pub filter: BeliefFilter,
    /// The filter emptied the candidate set and was ignored.
    pub filter_fallback: bool,
    /// Deciding rule.
    pub rule: SelectionRule,
    /// Entered children.
    pub selected: Vec<String>,
    /// Several candidates tied on the deciding quantity and the smallest id
    /// won.
    pub tie_broken: bool,
}

/// Result of [`explain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    /// Deciding agent.
    pub agent: String,
    /// Present cues.
    pub context: PerformanceContext,
    /// Parameters used.
    pub config: DecisionConfig,
    /// The plan.
    pub plan: EnactmentPlan,
    /// Choice points in visiting order.
    pub choice_points: Vec<ChoicePoint>,
}

/// Compares with a relative tolerance; `Equal` means tied.
fn compare_scores(a: f64, b: f64) -> Ordering {
    let scale = a.abs().max(b.abs());
    if (a - b).abs() <= SCORE_TIE_TOLERANCE * scale {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Index of the maximum by `key`, smallest id among ties, and whether a tie
/// occurred. `ids` must be sorted.
fn argmax(ids: &[&str], key: impl Fn(&str) -> f64) -> Option<(usize, bool)> {
    let mut best: Option<(usize, f64)> = None;
    let mut tied = false;
    for (i, id) in ids.iter().enumerate() {
        let k = key(id);
        match best {
            None => best = Some((i, k)),
            Some((_, bk)) => match compare_scores(k, bk) {
                Ordering::Greater => {
                    best = Some((i, k));
                    tied = false;
                }
                Ordering::Equal => tied = true,
                Ordering::Less => {}
            },
        }
    }
    best.map(|(i, _)| (i, tied))
}

fn require_activity(kb: &KnowledgeBase, id: &str) -> Result<()> {
    kb.activity(id)
        .map(|_| ())
        .ok_or_else(|| Error::unknown(EntityKind::Activity, id))
}

fn require_agent(kb: &KnowledgeBase, id: &str) -> Result<()> {
    kb.agent(id)
        .map(|_| ())
        .ok_or_else(|| Error::unknown(EntityKind::Agent, id))
}

/// Summed strength of the triggers of `activity` whose cue is present.
pub fn habit_activation(
    kb: &KnowledgeBase,
    activity: &str,
    ctx: &PerformanceContext,
) -> Result<f64> {
    require_activity(kb, activity)?;
    Ok(activation(kb, activity, ctx))
}

fn activation(kb: &KnowledgeBase, activity: &str, ctx: &PerformanceContext) -> f64 {
    kb.habitual_triggers()
        .filter(|t| t.activity == activity && ctx.present_cues.contains(&t.cue))
        .map(|t| t.strength)
        .fold(0.0, |acc, s| acc + s)
}

fn value_score(kb: &KnowledgeBase, table: &InferredValueTable, agent: &str, activity: &str) -> f64 {
    kb.adhered_values_of(agent)
        .map(|av| av.strength * table.strength(activity, &av.value))
        .fold(0.0, |acc, s| acc + s)
}

/// Sum over the agent's adhered values of adherence times the inherited
/// strength of `activity` for that value.
pub fn intentional_score(kb: &KnowledgeBase, agent: &str, activity: &str) -> Result<f64> {
    require_agent(kb, agent)?;
    require_activity(kb, activity)?;
    let table = infer_related_values(kb)?;
    Ok(value_score(kb, &table, agent, activity))
}

struct Decider<'a> {
    kb: &'a KnowledgeBase,
    tree: Tree<'a>,
    agent: &'a str,
    ctx: &'a PerformanceContext,
    cfg: DecisionConfig,
    /// Best achievable summed leaf score beneath each activity.
    best: BTreeMap<&'a str, f64>,
}

impl<'a> Decider<'a> {
    fn new(
        kb: &'a KnowledgeBase,
        agent: &'a str,
        ctx: &'a PerformanceContext,
        cfg: DecisionConfig,
    ) -> Result<Self> {
        cfg.check()?;
        require_agent(kb, agent)?;
        if let Some(cue) = ctx.present_cues.iter().find(|c| !kb.is_cue(c)) {
            return Err(Error::unknown(EntityKind::Cue, cue));
        }
        let tree = Tree::new(kb)?;
        let table = infer_related_values(kb)?;
        let mut best: BTreeMap<&str, f64> = BTreeMap::new();
        for &node in tree.order.iter().rev() {
            let children = tree.children(node);
            let score = match tree.kind(node) {
                None => value_score(kb, &table, agent, node),
                Some(ImplType::PartOf) => {
                    children.iter().map(|c| best[c]).fold(0.0, |acc, s| acc + s)
                }
                Some(ImplType::AllOf) => children
                    .iter()
                    .map(|c| best[c])
                    .fold(f64::NEG_INFINITY, f64::max),
            };
            best.insert(node, score);
        }
        Ok(Decider {
            kb,
            tree,
            agent,
            ctx,
            cfg,
            best,
        })
    }

    fn passes_filter(&self, activity: &str) -> bool {
        match self.cfg.belief_filter {
            BeliefFilter::Off => true,
            BeliefFilter::Personal(theta) => self
                .kb
                .belief(self.agent, activity)
                .is_some_and(|b| b.personal >= theta),
        }
    }

    fn choose(&self, parent: &'a str) -> Result<(ChoicePoint, Vec<Step>)> {
        let children = self.tree.children(parent);
        let kind = self
            .tree
            .kind(parent)
            .ok_or_else(|| Error::Internal(format!("`{parent}` has no children")))?;
        let candidates: Vec<Candidate> = children
            .iter()
            .map(|&c| Candidate {
                activity: c.into(),
                activation: activation(self.kb, c, self.ctx),
                score: self.best[c],
                passed_filter: kind == ImplType::PartOf || self.passes_filter(c),
            })
            .collect();

        let mut point = ChoicePoint {
            parent: parent.into(),
            kind,
            candidates,
            filter: self.cfg.belief_filter,
            filter_fallback: false,
            rule: SelectionRule::Composition,
            selected: Vec::new(),
            tie_broken: false,
        };

        if kind == ImplType::PartOf {
            let steps = point
                .candidates
                .iter()
                .map(|c| Step {
                    activity: c.activity.clone(),
                    pathway: Pathway::Forced,
                    score: c.score,
                    filter_fallback: false,
                })
                .collect();
            point.selected = children.iter().map(|&c| c.into()).collect();
            return Ok((point, steps));
        }

        let mut pool: Vec<&Candidate> = point
            .candidates
            .iter()
            .filter(|c| c.passed_filter)
            .collect();
        if pool.is_empty() {
            point.filter_fallback = true;
            pool = point.candidates.iter().collect();
        }
        if pool.is_empty() {
            return Err(Error::Internal(format!("no candidates below `{parent}`")));
        }

        let habitual: Vec<&Candidate> = pool
            .iter()
            .copied()
            .filter(|c| c.activation >= self.cfg.habit_threshold)
            .collect();
        let (winner, pathway, score) = if habitual.is_empty() {
            let ids: Vec<&str> = pool.iter().map(|c| c.activity.as_str()).collect();
            let (i, tied) = argmax(&ids, |id| self.best[id]).expect("pool is non-empty");
            point.rule = SelectionRule::Intentional;
            point.tie_broken = tied;
            (pool[i], Pathway::Intentional, pool[i].score)
        } else {
            let ids: Vec<&str> = habitual.iter().map(|c| c.activity.as_str()).collect();
            let (i, tied) = argmax(&ids, |id| activation(self.kb, id, self.ctx))
                .expect("habitual is non-empty");
            point.rule = SelectionRule::Habitual;
            point.tie_broken = tied;
            (habitual[i], Pathway::Habitual, habitual[i].activation)
        };
        point.selected = alloc::vec![winner.activity.clone()];
        let step = Step {
            activity: winner.activity.clone(),
            pathway,
            score,
            filter_fallback: point.filter_fallback,
        };
        Ok((point, alloc::vec![step]))
    }

    fn run(&self) -> Result<Explanation> {
        let root = self.tree.root;
        let mut steps = Vec::new();
        let mut leaf_actions = BTreeSet::new();
        let mut choice_points = Vec::new();

        let mut stack = alloc::vec![Step {
            activity: root.into(),
            pathway: Pathway::Forced,
            score: self.best[root],
            filter_fallback: false,
        }];
        while let Some(step) = stack.pop() {
            let id = self
                .tree
                .order
                .iter()
                .copied()
                .find(|a| *a == step.activity)
                .ok_or_else(|| {
                    Error::Internal(format!("`{}` is not in the tree", step.activity))
                })?;
            steps.push(step);
            if self.tree.is_leaf(id) {
                leaf_actions.insert(String::from(id));
                continue;
            }
            let (point, next) = self.choose(id)?;
            choice_points.push(point);
            stack.extend(next.into_iter().rev());
        }

        Ok(Explanation {
            agent: self.agent.into(),
            context: self.ctx.clone(),
            config: self.cfg,
            plan: EnactmentPlan {
                steps,
                leaf_actions,
            },
            choice_points,
        })
    }
}

/// Computes the enactment plan of `agent` in `ctx`.
pub fn decide(
    kb: &KnowledgeBase,
    agent: &str,
    ctx: &PerformanceContext,
    cfg: &DecisionConfig,
) -> Result<EnactmentPlan> {
    explain(kb, agent, ctx, cfg).map(|e| e.plan)
}

/// Like [`decide`], also recording every choice point.
pub fn explain(
    kb: &KnowledgeBase,
    agent: &str,
    ctx: &PerformanceContext,
    cfg: &DecisionConfig,
) -> Result<Explanation> {
    Decider::new(kb, agent, ctx, *cfg)?.run()
}
