//! Built-in worlds.
//!
//! [`commuting`] is the commuting use case: Bob habitually drives his kid to
//! school and himself to work, while Alice, who takes the train, holds views
//! of the same practice. The `sopra` crate bundles the same world as
//! `scenarios/commuting.sopra`.

use crate::model::*;

/// Ids used by [`commuting`].
#[allow(missing_docs)]
pub mod ids {
    pub const COMMUTING: &str = "Commuting 1";
    pub const CAR_COMMUTING: &str = "Car Commuting 1";
    pub const BRING_KIDS: &str = "Bring Kids To School With Car 1";
    pub const WORK_BY_CAR: &str = "Go to Work with Car 1";
    pub const NON_CAR_COMMUTING: &str = "Non-Car Commuting 1";
    pub const GO_TO_WORK: &str = "Go To Work 1";
    pub const TRAIN: &str = "Go To Work With Train 1";
    pub const BIKE: &str = "Go To Work With Bike 1";

    pub const BOB: &str = "Bob";
    pub const ALICE: &str = "Alice";
    pub const KID1: &str = "Kid1";

    pub const HOME: &str = "Home";

    pub const COMFORT: &str = "Comfort";
    pub const ENVIRONMENT: &str = "Environment";
}

/// The commuting world.
pub fn commuting() -> KnowledgeBase {
    use ids::*;
    use ActivityType::*;

    let mut kb = KnowledgeBase::new();
    let activities = [
        (COMMUTING, TopAction),
        (CAR_COMMUTING, AbstractAction),
        (BRING_KIDS, Action),
        (WORK_BY_CAR, Action),
        (NON_CAR_COMMUTING, AbstractAction),
        (GO_TO_WORK, AbstractAction),
        (TRAIN, Action),
        (BIKE, Action),
    ];
    for (id, ty) in activities {
        kb.insert_activity(Activity::new(id).with_type(ty)).unwrap();
    }
    for (id, habit_rate) in [(BOB, 0.8), (ALICE, 0.5), (KID1, 0.8)] {
        kb.insert_agent(Agent {
            id: id.into(),
            habit_rate,
        })
        .unwrap();
    }
    kb.insert_context_cue(ContextCue {
        id: HOME.into(),
        kind: CueKind::Location,
    })
    .unwrap();
    kb.insert_value(Value::new(COMFORT)).unwrap();
    kb.insert_value(Value::new(ENVIRONMENT)).unwrap();

    let beliefs = [
        (ALICE, COMMUTING, 0.1, 0.8),
        (BOB, COMMUTING, 1.0, 0.8),
        (ALICE, CAR_COMMUTING, 0.1, 0.8),
        (BOB, CAR_COMMUTING, 1.0, 0.8),
        (ALICE, BRING_KIDS, 0.1, 0.8),
        (BOB, BRING_KIDS, 1.0, 0.8),
        (ALICE, WORK_BY_CAR, 0.1, 0.8),
        (BOB, WORK_BY_CAR, 1.0, 0.8),
        (ALICE, NON_CAR_COMMUTING, 1.0, 0.8),
        (ALICE, GO_TO_WORK, 1.0, 0.8),
        (ALICE, TRAIN, 1.0, 0.8),
    ];
    for (agent, activity, personal, shared) in beliefs {
        kb.insert_belief(Belief {
            agent: agent.into(),
            activity: activity.into(),
            personal,
            shared,
        })
        .unwrap();
    }

    let triggers = [
        (COMMUTING, HOME, 1.0),
        (CAR_COMMUTING, KID1, 1.0),
        (BRING_KIDS, KID1, 1.0),
        (WORK_BY_CAR, KID1, 1.0),
    ];
    for (activity, cue, strength) in triggers {
        kb.insert_habitual_trigger(HabitualTrigger {
            activity: activity.into(),
            cue: cue.into(),
            strength,
        })
        .unwrap();
    }

    kb.insert_adhered_value(AdheredValue {
        agent: BOB.into(),
        value: ENVIRONMENT.into(),
        strength: 0.8,
    })
    .unwrap();

    let related = [
        (COMMUTING, COMFORT, 0.9),
        (CAR_COMMUTING, COMFORT, 0.9),
        (TRAIN, COMFORT, 0.7),
        (BIKE, COMFORT, 0.0),
        (TRAIN, ENVIRONMENT, 1.0),
    ];
    for (activity, value, strength) in related {
        kb.insert_related_value(RelatedValue {
            activity: activity.into(),
            value: value.into(),
            strength,
            provenance: Provenance::Asserted,
        })
        .unwrap();
    }

    let edges = [
        (CAR_COMMUTING, COMMUTING, ImplType::AllOf),
        (NON_CAR_COMMUTING, COMMUTING, ImplType::AllOf),
        (BRING_KIDS, CAR_COMMUTING, ImplType::PartOf),
        (WORK_BY_CAR, CAR_COMMUTING, ImplType::PartOf),
        (GO_TO_WORK, NON_CAR_COMMUTING, ImplType::AllOf),
        (TRAIN, GO_TO_WORK, ImplType::AllOf),
        (BIKE, GO_TO_WORK, ImplType::AllOf),
    ];
    for (child, parent, kind) in edges {
        kb.insert_implementation(Implementation {
            child: child.into(),
            parent: parent.into(),
            kind,
        })
        .unwrap();
    }
    kb
}
