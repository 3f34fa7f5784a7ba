use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::DesignError;
use crate::model::{Domain, FluentSet, ModelError, ModelPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModificationKind {
    /// Remove actions from the human model only.
    PruneHumanAction,
    /// Remove actions from both models.
    PruneBothAction,
    /// Extend preconditions in the human model only.
    AddPreconditionHuman,
    /// Extend preconditions in both models.
    AddPreconditionBoth,
    /// A physical barrier: removes every human action that moves between the
    /// two endpoints. The robot already cannot pass, so its model is kept.
    BlockTransition,
}

impl ModificationKind {
    pub const ALL: [ModificationKind; 5] = [
        Self::PruneHumanAction,
        Self::PruneBothAction,
        Self::AddPreconditionHuman,
        Self::AddPreconditionBoth,
        Self::BlockTransition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::PruneHumanAction => "prune-human-action",
            Self::PruneBothAction => "prune-both-action",
            Self::AddPreconditionHuman => "add-precondition-human",
            Self::AddPreconditionBoth => "add-precondition-both",
            Self::BlockTransition => "block-transition",
        }
    }

    fn touches_robot(self) -> bool {
        matches!(self, Self::PruneBothAction | Self::AddPreconditionBoth)
    }

    fn adds_precondition(self) -> bool {
        matches!(self, Self::AddPreconditionHuman | Self::AddPreconditionBoth)
    }
}

impl fmt::Display for ModificationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModificationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// A modification as written in a design file, before its references are
/// checked against a model pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ModificationRecord {
    pub id: String,
    pub kind: ModificationKind,
    /// Action names; `*` matches any run of characters.
    pub actions: Vec<String>,
    pub between: Option<(String, String)>,
    pub preconditions: Vec<String>,
    pub cost: f64,
}

/// A resolved modification: concrete target actions and payload fluents.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignModification {
    pub id: String,
    pub kind: ModificationKind,
    pub targets: BTreeSet<String>,
    pub payload: FluentSet,
    pub cost: f64,
}

/// Glob match supporting only `*`.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == text;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !text.starts_with(first) || text.len() < first.len() + last.len() || !text.ends_with(last) {
        return false;
    }
    let mut rest = &text[first.len()..text.len() - last.len()];
    for mid in &parts[1..parts.len() - 1] {
        match rest.find(mid) {
            Some(i) => rest = &rest[i + mid.len()..],
            None => return false,
        }
    }
    true
}

impl DesignModification {
    pub fn resolve(record: &ModificationRecord, pair: &ModelPair) -> Result<Self, DesignError> {
        let kind = record.kind;
        let mut targets = BTreeSet::new();
        if kind == ModificationKind::BlockTransition {
            let (a, b) = record
                .between
                .as_ref()
                .ok_or_else(|| DesignError::MissingField {
                    id: record.id.clone(),
                    field: "between",
                })?;
            targets.extend(
                pair.human
                    .actions()
                    .iter()
                    .filter(|act| {
                        let args = act.arguments();
                        args.contains(&a.as_str()) && args.contains(&b.as_str())
                    })
                    .map(|act| act.name.clone()),
            );
            if targets.is_empty() {
                return Err(DesignError::NoTransition {
                    id: record.id.clone(),
                    from: a.clone(),
                    to: b.clone(),
                });
            }
        } else {
            if record.actions.is_empty() {
                return Err(DesignError::MissingField {
                    id: record.id.clone(),
                    field: "action",
                });
            }
            let human: Vec<&str> = pair.human.action_names().collect();
            let both: BTreeSet<&str> = pair
                .robot
                .action_names()
                .chain(pair.human.action_names())
                .collect();
            for pattern in &record.actions {
                let before = targets.len();
                let pool: Box<dyn Iterator<Item = &&str>> = if kind.touches_robot() {
                    Box::new(both.iter())
                } else {
                    Box::new(human.iter())
                };
                targets.extend(
                    pool.filter(|n| glob_match(pattern, n))
                        .map(|n| n.to_string()),
                );
                if targets.len() == before && !targets.iter().any(|t| glob_match(pattern, t)) {
                    return Err(DesignError::UnknownAction {
                        id: record.id.clone(),
                        action: pattern.clone(),
                    });
                }
            }
        }

        let mut payload = FluentSet::new();
        if kind.adds_precondition() {
            if record.preconditions.is_empty() {
                return Err(DesignError::MissingField {
                    id: record.id.clone(),
                    field: "precondition",
                });
            }
            for name in &record.preconditions {
                let f = pair
                    .vocab()
                    .id(name)
                    .ok_or_else(|| DesignError::UnknownFluent {
                        id: record.id.clone(),
                        fluent: name.clone(),
                    })?;
                payload.insert(f);
            }
        }
        if record.cost < 0.0 || !record.cost.is_finite() {
            return Err(DesignError::BadCost {
                id: record.id.clone(),
                cost: record.cost,
            });
        }
        Ok(DesignModification {
            id: record.id.clone(),
            kind,
            targets,
            payload,
            cost: record.cost,
        })
    }

    /// Whether this modification changes the robot's own model.
    pub fn touches_robot(&self) -> bool {
        self.kind.touches_robot()
    }
}

/// `Λ`: the model pair after applying a set of modifications. Order does not
/// matter and applying a modification twice equals applying it once.
pub fn apply_designs<'a, I>(pair: &ModelPair, mods: I) -> Result<ModelPair, ModelError>
where
    I: IntoIterator<Item = &'a DesignModification>,
{
    let mods: Vec<&DesignModification> = mods.into_iter().collect();
    let rewrite = |domain: &Arc<Domain>, robot: bool| -> Result<Arc<Domain>, ModelError> {
        let relevant: Vec<&&DesignModification> = mods
            .iter()
            .filter(|m| !robot || m.touches_robot())
            .collect();
        if relevant.is_empty() {
            return Ok(Arc::clone(domain));
        }
        let mut actions = Vec::with_capacity(domain.actions().len());
        for a in domain.actions() {
            let mut a = a.clone();
            let mut removed = false;
            for m in &relevant {
                if !m.targets.contains(&a.name) {
                    continue;
                }
                if m.kind.adds_precondition() {
                    a.pre.union_with(&m.payload);
                } else {
                    removed = true;
                }
            }
            if !removed {
                actions.push(a);
            }
        }
        Ok(Arc::new(Domain::new(Arc::clone(domain.vocab()), actions)?))
    };
    ModelPair::new(rewrite(&pair.robot, true)?, rewrite(&pair.human, false)?)
}

/// A node of the design search: the base pair after applying `applied`
/// (indices into the design space, sorted).
#[derive(Debug, Clone)]
pub struct Configuration {
    pub pair: Arc<ModelPair>,
    pub applied: Vec<usize>,
}

impl Configuration {
    pub fn new(
        base: &ModelPair,
        space: &[DesignModification],
        applied: &[usize],
    ) -> Result<Self, ModelError> {
        let mut applied = applied.to_vec();
        applied.sort_unstable();
        applied.dedup();
        let pair = if applied.is_empty() {
            base.clone()
        } else {
            apply_designs(base, applied.iter().map(|&i| &space[i]))?
        };
        Ok(Configuration {
            pair: Arc::new(pair),
            applied,
        })
    }

    /// Canonical identity: the sorted modification ids.
    pub fn ids(&self, space: &[DesignModification]) -> Vec<String> {
        sorted_ids(space, &self.applied)
    }

    pub fn design_cost(&self, space: &[DesignModification]) -> f64 {
        self.applied.iter().map(|&i| space[i].cost).sum()
    }
}

pub fn sorted_ids(space: &[DesignModification], applied: &[usize]) -> Vec<String> {
    let mut ids: Vec<String> = applied.iter().map(|&i| space[i].id.clone()).collect();
    ids.sort();
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, Vocabulary};

    #[test]
    fn glob() {
        assert!(glob_match("stack_a_*", "stack_a_b"));
        assert!(!glob_match("stack_a_*", "stack_b_a"));
        assert!(glob_match("move-diag_*_c11", "move-diag_c00_c11"));
        assert!(glob_match("*", "anything"));
        assert!(glob_match("a*b*c", "aXXbYYc"));
        assert!(!glob_match("a*b*c", "aXXcYYb"));
        assert!(glob_match("exact", "exact"));
        assert!(!glob_match("ab*ba", "aba"));
    }

    fn pair() -> ModelPair {
        let v = Arc::new(Vocabulary::new(["p", "q", "gate"]).unwrap());
        let s = |n: &[&str]| v.set_of(n.iter().copied()).unwrap();
        let mk = |name: &str, args: &[&str]| {
            Action::new(name, s(&["p"]), s(&["q"]), s(&["p"]))
                .with_signature("move", args.iter().map(|a| a.to_string()).collect())
        };
        let robot = vec![mk("move_x_y", &["x", "y"])];
        let human = vec![
            mk("move_x_y", &["x", "y"]),
            mk("move_y_x", &["y", "x"]),
            mk("move_y_z", &["y", "z"]),
        ];
        ModelPair::new(
            Arc::new(Domain::new(Arc::clone(&v), robot).unwrap()),
            Arc::new(Domain::new(v, human).unwrap()),
        )
        .unwrap()
    }

    fn record(kind: ModificationKind) -> ModificationRecord {
        ModificationRecord {
            id: "m".into(),
            kind,
            actions: vec!["move_x_*".into()],
            between: Some(("x".into(), "y".into())),
            preconditions: vec!["gate".into()],
            cost: 1.0,
        }
    }

    #[test]
    fn block_transition_removes_both_directions_from_human() {
        let p = pair();
        let m =
            DesignModification::resolve(&record(ModificationKind::BlockTransition), &p).unwrap();
        assert_eq!(
            m.targets.iter().collect::<Vec<_>>(),
            ["move_x_y", "move_y_x"]
        );
        let after = apply_designs(&p, [&m]).unwrap();
        assert_eq!(after.human.action_names().collect::<Vec<_>>(), ["move_y_z"]);
        assert!(Arc::ptr_eq(&after.robot, &p.robot));
    }

    #[test]
    fn add_precondition_both_and_idempotence() {
        let p = pair();
        let m = DesignModification::resolve(&record(ModificationKind::AddPreconditionBoth), &p)
            .unwrap();
        let once = apply_designs(&p, [&m]).unwrap();
        let twice = apply_designs(&p, [&m, &m]).unwrap();
        assert_eq!(once, twice);
        let gate = p.vocab().id("gate").unwrap();
        assert!(once.robot.action("move_x_y").unwrap().pre.contains(gate));
        assert!(once.human.action("move_x_y").unwrap().pre.contains(gate));
        assert!(!once.human.action("move_y_x").unwrap().pre.contains(gate));
    }

    #[test]
    fn empty_design_is_identity() {
        let p = pair();
        assert_eq!(apply_designs(&p, []).unwrap(), p);
    }

    #[test]
    fn unresolvable_references_are_errors() {
        let p = pair();
        let mut r = record(ModificationKind::PruneHumanAction);
        r.actions = vec!["stack_*".into()];
        assert!(matches!(
            DesignModification::resolve(&r, &p),
            Err(DesignError::UnknownAction { .. })
        ));
        let mut r = record(ModificationKind::AddPreconditionHuman);
        r.preconditions = vec!["nope".into()];
        assert!(matches!(
            DesignModification::resolve(&r, &p),
            Err(DesignError::UnknownFluent { .. })
        ));
        let mut r = record(ModificationKind::BlockTransition);
        r.between = Some(("x".into(), "z".into()));
        assert!(matches!(
            DesignModification::resolve(&r, &p),
            Err(DesignError::NoTransition { .. })
        ));
    }

    #[test]
    fn configuration_identity_ignores_order() {
        let p = pair();
        let a = DesignModification {
            id: "b".into(),
            ..DesignModification::resolve(&record(ModificationKind::PruneHumanAction), &p).unwrap()
        };
        let b = DesignModification {
            id: "a".into(),
            ..DesignModification::resolve(&record(ModificationKind::BlockTransition), &p).unwrap()
        };
        let space = vec![a, b];
        let c1 = Configuration::new(&p, &space, &[0, 1]).unwrap();
        let c2 = Configuration::new(&p, &space, &[1, 0, 1]).unwrap();
        assert_eq!(c1.applied, c2.applied);
        assert_eq!(c1.ids(&space), ["a", "b"]);
        assert_eq!(c1.pair.canonical_hash(), c2.pair.canonical_hash());
        assert_eq!(c1.design_cost(&space), 2.0);
    }
}
