//! Random small STRIPS problems and model pairs for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    Action, Domain, FluentId, FluentSet, ModelPair, PlanningProblem, Task, Vocabulary,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub fluents: usize,
    pub actions: usize,
    /// Extra actions only the human believes in.
    pub human_only: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            fluents: 8,
            actions: 7,
            human_only: 1,
        }
    }
}

fn subset<R: Rng>(rng: &mut R, pool: &[FluentId], min: usize, max: usize) -> FluentSet {
    let k = rng.gen_range(min..=max.min(pool.len()));
    pool.choose_multiple(rng, k).copied().collect()
}

fn vocab(n: usize) -> Arc<Vocabulary> {
    Arc::new(Vocabulary::new((0..n).map(|i| format!("f{i}"))).expect("distinct names"))
}

fn random_action<R: Rng>(rng: &mut R, name: String, ids: &[FluentId]) -> Action {
    let pre = subset(rng, ids, 0, 2);
    let add = subset(rng, ids, 1, 2);
    let mut del = subset(rng, ids, 0, 2);
    del.difference_with(&add);
    Action::new(name, pre, add, del)
}

fn finish(
    vocab: Arc<Vocabulary>,
    actions: Vec<Action>,
    init: FluentSet,
    goal: FluentSet,
) -> PlanningProblem {
    let domain = Domain::new(vocab, actions).expect("generated domain is well formed");
    PlanningProblem::new(Arc::new(domain), init, goal).expect("generated problem is well formed")
}

/// A unit-cost problem with `shape.fluents` fluents and `shape.actions`
/// actions.
pub fn random_problem<R: Rng>(rng: &mut R, shape: RandomShape) -> PlanningProblem {
    let v = vocab(shape.fluents);
    let ids: Vec<FluentId> = (0..shape.fluents as u32).map(FluentId).collect();
    let actions = (0..shape.actions)
        .map(|i| random_action(rng, format!("a{i}"), &ids))
        .collect();
    let init = subset(rng, &ids, 1, 3);
    let goal = subset(rng, &ids, 1, 2);
    finish(v, actions, init, goal)
}

/// Perturbs one action into the human's belief about it.
fn believe<R: Rng>(rng: &mut R, a: &Action, ids: &[FluentId]) -> Action {
    let mut h = a.clone();
    match rng.gen_range(0..6) {
        0 => {
            if let Some(f) = a.pre.iter().collect::<Vec<_>>().choose(rng) {
                h.pre.remove(*f);
            }
        }
        1 => h
            .pre
            .insert(*ids.choose(rng).expect("non-empty vocabulary")),
        2 => {
            let f = *ids.choose(rng).expect("non-empty vocabulary");
            h.add.insert(f);
            h.del.remove(f);
        }
        3 => {
            let f = *ids.choose(rng).expect("non-empty vocabulary");
            if !h.add.contains(f) {
                h.del.insert(f);
            }
        }
        _ => {}
    }
    h
}

/// A robot model, a human model that mostly agrees with it, and one task.
pub fn random_model_pair<R: Rng>(rng: &mut R, shape: RandomShape) -> (ModelPair, Task) {
    let v = vocab(shape.fluents);
    let ids: Vec<FluentId> = (0..shape.fluents as u32).map(FluentId).collect();
    let robot: Vec<Action> = (0..shape.actions)
        .map(|i| random_action(rng, format!("a{i}"), &ids))
        .collect();
    let mut human: Vec<Action> = robot.iter().map(|a| believe(rng, a, &ids)).collect();
    let extra = rng.gen_range(0..=shape.human_only);
    human.extend((0..extra).map(|i| random_action(rng, format!("h{i}"), &ids)));
    let pair = ModelPair::new(
        Arc::new(Domain::new(Arc::clone(&v), robot).expect("generated domain is well formed")),
        Arc::new(Domain::new(v, human).expect("generated domain is well formed")),
    )
    .expect("shared vocabulary");
    let task = Task {
        name: "random".into(),
        init: subset(rng, &ids, 1, 3),
        goal: subset(rng, &ids, 1, 2),
    };
    (pair, task)
}
