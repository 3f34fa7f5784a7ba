//! Reference computations shared by the integration tests. They avoid the
//! search and objective code under test.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use explicable_core::design::{
    apply_designs, DesignModification, LongitudinalParams, ObjectiveWeights,
};
use explicable_core::explicability::{most_explicable_plan, ExplicableProblem};
use explicable_core::model::{cost_to_f64, ModelPair, PlanningProblem, TaskSpec};
use explicable_core::planner::SearchLimits;

/// Length of a shortest plan by breadth-first search, ignoring costs.
pub fn bfs_plan_length(p: &PlanningProblem) -> Option<usize> {
    let mut seen = HashSet::from([p.init.clone()]);
    let mut queue = VecDeque::from([(p.init.clone(), 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if p.goal.is_subset(&s) {
            return Some(d);
        }
        for a in p.domain.actions() {
            if let Some(n) = a.apply(&s) {
                if seen.insert(n.clone()) {
                    queue.push_back((n, d + 1));
                }
            }
        }
    }
    None
}

/// `sum_{t < T} gamma^t` by direct summation.
pub fn summed_factor(gamma: f64, horizon: u32) -> f64 {
    (0..horizon).map(|t| gamma.powi(t as i32)).sum()
}

/// Objective of applying `subset` of `space`, recomputed from per-task most
/// explicable plans.
pub fn reference_objective(
    pair: &ModelPair,
    tasks: &TaskSpec,
    space: &[DesignModification],
    subset: &[usize],
    w: ObjectiveWeights,
    p: LongitudinalParams,
) -> f64 {
    let modified = apply_designs(pair, subset.iter().map(|&i| &space[i])).expect("designs apply");
    let mut ie = 0.0;
    let mut robot = 0.0;
    for (task, prob) in tasks.tasks.iter().zip(&tasks.probabilities) {
        if *prob == 0.0 {
            continue;
        }
        let r = most_explicable_plan(
            &ExplicableProblem::new(&modified, task),
            &SearchLimits::unlimited(),
        )
        .expect("fixture tasks evaluate");
        ie += prob * r.ie_min.value();
        robot += prob * r.robot_cost.map_or(f64::INFINITY, cost_to_f64);
    }
    let design: f64 = subset.iter().map(|&i| space[i].cost).sum();
    let term = |weight: f64, x: f64| if weight == 0.0 { 0.0 } else { weight * x };
    term(w.alpha, summed_factor(p.gamma, p.horizon) * ie)
        + w.beta * design
        + term(w.kappa, robot * f64::from(p.horizon))
}

/// Minimum of [`reference_objective`] over every subset of `space`.
pub fn brute_force_minimum(
    pair: &ModelPair,
    tasks: &TaskSpec,
    space: &[DesignModification],
    w: ObjectiveWeights,
    p: LongitudinalParams,
) -> (f64, Vec<usize>) {
    let n = space.len();
    (0u32..1 << n)
        .map(|m| {
            let subset: Vec<usize> = (0..n).filter(|i| m & (1 << i) != 0).collect();
            (
                reference_objective(pair, tasks, space, &subset, w, p),
                subset,
            )
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least the empty subset")
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}
