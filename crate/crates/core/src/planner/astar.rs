use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use super::heuristic::HmaxScratch;
use super::{IndexedProblem, SearchLimits, SearchResult, SearchStatus};
use crate::model::{Plan, PlanningProblem, State};

struct Node {
    state: State,
    parent: Option<usize>,
    action: Option<u32>,
    g: u64,
}

struct Registered {
    g: u64,
    h: Option<u64>,
}

/// A* with `h_max`. The open list is ordered by `(f, h, insertion order)`
/// and successors are generated in action-name order, so the returned plan
/// is a deterministic function of the problem.
///
/// States are reopened when reached with a cheaper `g`: `h_max` is
/// admissible but not consistent once action costs differ.
pub fn solve_optimal(problem: &PlanningProblem, limits: &SearchLimits) -> SearchResult {
    let start = Instant::now();
    let ix = IndexedProblem::new(problem);
    let mut hmax = HmaxScratch::new(&ix);
    let actions = problem.domain.actions();

    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashMap<State, Registered> = HashMap::new();
    let mut open: BinaryHeap<Reverse<(u64, u64, u64, usize)>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut expanded = 0u64;
    let mut generated = 1u64;

    let finish = |status, plan, cost, expanded, generated| SearchResult {
        status,
        plan,
        cost,
        expanded,
        generated,
        elapsed: start.elapsed(),
    };

    let h0 = hmax.eval(&ix, &problem.init);
    let Some(h0) = h0 else {
        return finish(SearchStatus::Unsolvable, None, None, 0, generated);
    };
    nodes.push(Node {
        state: problem.init.clone(),
        parent: None,
        action: None,
        g: 0,
    });
    seen.insert(problem.init.clone(), Registered { g: 0, h: Some(h0) });
    open.push(Reverse((h0, h0, seq, 0)));

    while let Some(Reverse((f, _, _, idx))) = open.pop() {
        let g = nodes[idx].g;
        if seen[&nodes[idx].state].g < g {
            continue;
        }
        if problem.is_goal(&nodes[idx].state) {
            let plan = reconstruct(&nodes, idx, problem);
            return finish(
                SearchStatus::Solved,
                Some(plan),
                Some(ix.to_cost(g)),
                expanded,
                generated,
            );
        }
        let out_of_budget = limits.max_expansions.is_some_and(|m| expanded >= m)
            || (expanded.is_multiple_of(256)
                && limits.time_limit.is_some_and(|t| start.elapsed() >= t));
        if out_of_budget {
            return finish(
                SearchStatus::Timeout {
                    lower_bound: Some(ix.to_cost(f)),
                },
                None,
                None,
                expanded,
                generated,
            );
        }
        expanded += 1;

        for (ai, action) in actions.iter().enumerate() {
            let Some(next) = action.apply(&nodes[idx].state) else {
                continue;
            };
            generated += 1;
            let ng = g + ix.costs[ai];
            let h = match seen.entry(next.clone()) {
                Entry::Occupied(mut e) => {
                    let reg = e.get_mut();
                    if reg.g <= ng {
                        continue;
                    }
                    reg.g = ng;
                    reg.h
                }
                Entry::Vacant(e) => {
                    let h = hmax.eval(&ix, &next);
                    e.insert(Registered { g: ng, h });
                    h
                }
            };
            let Some(h) = h else { continue };
            seq += 1;
            nodes.push(Node {
                state: next,
                parent: Some(idx),
                action: Some(ai as u32),
                g: ng,
            });
            open.push(Reverse((ng + h, h, seq, nodes.len() - 1)));
        }
    }
    finish(SearchStatus::Unsolvable, None, None, expanded, generated)
}

fn reconstruct(nodes: &[Node], mut idx: usize, problem: &PlanningProblem) -> Plan {
    let actions = problem.domain.actions();
    let mut steps = Vec::new();
    while let Some(a) = nodes[idx].action {
        steps.push(actions[a as usize].name.clone());
        idx = nodes[idx].parent.expect("non-root node has a parent");
    }
    steps.reverse();
    Plan { steps }
}
