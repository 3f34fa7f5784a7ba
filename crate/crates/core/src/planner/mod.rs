//! Optimal forward search over grounded problems.
//!
//! [`solve_optimal`] runs A* with the [`h_max`] delete-relaxation heuristic.
//! [`enumerate_plans`] is an exhaustive depth-first oracle meant for tests on
//! small instances.

mod astar;
mod enumerate;
mod heuristic;

use std::time::Duration;

use thiserror::Error;

use crate::model::{Cost, Plan, PlanningProblem};

pub use astar::solve_optimal;
pub use enumerate::{enumerate_plans, EnumerateOptions};
pub use heuristic::h_max;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlannerError {
    #[error("plan enumeration exceeded its cap of {0} nodes")]
    NodeCapExceeded(u64),
    #[error("exhaustive enumeration without cycle avoidance needs strictly positive costs")]
    ZeroCostAction,
}

/// Resource limits for one A* run. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_expansions: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStatus {
    Solved,
    Unsolvable,
    /// Limits hit before the search finished. `lower_bound` is the smallest
    /// f-value left on the open list.
    Timeout {
        lower_bound: Option<Cost>,
    },
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub plan: Option<Plan>,
    pub cost: Option<Cost>,
    pub expanded: u64,
    pub generated: u64,
    pub elapsed: Duration,
}

impl SearchResult {
    pub fn is_solved(&self) -> bool {
        self.status == SearchStatus::Solved
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self.status, SearchStatus::Timeout { .. })
    }
}

/// Integer view of a problem. Costs are scaled by the lcm of all
/// denominators so the inner loops never touch rationals.
pub(crate) struct IndexedProblem<'a> {
    pub problem: &'a PlanningProblem,
    pub scale: u64,
    pub costs: Vec<u64>,
    pub pre: Vec<Vec<u32>>,
    pub add: Vec<Vec<u32>>,
    /// Actions that have fluent `f` as a precondition.
    pub pre_of: Vec<Vec<u32>>,
    pub goal: Vec<u32>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl<'a> IndexedProblem<'a> {
    pub fn new(problem: &'a PlanningProblem) -> Self {
        let actions = problem.domain.actions();
        let scale = actions
            .iter()
            .map(|a| *a.cost.denom())
            .fold(1u64, |acc, d| acc / gcd(acc, d) * d);
        let costs = actions
            .iter()
            .map(|a| a.cost.numer() * (scale / a.cost.denom()))
            .collect();
        let ids = |s: &crate::model::FluentSet| s.iter().map(|f| f.0).collect::<Vec<u32>>();
        let pre: Vec<Vec<u32>> = actions.iter().map(|a| ids(&a.pre)).collect();
        let add = actions.iter().map(|a| ids(&a.add)).collect();
        let mut pre_of = vec![Vec::new(); problem.vocab().len()];
        for (i, p) in pre.iter().enumerate() {
            for &f in p {
                pre_of[f as usize].push(i as u32);
            }
        }
        IndexedProblem {
            problem,
            scale,
            costs,
            pre,
            add,
            pre_of,
            goal: ids(&problem.goal),
        }
    }

    pub fn to_cost(&self, scaled: u64) -> Cost {
        Cost::new(scaled, self.scale)
    }

    /// Largest scaled cost not exceeding `bound`.
    pub fn scale_bound(&self, bound: Cost) -> u64 {
        let n = *bound.numer() as u128 * self.scale as u128 / *bound.denom() as u128;
        n.min(u64::MAX as u128) as u64
    }
}
