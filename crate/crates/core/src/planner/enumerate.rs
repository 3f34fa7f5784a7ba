use std::collections::BTreeSet;

use super::{IndexedProblem, PlannerError};
use crate::model::{Cost, Plan, PlanningProblem, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Hard cap on visited search nodes.
    pub node_cap: u64,
    /// Skip successors that revisit a state already on the current branch.
    /// Without it every plan under the bound is produced, which requires
    /// strictly positive action costs.
    pub avoid_cycles: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            node_cap: 2_000_000,
            avoid_cycles: true,
        }
    }
}

/// Every valid plan whose cost is at most `bound`, by exhaustive
/// depth-first search. Intended as a test oracle on small instances.
pub fn enumerate_plans(
    problem: &PlanningProblem,
    bound: Cost,
    opts: &EnumerateOptions,
) -> Result<BTreeSet<Plan>, PlannerError> {
    let ix = IndexedProblem::new(problem);
    if !opts.avoid_cycles && ix.costs.contains(&0) {
        return Err(PlannerError::ZeroCostAction);
    }
    let mut dfs = Dfs {
        ix: &ix,
        bound: ix.scale_bound(bound),
        opts,
        nodes: 0,
        branch_states: vec![problem.init.clone()],
        branch_actions: Vec::new(),
        out: BTreeSet::new(),
    };
    dfs.visit(&problem.init.clone(), 0)?;
    Ok(dfs.out)
}

struct Dfs<'a, 'p> {
    ix: &'a IndexedProblem<'p>,
    bound: u64,
    opts: &'a EnumerateOptions,
    nodes: u64,
    branch_states: Vec<State>,
    branch_actions: Vec<usize>,
    out: BTreeSet<Plan>,
}

impl Dfs<'_, '_> {
    fn visit(&mut self, state: &State, g: u64) -> Result<(), PlannerError> {
        self.nodes += 1;
        if self.nodes > self.opts.node_cap {
            return Err(PlannerError::NodeCapExceeded(self.opts.node_cap));
        }
        let problem = self.ix.problem;
        if problem.is_goal(state) {
            let actions = problem.domain.actions();
            self.out.insert(Plan {
                steps: self
                    .branch_actions
                    .iter()
                    .map(|&a| actions[a].name.clone())
                    .collect(),
            });
        }
        for (ai, action) in problem.domain.actions().iter().enumerate() {
            let ng = g + self.ix.costs[ai];
            if ng > self.bound {
                continue;
            }
            let Some(next) = action.apply(state) else {
                continue;
            };
            if self.opts.avoid_cycles && self.branch_states.contains(&next) {
                continue;
            }
            self.branch_states.push(next.clone());
            self.branch_actions.push(ai);
            let r = self.visit(&next, ng);
            self.branch_states.pop();
            self.branch_actions.pop();
            r?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{Action, Domain, FluentSet, Vocabulary};
    use crate::planner::{solve_optimal, SearchLimits};

    /// 2x2 grid from (0,0) to (1,1).
    fn square() -> PlanningProblem {
        let cells = ["c00", "c01", "c10", "c11"];
        let v = Arc::new(Vocabulary::new(cells).unwrap());
        let edges = [
            ("c00", "c01"),
            ("c00", "c10"),
            ("c01", "c11"),
            ("c10", "c11"),
        ];
        let mut acts = Vec::new();
        for (a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                let (ix, iy) = (v.id(x).unwrap(), v.id(y).unwrap());
                acts.push(Action::new(
                    format!("move_{x}_{y}"),
                    FluentSet::from_ids([ix]),
                    FluentSet::from_ids([iy]),
                    FluentSet::from_ids([ix]),
                ));
            }
        }
        let init = v.set_of(["c00"]).unwrap();
        let goal = v.set_of(["c11"]).unwrap();
        PlanningProblem::new(Arc::new(Domain::new(v, acts).unwrap()), init, goal).unwrap()
    }

    #[test]
    fn bound_below_optimum_is_empty() {
        let p = square();
        let plans =
            enumerate_plans(&p, Cost::from_integer(1), &EnumerateOptions::default()).unwrap();
        assert!(plans.is_empty());
    }

    #[test]
    fn both_symmetric_routes_found() {
        let p = square();
        let plans =
            enumerate_plans(&p, Cost::from_integer(2), &EnumerateOptions::default()).unwrap();
        let expected: BTreeSet<Plan> = [
            Plan::new(["move_c00_c01", "move_c01_c11"]),
            Plan::new(["move_c00_c10", "move_c10_c11"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(plans, expected);
        let best = solve_optimal(&p, &SearchLimits::unlimited());
        assert!(plans.contains(best.plan.as_ref().unwrap()));
    }

    #[test]
    fn cycles_only_without_avoidance() {
        let p = square();
        let opts = EnumerateOptions {
            avoid_cycles: false,
            ..Default::default()
        };
        let all = enumerate_plans(&p, Cost::from_integer(4), &opts).unwrap();
        let acyclic =
            enumerate_plans(&p, Cost::from_integer(4), &EnumerateOptions::default()).unwrap();
        assert!(acyclic.is_subset(&all));
        assert!(all.contains(&Plan::new([
            "move_c00_c01",
            "move_c01_c00",
            "move_c00_c01",
            "move_c01_c11"
        ])));
        assert!(all.iter().all(|pl| p.is_valid_plan(pl)));
    }

    #[test]
    fn node_cap_is_a_hard_error() {
        let p = square();
        let opts = EnumerateOptions {
            node_cap: 3,
            avoid_cycles: true,
        };
        assert_eq!(
            enumerate_plans(&p, Cost::from_integer(10), &opts),
            Err(PlannerError::NodeCapExceeded(3))
        );
    }

    #[test]
    fn zero_cost_rejected_without_cycle_avoidance() {
        let v = Arc::new(Vocabulary::new(["p"]).unwrap());
        let a = Action::new("free", FluentSet::new(), FluentSet::new(), FluentSet::new())
            .with_cost(Cost::from_integer(0));
        let p = PlanningProblem::new(
            Arc::new(Domain::new(v, vec![a]).unwrap()),
            FluentSet::new(),
            FluentSet::new(),
        )
        .unwrap();
        let opts = EnumerateOptions {
            avoid_cycles: false,
            ..Default::default()
        };
        assert_eq!(
            enumerate_plans(&p, Cost::from_integer(1), &opts),
            Err(PlannerError::ZeroCostAction)
        );
        assert_eq!(
            enumerate_plans(&p, Cost::from_integer(1), &EnumerateOptions::default())
                .unwrap()
                .len(),
            1
        );
    }
}
