use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::IndexedProblem;
use crate::model::{Cost, PlanningProblem, State};

/// The max-cost delete relaxation heuristic from `s`. `None` means the goal
/// is unreachable even with deletes ignored.
pub fn h_max(problem: &PlanningProblem, s: &State) -> Option<Cost> {
    let ix = IndexedProblem::new(problem);
    let mut scratch = HmaxScratch::new(&ix);
    scratch.eval(&ix, s).map(|h| ix.to_cost(h))
}

/// Reusable buffers for repeated evaluations inside a search.
pub(crate) struct HmaxScratch {
    dist: Vec<u64>,
    unmet: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
    is_goal: Vec<bool>,
}

impl HmaxScratch {
    pub fn new(ix: &IndexedProblem<'_>) -> Self {
        let n = ix.pre_of.len();
        let mut is_goal = vec![false; n];
        for &g in &ix.goal {
            is_goal[g as usize] = true;
        }
        HmaxScratch {
            dist: vec![u64::MAX; n],
            unmet: vec![0; ix.pre.len()],
            heap: BinaryHeap::new(),
            is_goal,
        }
    }

    /// Generalised Dijkstra over fluents: an action fires once its last
    /// precondition is settled, at the cost of that (maximal) precondition.
    pub fn eval(&mut self, ix: &IndexedProblem<'_>, s: &State) -> Option<u64> {
        if ix.goal.is_empty() {
            return Some(0);
        }
        self.dist.fill(u64::MAX);
        self.heap.clear();
        for &g in &ix.goal {
            self.is_goal[g as usize] = true;
        }
        for (a, p) in ix.pre.iter().enumerate() {
            self.unmet[a] = p.len() as u32;
        }
        for f in s.iter() {
            self.dist[f.index()] = 0;
            self.heap.push(Reverse((0, f.0)));
        }
        for (a, p) in ix.pre.iter().enumerate() {
            if p.is_empty() {
                self.fire(ix, a, 0);
            }
        }
        let mut goals_left = ix.goal.len();
        while let Some(Reverse((d, f))) = self.heap.pop() {
            if d > self.dist[f as usize] {
                continue;
            }
            if self.is_goal[f as usize] {
                goals_left -= 1;
                if goals_left == 0 {
                    return Some(d);
                }
                // Mark settled so duplicates on the heap are not counted twice.
                self.is_goal[f as usize] = false;
            }
            for &a in &ix.pre_of[f as usize] {
                let u = &mut self.unmet[a as usize];
                *u -= 1;
                if *u == 0 {
                    self.fire(ix, a as usize, d);
                }
            }
        }
        None
    }

    fn fire(&mut self, ix: &IndexedProblem<'_>, a: usize, at: u64) {
        let nd = at.saturating_add(ix.costs[a]);
        for &q in &ix.add[a] {
            if nd < self.dist[q as usize] {
                self.dist[q as usize] = nd;
                self.heap.push(Reverse((nd, q)));
            }
        }
    }
}
