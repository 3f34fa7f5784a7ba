use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::{
    ConfigEvaluation, Configuration, DesignError, DesignModification, Evaluator,
    LongitudinalParams, ObjectiveWeights,
};
use crate::model::{ModelPair, TaskSpec};
use crate::planner::SearchLimits;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Wall-clock budget for the whole design search.
    pub time_limit: Option<Duration>,
    pub max_design_size: Option<usize>,
    pub prune: bool,
    /// Limits for each inner planner call.
    pub planner_limits: SearchLimits,
    /// Worker threads for evaluating a BFS layer; 0 uses rayon's default.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            time_limit: None,
            max_design_size: None,
            prune: true,
            planner_limits: SearchLimits::unlimited(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignProblem {
    pub pair: ModelPair,
    pub tasks: TaskSpec,
    pub space: Vec<DesignModification>,
    pub weights: ObjectiveWeights,
    pub params: LongitudinalParams,
    pub options: SearchOptions,
}

impl DesignProblem {
    pub fn validate(&self) -> Result<(), DesignError> {
        self.weights.validate()?;
        self.params.validate()?;
        let mut ids = HashSet::new();
        for m in &self.space {
            if !ids.insert(m.id.as_str()) {
                return Err(DesignError::DuplicateId(m.id.clone()));
            }
        }
        Ok(())
    }

    fn max_size(&self) -> usize {
        self.options
            .max_design_size
            .unwrap_or(self.space.len())
            .min(self.space.len())
    }
}

/// One explored configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub design: Vec<String>,
    pub expected_ie: f64,
    pub longitudinal_ie: f64,
    pub expected_robot_cost: f64,
    pub design_cost: f64,
    pub objective: f64,
    pub failure: Option<String>,
}

impl From<&ConfigEvaluation> for NodeRecord {
    fn from(e: &ConfigEvaluation) -> Self {
        NodeRecord {
            design: e.design.clone(),
            expected_ie: e.expected_ie,
            longitudinal_ie: e.longitudinal_ie,
            expected_robot_cost: e.expected_robot_cost,
            design_cost: e.design_cost,
            objective: e.objective,
            failure: e.failure.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub design: Vec<String>,
    pub evaluation: ConfigEvaluation,
    /// Evaluation of the unmodified environment.
    pub baseline: ConfigEvaluation,
    pub log: Vec<NodeRecord>,
    /// The time limit expired before the space was exhausted.
    pub anytime: bool,
    pub elapsed: Duration,
}

/// Smaller objective, then smaller design cost, then lexicographically
/// smaller sorted id list.
fn rank(a: &ConfigEvaluation, b: &ConfigEvaluation) -> Ordering {
    a.objective
        .total_cmp(&b.objective)
        .then(a.design_cost.total_cmp(&b.design_cost))
        .then_with(|| a.design.cmp(&b.design))
}

/// Modifications among `candidates` whose targets occur in a witness optimal
/// plan of either model for some task. If a witness cannot be computed
/// within the planner limits nothing is pruned.
pub fn relevance_prune(
    space: &[DesignModification],
    candidates: &[usize],
    cfg: &Configuration,
    evaluator: &Evaluator<'_>,
) -> Vec<usize> {
    let mut used = BTreeSet::new();
    for (i, task, _) in evaluator.tasks().support() {
        for problem in [cfg.pair.robot_problem(task), cfg.pair.human_problem(task)] {
            match evaluator.witness(&problem, i) {
                Ok(Some(plan)) => used.extend(plan.steps),
                Ok(None) => {}
                Err(()) => return candidates.to_vec(),
            }
        }
    }
    candidates
        .iter()
        .copied()
        .filter(|&c| space[c].targets.iter().any(|t| used.contains(t)))
        .collect()
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, DesignError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| DesignError::InvalidParameter(format!("thread pool: {e}")))
}

/// Breadth-first search over design subsets in order of size, starting from
/// the empty design.
type NodeResult = Result<(ConfigEvaluation, Vec<usize>), DesignError>;

pub fn search(dp: &DesignProblem) -> Result<SearchOutcome, DesignError> {
    dp.validate()?;
    let start = Instant::now();
    let deadline = dp.options.time_limit.map(|t| start + t);
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);
    let evaluator = Evaluator::new(&dp.tasks, dp.weights, dp.params, dp.options.planner_limits);
    let pool = thread_pool(dp.options.workers)?;
    let max_size = dp.max_size();

    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    visited.insert(Vec::new());
    let mut log = Vec::new();
    let mut best: Option<ConfigEvaluation> = None;
    let mut baseline = None;
    let mut anytime = false;

    while !layer.is_empty() {
        let expand = layer[0].len() < max_size;
        let results: Vec<Option<NodeResult>> = pool.install(|| {
            layer
                .par_iter()
                .map(|node| {
                    if !node.is_empty() && expired() {
                        return None;
                    }
                    Some(evaluate_node(dp, &evaluator, node, expand))
                })
                .collect()
        });
        let mut next = BTreeSet::new();
        for (node, r) in layer.iter().zip(results) {
            let Some(r) = r else {
                anytime = true;
                continue;
            };
            let (eval, relevant) = r?;
            log.push(NodeRecord::from(&eval));
            for c in relevant {
                let mut child = node.clone();
                child.push(c);
                child.sort_unstable();
                if visited.insert(child.clone()) {
                    next.insert(child);
                }
            }
            if node.is_empty() {
                baseline = Some(eval.clone());
            }
            if best
                .as_ref()
                .is_none_or(|b| rank(&eval, b) == Ordering::Less)
            {
                best = Some(eval);
            }
        }
        if anytime {
            break;
        }
        layer = next.into_iter().collect();
    }
    let evaluation = best.expect("the empty design is always evaluated");
    Ok(SearchOutcome {
        design: evaluation.design.clone(),
        evaluation,
        baseline: baseline.expect("the empty design is always evaluated"),
        log,
        anytime,
        elapsed: start.elapsed(),
    })
}

fn evaluate_node(
    dp: &DesignProblem,
    evaluator: &Evaluator<'_>,
    node: &[usize],
    expand: bool,
) -> Result<(ConfigEvaluation, Vec<usize>), DesignError> {
    let cfg = Configuration::new(&dp.pair, &dp.space, node)?;
    let eval = evaluator.evaluate(&cfg, &dp.space);
    if !expand {
        return Ok((eval, Vec::new()));
    }
    let candidates: Vec<usize> = (0..dp.space.len()).filter(|c| !node.contains(c)).collect();
    let relevant = if dp.options.prune {
        relevance_prune(&dp.space, &candidates, &cfg, evaluator)
    } else {
        candidates
    };
    Ok((eval, relevant))
}

/// Brute-force minimum over every subset of the design space, respecting
/// `max_design_size`. Intended for small spaces.
pub fn exhaustive_optimum(dp: &DesignProblem) -> Result<ConfigEvaluation, DesignError> {
    dp.validate()?;
    let n = dp.space.len();
    if n > 20 {
        return Err(DesignError::InvalidParameter(format!(
            "exhaustive evaluation over {n} modifications is infeasible"
        )));
    }
    let evaluator = Evaluator::new(&dp.tasks, dp.weights, dp.params, dp.options.planner_limits);
    let pool = thread_pool(dp.options.workers)?;
    let max_size = dp.max_size();
    let subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max_size)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let evals: Vec<Result<ConfigEvaluation, DesignError>> = pool.install(|| {
        subsets
            .par_iter()
            .map(|s| {
                let cfg = Configuration::new(&dp.pair, &dp.space, s)?;
                Ok(evaluator.evaluate(&cfg, &dp.space))
            })
            .collect()
    });
    let mut best: Option<ConfigEvaluation> = None;
    for e in evals {
        let e = e?;
        if best.as_ref().is_none_or(|b| rank(&e, b) == Ordering::Less) {
            best = Some(e);
        }
    }
    Ok(best.expect("the empty subset is always present"))
}

/// Explored nodes not dominated on (longitudinal inexplicability, design
/// cost, expected robot cost).
pub fn pareto_front(log: &[NodeRecord]) -> Vec<&NodeRecord> {
    let key = |r: &NodeRecord| [r.longitudinal_ie, r.design_cost, r.expected_robot_cost];
    let dominates = |a: &NodeRecord, b: &NodeRecord| {
        let (ka, kb) = (key(a), key(b));
        ka.iter().zip(&kb).all(|(x, y)| x <= y) && ka != kb
    };
    log.iter()
        .filter(|r| r.failure.is_none() && key(r).iter().all(|x| x.is_finite()))
        .filter(|r| !log.iter().any(|o| o.failure.is_none() && dominates(o, r)))
        .collect()
}
