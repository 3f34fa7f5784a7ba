use std::collections::HashMap;
use std::sync::Mutex;

use super::{Configuration, DesignError, DesignModification};
use crate::explicability::{
    most_explicable_plan, ExplicabilityError, ExplicableProblem, MostExplicableResult,
};
use crate::model::{cost_to_f64, Plan, PlanningProblem, TaskSpec};
use crate::planner::{solve_optimal, SearchLimits, SearchStatus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        ObjectiveWeights {
            alpha: 1.0,
            beta: 0.25,
            kappa: 0.25,
        }
    }
}

impl ObjectiveWeights {
    pub fn new(alpha: f64, beta: f64, kappa: f64) -> Result<Self, DesignError> {
        let w = ObjectiveWeights { alpha, beta, kappa };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        let all = [self.alpha, self.beta, self.kappa];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(DesignError::InvalidParameter(format!(
                "weights must be finite and non-negative, got {all:?}"
            )));
        }
        if all.iter().all(|x| *x == 0.0) {
            return Err(DesignError::InvalidParameter("weights are all zero".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongitudinalParams {
    /// Probability, per interaction, that the human keeps registering
    /// inexplicable behavior.
    pub gamma: f64,
    pub horizon: u32,
}

impl Default for LongitudinalParams {
    fn default() -> Self {
        LongitudinalParams {
            gamma: 0.9,
            horizon: 1,
        }
    }
}

impl LongitudinalParams {
    pub fn new(gamma: f64, horizon: u32) -> Result<Self, DesignError> {
        let p = LongitudinalParams { gamma, horizon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(DesignError::InvalidParameter(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if self.horizon < 1 {
            return Err(DesignError::InvalidParameter(
                "horizon must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Expected number of interactions in which the human registers
/// inexplicability: `Σ_{t<T} γ^t`.
pub fn longitudinal_factor(p: &LongitudinalParams) -> f64 {
    if p.horizon == 1 {
        1.0
    } else if p.gamma == 1.0 {
        f64::from(p.horizon)
    } else {
        (1.0 - p.gamma.powi(p.horizon as i32)) / (1.0 - p.gamma)
    }
}

/// `weight · value`, where a zero weight switches the term off even when
/// the value is infinite.
fn term(weight: f64, value: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        weight * value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEvaluation {
    /// Sorted modification ids.
    pub design: Vec<String>,
    /// One entry per task in the support of the distribution.
    pub per_task: Vec<(usize, Result<MostExplicableResult, ExplicabilityError>)>,
    pub expected_ie: f64,
    /// `f_T · expected_ie`.
    pub longitudinal_ie: f64,
    pub expected_robot_cost: f64,
    pub design_cost: f64,
    pub objective: f64,
    pub failure: Option<String>,
}

impl ConfigEvaluation {
    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn design_size(&self) -> usize {
        self.design.len()
    }
}

type ResultKey = (u64, u64, usize);

type Witness = Result<Option<Plan>, ()>;

/// Evaluates configurations over a fixed task distribution, memoizing
/// per-task results by the canonical hash of the modified models.
pub struct Evaluator<'a> {
    tasks: &'a TaskSpec,
    pub weights: ObjectiveWeights,
    pub params: LongitudinalParams,
    pub limits: SearchLimits,
    results: Mutex<HashMap<ResultKey, Result<MostExplicableResult, ExplicabilityError>>>,
    witnesses: Mutex<HashMap<(u64, usize), Witness>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        tasks: &'a TaskSpec,
        weights: ObjectiveWeights,
        params: LongitudinalParams,
        limits: SearchLimits,
    ) -> Self {
        Evaluator {
            tasks,
            weights,
            params,
            limits,
            results: Mutex::new(HashMap::new()),
            witnesses: Mutex::new(HashMap::new()),
        }
    }

    pub fn tasks(&self) -> &TaskSpec {
        self.tasks
    }

    pub fn cached_results(&self) -> usize {
        self.results.lock().expect("cache lock").len()
    }

    fn task_result(
        &self,
        cfg: &Configuration,
        task: usize,
    ) -> Result<MostExplicableResult, ExplicabilityError> {
        let key = (
            cfg.pair.robot.canonical_hash(),
            cfg.pair.human.canonical_hash(),
            task,
        );
        if let Some(r) = self.results.lock().expect("cache lock").get(&key) {
            return r.clone();
        }
        let exp = ExplicableProblem::new(&cfg.pair, &self.tasks.tasks[task]);
        let r = most_explicable_plan(&exp, &self.limits);
        self.results
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert(r)
            .clone()
    }

    /// Deterministic optimal plan used as a relevance witness. `Err` when
    /// the planner hit its limits.
    pub(crate) fn witness(
        &self,
        problem: &PlanningProblem,
        task: usize,
    ) -> Result<Option<Plan>, ()> {
        let key = (problem.domain.canonical_hash(), task);
        if let Some(w) = self.witnesses.lock().expect("cache lock").get(&key) {
            return w.clone();
        }
        let r = solve_optimal(problem, &self.limits);
        let w = match r.status {
            SearchStatus::Solved => Ok(r.plan),
            SearchStatus::Unsolvable => Ok(None),
            SearchStatus::Timeout { .. } => Err(()),
        };
        self.witnesses
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert(w)
            .clone()
    }

    pub fn evaluate(&self, cfg: &Configuration, space: &[DesignModification]) -> ConfigEvaluation {
        let f_t = longitudinal_factor(&self.params);
        let design_cost = cfg.design_cost(space);
        let mut per_task = Vec::new();
        let mut expected_ie = 0.0;
        let mut expected_cost = 0.0;
        let mut failure = None;
        for (i, _, p) in self.tasks.support() {
            let r = self.task_result(cfg, i);
            match &r {
                Ok(res) => {
                    expected_ie += p * res.ie_min.value();
                    expected_cost += p * res.robot_cost.map_or(f64::INFINITY, cost_to_f64);
                }
                Err(e) => {
                    failure
                        .get_or_insert_with(|| format!("task {}: {e}", self.tasks.tasks[i].name));
                }
            }
            per_task.push((i, r));
        }
        let longitudinal_ie = if expected_ie.is_infinite() {
            f64::INFINITY
        } else {
            f_t * expected_ie
        };
        let objective = if failure.is_some() {
            f64::INFINITY
        } else {
            term(self.weights.alpha, longitudinal_ie)
                + term(self.weights.beta, design_cost)
                + term(
                    self.weights.kappa,
                    expected_cost * f64::from(self.params.horizon),
                )
        };
        ConfigEvaluation {
            design: cfg.ids(space),
            per_task,
            expected_ie,
            longitudinal_ie,
            expected_robot_cost: expected_cost,
            design_cost,
            objective,
            failure,
        }
    }
}

/// Evaluates one configuration without a shared cache.
pub fn evaluate_config(
    cfg: &Configuration,
    space: &[DesignModification],
    tasks: &TaskSpec,
    weights: ObjectiveWeights,
    params: LongitudinalParams,
    limits: &SearchLimits,
) -> ConfigEvaluation {
    Evaluator::new(tasks, weights, params, *limits).evaluate(cfg, space)
}
