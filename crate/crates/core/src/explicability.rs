//! Inexplicability scoring and the dual-model compilation.
//!
//! A robot plan is scored against the human's mental model by the cost gap
//! `exp(|c_H(π) − c*_H|)`, where `c*_H` is the optimal cost in the human
//! model, and is infinitely inexplicable when the human model cannot execute
//! it. The most explicable plan is found by compiling both models into one
//! problem over tagged copies of every fluent: an action is applicable there
//! exactly when it is applicable in both models, so its optimal plans are the
//! cheapest plans valid in both.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{
    cost_to_f64, unit_cost, Action, Cost, Domain, FluentId, FluentSet, ModelError, ModelPair, Plan,
    PlanningProblem, Task, Vocabulary,
};
use crate::planner::{solve_optimal, SearchLimits, SearchStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExplicabilityError {
    #[error("{model} action `{action}` has non-unit cost; explicable planning assumes unit costs")]
    NonUnitCost { model: &'static str, action: String },
    #[error("{}", not_a_robot_plan(*.failed_at))]
    NotARobotPlan { failed_at: Option<usize> },
    #[error("evaluation failed: planner limit reached on the {0} problem")]
    EvaluationFailed(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn not_a_robot_plan(failed_at: Option<usize>) -> String {
    match failed_at {
        Some(i) => format!("step {i} of the plan is not applicable in the robot model"),
        None => "plan does not reach the goal in the robot model".into(),
    }
}

/// `exp(log_value)`, kept in log space so large cost gaps never overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InexplicabilityScore {
    Finite { log_value: f64 },
    Infinite,
}

impl InexplicabilityScore {
    /// The minimum attainable score, `exp(0)`.
    pub const EXPLICABLE: InexplicabilityScore = InexplicabilityScore::Finite { log_value: 0.0 };

    pub fn log_value(&self) -> f64 {
        match self {
            Self::Finite { log_value } => *log_value,
            Self::Infinite => f64::INFINITY,
        }
    }

    /// Saturates to `f64::INFINITY` for exponents beyond ~709 even though the
    /// score is finite; compare with [`Self::total_cmp`] instead.
    pub fn value(&self) -> f64 {
        self.log_value().exp()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.log_value().total_cmp(&other.log_value())
    }
}

impl PartialOrd for InexplicabilityScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl fmt::Display for InexplicabilityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite { log_value } => write!(f, "exp({log_value}) = {}", self.value()),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

/// Cost-based distance of a plan of cost `c_pi` from the human-optimal cost.
pub fn cost_distance(c_pi: Cost, c_star: Cost, valid_in_human: bool) -> InexplicabilityScore {
    if !valid_in_human {
        return InexplicabilityScore::Infinite;
    }
    let gap = if c_pi >= c_star {
        c_pi - c_star
    } else {
        c_star - c_pi
    };
    InexplicabilityScore::Finite {
        log_value: cost_to_f64(gap),
    }
}

/// One task instantiated against both models.
#[derive(Debug, Clone)]
pub struct ExplicableProblem {
    pub robot: PlanningProblem,
    pub human: PlanningProblem,
}

impl ExplicableProblem {
    pub fn new(pair: &ModelPair, task: &Task) -> Self {
        ExplicableProblem {
            robot: pair.robot_problem(task),
            human: pair.human_problem(task),
        }
    }

    pub fn from_problems(
        robot: PlanningProblem,
        human: PlanningProblem,
    ) -> Result<Self, ModelError> {
        if robot.vocab() != human.vocab() {
            return Err(ModelError::VocabularyMismatch);
        }
        Ok(ExplicableProblem { robot, human })
    }
}

/// The compiled problem over `F_R ⊎ F_H`. Robot copies occupy indices
/// `0..n`, human copies `n..2n`.
#[derive(Debug, Clone)]
pub struct CompiledProblem {
    pub problem: PlanningProblem,
    base_len: usize,
}

impl CompiledProblem {
    pub fn robot_fluent(&self, f: FluentId) -> FluentId {
        f
    }

    pub fn human_fluent(&self, f: FluentId) -> FluentId {
        FluentId(f.0 + self.base_len as u32)
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }
}

fn tagged(set: &FluentSet, offset: u32) -> FluentSet {
    set.iter().map(|f| FluentId(f.0 + offset)).collect()
}

fn merged(robot: &FluentSet, human: &FluentSet, n: u32) -> FluentSet {
    let mut s = tagged(robot, 0);
    s.union_with(&tagged(human, n));
    s
}

fn check_unit(domain: &Domain, model: &'static str) -> Result<(), ExplicabilityError> {
    match domain.actions().iter().find(|a| a.cost != unit_cost()) {
        Some(a) => Err(ExplicabilityError::NonUnitCost {
            model,
            action: a.name.clone(),
        }),
        None => Ok(()),
    }
}

/// Builds the dual-model problem. Actions present only in the human model
/// are left out: the robot cannot execute them. Robot actions the human
/// does not believe in are left out too, since no plan using them is valid
/// in the human model.
pub fn compile(exp: &ExplicableProblem) -> Result<CompiledProblem, ExplicabilityError> {
    let (rd, hd) = (&exp.robot.domain, &exp.human.domain);
    if rd.vocab() != hd.vocab() {
        return Err(ModelError::VocabularyMismatch.into());
    }
    check_unit(rd, "robot")?;
    check_unit(hd, "human")?;

    let base = rd.vocab();
    let n = base.len() as u32;
    let names = base
        .names()
        .iter()
        .map(|f| format!("robot:{f}"))
        .chain(base.names().iter().map(|f| format!("human:{f}")));
    let vocab = Arc::new(Vocabulary::new(names)?);

    let actions = rd
        .actions()
        .iter()
        .filter_map(|ar| {
            let ah = hd.action(&ar.name)?;
            Some(
                Action::new(
                    ar.name.clone(),
                    merged(&ar.pre, &ah.pre, n),
                    merged(&ar.add, &ah.add, n),
                    merged(&ar.del, &ah.del, n),
                )
                .with_signature(ar.schema.clone(), ar.args.clone()),
            )
        })
        .collect();
    let domain = Arc::new(Domain::new(vocab, actions)?);
    let problem = PlanningProblem::new(
        domain,
        merged(&exp.robot.init, &exp.human.init, n),
        merged(&exp.robot.goal, &exp.human.goal, n),
    )?;
    Ok(CompiledProblem {
        problem,
        base_len: n as usize,
    })
}

/// `f_Exp` for one task: the cheapest plan among those with minimal
/// inexplicability.
#[derive(Debug, Clone, PartialEq)]
pub struct MostExplicableResult {
    pub plan: Option<Plan>,
    pub ie_min: InexplicabilityScore,
    /// Cost of `plan` in the robot model. When no plan is valid in both
    /// models this is the robot's own optimal cost, or `None` if the robot
    /// cannot solve the task at all.
    pub robot_cost: Option<Cost>,
    /// `c*_H`, or `None` when the human model has no solution.
    pub human_optimal_cost: Option<Cost>,
}

fn optimal_cost(
    p: &PlanningProblem,
    limits: &SearchLimits,
    which: &'static str,
) -> Result<Option<Cost>, ExplicabilityError> {
    let r = solve_optimal(p, limits);
    match r.status {
        SearchStatus::Solved => Ok(r.cost),
        SearchStatus::Unsolvable => Ok(None),
        SearchStatus::Timeout { .. } => Err(ExplicabilityError::EvaluationFailed(which)),
    }
}

pub fn most_explicable_plan(
    exp: &ExplicableProblem,
    limits: &SearchLimits,
) -> Result<MostExplicableResult, ExplicabilityError> {
    let compiled = compile(exp)?;
    let r = solve_optimal(&compiled.problem, limits);
    match r.status {
        SearchStatus::Timeout { .. } => Err(ExplicabilityError::EvaluationFailed("compiled")),
        SearchStatus::Solved => {
            let plan = r.plan.expect("solved search carries a plan");
            let c_star = optimal_cost(&exp.human, limits, "human")?
                .expect("a plan valid in the compiled problem solves the human model");
            let c_h = exp.human.plan_cost(&plan)?;
            Ok(MostExplicableResult {
                ie_min: cost_distance(c_h, c_star, true),
                robot_cost: Some(exp.robot.plan_cost(&plan)?),
                human_optimal_cost: Some(c_star),
                plan: Some(plan),
            })
        }
        SearchStatus::Unsolvable => Ok(MostExplicableResult {
            plan: None,
            ie_min: InexplicabilityScore::Infinite,
            robot_cost: optimal_cost(&exp.robot, limits, "robot")?,
            human_optimal_cost: optimal_cost(&exp.human, limits, "human")?,
        }),
    }
}

/// Scores a robot plan. All human-optimal plans share cost `c*_H`, so the
/// minimum over expected plans is the distance to that cost.
pub fn score_plan(
    exp: &ExplicableProblem,
    plan: &Plan,
    limits: &SearchLimits,
) -> Result<InexplicabilityScore, ExplicabilityError> {
    let ex = exp.robot.execute(plan);
    if !ex.valid {
        return Err(ExplicabilityError::NotARobotPlan {
            failed_at: ex.failed_at,
        });
    }
    check_unit(&exp.human.domain, "human")?;
    if !exp.human.is_valid_plan(plan) {
        return Ok(InexplicabilityScore::Infinite);
    }
    let c_star = optimal_cost(&exp.human, limits, "human")?
        .expect("human model solves the task since the plan is valid there");
    Ok(cost_distance(exp.human.plan_cost(plan)?, c_star, true))
}
