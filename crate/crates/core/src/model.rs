//! Grounded STRIPS representation.
//!
//! Every fluent lives in a [`Vocabulary`] that assigns it a dense index, so
//! states are plain bitsets with canonical equality and hashing. Actions are
//! stored sorted by name inside a [`Domain`]; a [`PlanningProblem`] pairs a
//! shared domain with an initial state and a goal.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::Ratio;
use thiserror::Error;

/// Action and plan costs. Non-negative rationals, unit by default.
pub type Cost = Ratio<u64>;

pub fn unit_cost() -> Cost {
    Cost::from_integer(1)
}

/// Converts a cost to a float for objective arithmetic.
pub fn cost_to_f64(c: Cost) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("duplicate fluent `{0}`")]
    DuplicateFluent(String),
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("action `{action}` refers to fluent index {index} outside a universe of {size}")]
    FluentOutOfRange {
        action: String,
        index: u32,
        size: usize,
    },
    #[error("action `{action}` both adds and deletes `{fluent}`")]
    AddDeleteOverlap { action: String, fluent: String },
    #[error("{what} mentions fluent index {index} outside a universe of {size}")]
    StateOutOfRange {
        what: &'static str,
        index: u32,
        size: usize,
    },
    #[error("domains of a model pair must share one fluent vocabulary")]
    VocabularyMismatch,
    #[error("task probabilities must sum to 1 (got {0})")]
    BadDistribution(f64),
    #[error("{tasks} tasks but {probabilities} probabilities")]
    DistributionLength { tasks: usize, probabilities: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentId(pub u32);

impl FluentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The fluent universe `F` of a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    names: Vec<String>,
    index: HashMap<String, FluentId>,
}

impl Vocabulary {
    pub fn new<I, S>(names: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), FluentId(i as u32)).is_some() {
                return Err(ModelError::DuplicateFluent(n.clone()));
            }
        }
        Ok(Vocabulary { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: FluentId) -> &str {
        &self.names[id.index()]
    }

    pub fn id(&self, name: &str) -> Option<FluentId> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Resolves a list of names into a set, failing on the first unknown name.
    pub fn set_of<'a, I>(&self, names: I) -> Result<FluentSet, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut set = FluentSet::new();
        for n in names {
            let id = self
                .id(n)
                .ok_or_else(|| ModelError::UnknownFluent(n.to_string()))?;
            set.insert(id);
        }
        Ok(set)
    }

    pub fn names_of<'a>(&'a self, set: &'a FluentSet) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(move |id| self.name(id))
    }
}

/// A set of fluents, stored as a bitset.
///
/// Trailing zero words are trimmed after every mutation so that equal sets
/// always compare and hash equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentSet {
    words: Vec<u64>,
}

/// A state is the set of fluents that are true; all others are false.
pub type State = FluentSet;

impl FluentSet {
    pub fn new() -> Self {
        FluentSet { words: Vec::new() }
    }

    pub fn from_ids<I: IntoIterator<Item = FluentId>>(ids: I) -> Self {
        let mut s = FluentSet::new();
        for id in ids {
            s.insert(id);
        }
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, id: FluentId) {
        let (w, b) = (id.index() / 64, id.index() % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, id: FluentId) {
        let (w, b) = (id.index() / 64, id.index() % 64);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !(1 << b);
            self.trim();
        }
    }

    pub fn contains(&self, id: FluentId) -> bool {
        let (w, b) = (id.index() / 64, id.index() % 64);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &FluentSet) -> bool {
        self.words.iter().enumerate().all(|(i, w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn is_disjoint(&self, other: &FluentSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &FluentSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &FluentSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        self.trim();
    }

    pub fn intersection(&self, other: &FluentSet) -> FluentSet {
        let mut s = FluentSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    /// Largest index + 1, or 0 for the empty set.
    pub fn upper_bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(FluentId(wi as u32 * 64 + b))
            })
        })
    }
}

impl FromIterator<FluentId> for FluentSet {
    fn from_iter<I: IntoIterator<Item = FluentId>>(iter: I) -> Self {
        FluentSet::from_ids(iter)
    }
}

/// A grounded action `<pre, add, del>` with a cost. Equality ignores the
/// schema and arguments, which only record where the action came from.
#[derive(Debug, Clone)]
pub struct Action {
    pub name: String,
    /// Name of the schema this action was grounded from (equals `name` for
    /// hand-built actions).
    pub schema: String,
    /// Objects bound to the schema parameters, in order.
    pub args: Vec<String>,
    pub pre: FluentSet,
    pub add: FluentSet,
    pub del: FluentSet,
    pub cost: Cost,
}

impl PartialEq for Action {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.pre == other.pre
            && self.add == other.add
            && self.del == other.del
            && self.cost == other.cost
    }
}

impl Eq for Action {}

impl Action {
    /// Bound objects, or the `_`-separated name tail for actions read from
    /// grounded files that carry no arguments.
    pub fn arguments(&self) -> Vec<&str> {
        if self.args.is_empty() {
            self.name.split('_').skip(1).collect()
        } else {
            self.args.iter().map(String::as_str).collect()
        }
    }

    pub fn new(name: impl Into<String>, pre: FluentSet, add: FluentSet, del: FluentSet) -> Self {
        let name = name.into();
        Action {
            schema: name.clone(),
            name,
            args: Vec::new(),
            pre,
            add,
            del,
            cost: unit_cost(),
        }
    }

    pub fn with_cost(mut self, cost: Cost) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_signature(mut self, schema: impl Into<String>, args: Vec<String>) -> Self {
        self.schema = schema.into();
        self.args = args;
        self
    }

    pub fn is_applicable(&self, s: &State) -> bool {
        self.pre.is_subset(s)
    }

    /// `(s ∪ add) \ del`, or `None` when the preconditions do not hold.
    pub fn apply(&self, s: &State) -> Option<State> {
        if !self.is_applicable(s) {
            return None;
        }
        let mut next = s.clone();
        next.union_with(&self.add);
        next.difference_with(&self.del);
        Some(next)
    }
}

/// The grounded action set `A` of a planning model over a shared vocabulary.
#[derive(Debug, Clone)]
pub struct Domain {
    vocab: Arc<Vocabulary>,
    actions: Vec<Action>,
    by_name: HashMap<String, usize>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab && self.actions == other.actions
    }
}

impl Domain {
    /// Validates every action against the vocabulary and sorts actions by
    /// name, which fixes successor order for search.
    pub fn new(vocab: Arc<Vocabulary>, mut actions: Vec<Action>) -> Result<Self, ModelError> {
        let size = vocab.len();
        for a in &actions {
            for set in [&a.pre, &a.add, &a.del] {
                if set.upper_bound() > size {
                    let index = set.iter().last().map(|f| f.0).unwrap_or_default();
                    return Err(ModelError::FluentOutOfRange {
                        action: a.name.clone(),
                        index,
                        size,
                    });
                }
            }
            if let Some(f) = a.add.intersection(&a.del).iter().next() {
                return Err(ModelError::AddDeleteOverlap {
                    action: a.name.clone(),
                    fluent: vocab.name(f).to_string(),
                });
            }
        }
        actions.sort_by(|a, b| a.name.cmp(&b.name));
        let mut by_name = HashMap::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            if by_name.insert(a.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateAction(a.name.clone()));
            }
        }
        Ok(Domain {
            vocab,
            actions,
            by_name,
        })
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.by_name.get(name).map(|&i| &self.actions[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    pub fn action_names(&self) -> impl Iterator<Item = &str> {
        self.actions.iter().map(|a| a.name.as_str())
    }

    pub fn is_unit_cost(&self) -> bool {
        self.actions.iter().all(|a| a.cost == unit_cost())
    }

    /// Content hash over fluent names and sorted actions. Two domains built
    /// from the same declarations in any order hash identically.
    pub fn canonical_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.vocab.names.hash(&mut h);
        for a in &self.actions {
            a.name.hash(&mut h);
            a.pre.hash(&mut h);
            a.add.hash(&mut h);
            a.del.hash(&mut h);
            a.cost.hash(&mut h);
        }
        h.finish()
    }
}

/// A sequence of action names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plan {
    pub steps: Vec<String>,
}

impl Plan {
    pub fn new<I, S>(steps: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Plan {
            steps: steps.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn concat(&self, other: &Plan) -> Plan {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Plan { steps }
    }

    pub fn action_set(&self) -> BTreeSet<&str> {
        self.steps.iter().map(String::as_str).collect()
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Outcome of executing a plan from the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub state: State,
    pub valid: bool,
    /// Index of the first step that was unknown or inapplicable.
    pub failed_at: Option<usize>,
}

/// `<F, A, I, G, c>` with `F`, `A` and `c` shared through the domain.
#[derive(Debug, Clone)]
pub struct PlanningProblem {
    pub domain: Arc<Domain>,
    pub init: State,
    pub goal: FluentSet,
}

impl PlanningProblem {
    pub fn new(domain: Arc<Domain>, init: State, goal: FluentSet) -> Result<Self, ModelError> {
        let size = domain.vocab().len();
        for (what, set) in [("initial state", &init), ("goal", &goal)] {
            if set.upper_bound() > size {
                return Err(ModelError::StateOutOfRange {
                    what,
                    index: set.iter().last().map(|f| f.0).unwrap_or_default(),
                    size,
                });
            }
        }
        Ok(PlanningProblem { domain, init, goal })
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        self.domain.vocab()
    }

    pub fn is_goal(&self, s: &State) -> bool {
        self.goal.is_subset(s)
    }

    /// Applies the plan step by step from `I`. Unknown action names count as
    /// inapplicable steps; execution stops at the first failure.
    pub fn execute(&self, plan: &Plan) -> Execution {
        let mut state = self.init.clone();
        for (i, step) in plan.steps.iter().enumerate() {
            let next = self.domain.action(step).and_then(|a| a.apply(&state));
            match next {
                Some(s) => state = s,
                None => {
                    return Execution {
                        state,
                        valid: false,
                        failed_at: Some(i),
                    }
                }
            }
        }
        let valid = self.is_goal(&state);
        Execution {
            state,
            valid,
            failed_at: None,
        }
    }

    pub fn is_valid_plan(&self, plan: &Plan) -> bool {
        self.execute(plan).valid
    }

    pub fn plan_cost(&self, plan: &Plan) -> Result<Cost, ModelError> {
        plan.steps.iter().try_fold(Cost::from_integer(0), |acc, s| {
            self.domain
                .action(s)
                .map(|a| acc + a.cost)
                .ok_or_else(|| ModelError::UnknownAction(s.clone()))
        })
    }
}

/// A grounded task: one `(I, G)` instance of a model pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub name: String,
    pub init: State,
    pub goal: FluentSet,
}

/// `k` tasks with a categorical distribution over them.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub tasks: Vec<Task>,
    pub probabilities: Vec<f64>,
}

impl TaskSpec {
    pub fn new(tasks: Vec<Task>, probabilities: Vec<f64>) -> Result<Self, ModelError> {
        if tasks.len() != probabilities.len() {
            return Err(ModelError::DistributionLength {
                tasks: tasks.len(),
                probabilities: probabilities.len(),
            });
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || probabilities.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(ModelError::BadDistribution(sum));
        }
        Ok(TaskSpec {
            tasks,
            probabilities,
        })
    }

    pub fn uniform(tasks: Vec<Task>) -> Result<Self, ModelError> {
        let k = tasks.len();
        Self::new(tasks, vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Tasks with non-zero probability, with their index.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Task, f64)> {
        self.tasks
            .iter()
            .zip(&self.probabilities)
            .enumerate()
            .filter(|(_, (_, p))| **p > 0.0)
            .map(|(i, (t, p))| (i, t, *p))
    }

    /// Restricts the distribution to the named subset, renormalised.
    pub fn restrict(&self, keep: &[usize]) -> Result<TaskSpec, ModelError> {
        let tasks: Vec<Task> = keep.iter().map(|&i| self.tasks[i].clone()).collect();
        let mass: f64 = keep.iter().map(|&i| self.probabilities[i]).sum();
        let probabilities = keep.iter().map(|&i| self.probabilities[i] / mass).collect();
        TaskSpec::new(tasks, probabilities)
    }
}

/// Robot model and human mental model over one fluent vocabulary.
///
/// Parsed pairs also satisfy a one-to-one mapping from robot action schemas to
/// human ones; that check lives in the parser because design modifications
/// deliberately break it on grounded actions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPair {
    pub robot: Arc<Domain>,
    pub human: Arc<Domain>,
}

impl ModelPair {
    pub fn new(robot: Arc<Domain>, human: Arc<Domain>) -> Result<Self, ModelError> {
        if robot.vocab() != human.vocab() {
            return Err(ModelError::VocabularyMismatch);
        }
        Ok(ModelPair { robot, human })
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        self.robot.vocab()
    }

    /// Human actions with no robot counterpart of the same name.
    pub fn human_only(&self) -> BTreeSet<String> {
        self.human
            .action_names()
            .filter(|n| !self.robot.contains(n))
            .map(str::to_string)
            .collect()
    }

    pub fn canonical_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.robot.canonical_hash().hash(&mut h);
        self.human.canonical_hash().hash(&mut h);
        h.finish()
    }

    pub fn robot_problem(&self, task: &Task) -> PlanningProblem {
        PlanningProblem {
            domain: Arc::clone(&self.robot),
            init: task.init.clone(),
            goal: task.goal.clone(),
        }
    }

    pub fn human_problem(&self, task: &Task) -> PlanningProblem {
        PlanningProblem {
            domain: Arc::clone(&self.human),
            init: task.init.clone(),
            goal: task.goal.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab(names: &[&str]) -> Arc<Vocabulary> {
        Arc::new(Vocabulary::new(names.iter().copied()).unwrap())
    }

    fn set(v: &Vocabulary, names: &[&str]) -> FluentSet {
        v.set_of(names.iter().copied()).unwrap()
    }

    #[test]
    fn apply_moves_p_to_q() {
        let v = vocab(&["p", "q"]);
        let a = Action::new("a", set(&v, &["p"]), set(&v, &["q"]), set(&v, &["p"]));
        assert_eq!(a.apply(&set(&v, &["p"])), Some(set(&v, &["q"])));
    }

    #[test]
    fn apply_inapplicable_without_precondition() {
        let v = vocab(&["p", "q"]);
        let a = Action::new("a", set(&v, &["p"]), set(&v, &["q"]), FluentSet::new());
        assert_eq!(a.apply(&FluentSet::new()), None);
    }

    #[test]
    fn identity_action() {
        let v = vocab(&["p"]);
        let a = Action::new("noop", FluentSet::new(), FluentSet::new(), FluentSet::new());
        assert_eq!(a.apply(&set(&v, &["p"])), Some(set(&v, &["p"])));
    }

    #[test]
    fn domain_rejects_overlap_and_duplicates() {
        let v = vocab(&["p"]);
        let bad = Action::new("a", FluentSet::new(), set(&v, &["p"]), set(&v, &["p"]));
        assert!(matches!(
            Domain::new(Arc::clone(&v), vec![bad]),
            Err(ModelError::AddDeleteOverlap { .. })
        ));
        let a = Action::new("a", FluentSet::new(), FluentSet::new(), FluentSet::new());
        assert!(matches!(
            Domain::new(Arc::clone(&v), vec![a.clone(), a]),
            Err(ModelError::DuplicateAction(_))
        ));
        let out = Action::new(
            "b",
            FluentSet::from_ids([FluentId(5)]),
            FluentSet::new(),
            FluentSet::new(),
        );
        assert!(matches!(
            Domain::new(v, vec![out]),
            Err(ModelError::FluentOutOfRange { .. })
        ));
    }

    fn chain_problem() -> PlanningProblem {
        let v = vocab(&["p", "q", "r"]);
        let a = Action::new("a", set(&v, &["p"]), set(&v, &["q"]), set(&v, &["p"]));
        let b = Action::new("b", set(&v, &["p"]), set(&v, &["r"]), FluentSet::new());
        let d = Arc::new(Domain::new(Arc::clone(&v), vec![a, b]).unwrap());
        PlanningProblem::new(d, set(&v, &["p"]), set(&v, &["r"])).unwrap()
    }

    #[test]
    fn empty_plan_valid_when_goal_holds() {
        let mut p = chain_problem();
        p.goal = p.init.clone();
        assert!(p.execute(&Plan::default()).valid);
    }

    #[test]
    fn second_step_precondition_deleted_by_first() {
        let p = chain_problem();
        let ex = p.execute(&Plan::new(["a", "b"]));
        assert!(!ex.valid);
        assert_eq!(ex.failed_at, Some(1));
        assert!(p.execute(&Plan::new(["b"])).valid);
    }

    #[test]
    fn unknown_step_is_invalid_but_cost_errors() {
        let p = chain_problem();
        assert!(!p.execute(&Plan::new(["zzz"])).valid);
        assert_eq!(
            p.plan_cost(&Plan::new(["zzz"])),
            Err(ModelError::UnknownAction("zzz".into()))
        );
    }

    #[test]
    fn plan_cost_sums() {
        let v = vocab(&["p"]);
        let a = Action::new("a", FluentSet::new(), FluentSet::new(), FluentSet::new())
            .with_cost(Cost::from_integer(2));
        let b = Action::new("b", FluentSet::new(), FluentSet::new(), FluentSet::new())
            .with_cost(Cost::from_integer(3));
        let u = Action::new("u", FluentSet::new(), FluentSet::new(), FluentSet::new());
        let d = Arc::new(Domain::new(Arc::clone(&v), vec![a, b, u]).unwrap());
        let p = PlanningProblem::new(d, FluentSet::new(), FluentSet::new()).unwrap();
        assert_eq!(
            p.plan_cost(&Plan::new(["a", "b"])),
            Ok(Cost::from_integer(5))
        );
        assert_eq!(p.plan_cost(&Plan::default()), Ok(Cost::from_integer(0)));
        assert_eq!(p.plan_cost(&Plan::new(["u"; 5])), Ok(Cost::from_integer(5)));
    }

    #[test]
    fn task_spec_validates_distribution() {
        let t = Task {
            name: "t".into(),
            init: FluentSet::new(),
            goal: FluentSet::new(),
        };
        assert!(TaskSpec::new(vec![t.clone(), t.clone()], vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            TaskSpec::new(vec![t.clone(), t.clone()], vec![0.5, 0.6]),
            Err(ModelError::BadDistribution(_))
        ));
        assert!(matches!(
            TaskSpec::new(vec![t], vec![0.5, 0.5]),
            Err(ModelError::DistributionLength { .. })
        ));
    }

    fn arb_set(n: u32) -> impl Strategy<Value = FluentSet> {
        proptest::collection::vec(0..n, 0..8).prop_map(|v| v.into_iter().map(FluentId).collect())
    }

    proptest! {
        #[test]
        fn fluent_set_is_canonical(ids in proptest::collection::vec(0u32..200, 0..20)) {
            let a: FluentSet = ids.iter().copied().map(FluentId).collect();
            let mut b: FluentSet = ids.iter().rev().copied().map(FluentId).collect();
            b.insert(FluentId(199));
            b.remove(FluentId(199));
            if ids.contains(&199) { b.insert(FluentId(199)); }
            prop_assert_eq!(&a, &b);
            let back: Vec<u32> = a.iter().map(|f| f.0).collect();
            let mut expect = ids.clone();
            expect.sort();
            expect.dedup();
            prop_assert_eq!(back, expect);
        }

        #[test]
        fn apply_closed_and_deterministic(
            s in arb_set(12), pre in arb_set(12), add in arb_set(12), del in arb_set(12)
        ) {
            let mut del = del;
            del.difference_with(&add);
            let a = Action::new("a", pre.clone(), add, del);
            let r1 = a.apply(&s);
            let r2 = a.apply(&s);
            prop_assert_eq!(&r1, &r2);
            prop_assert_eq!(r1.is_some(), pre.is_subset(&s));
            if let Some(next) = r1 {
                prop_assert!(next.upper_bound() <= 12);
            }
        }

        #[test]
        fn plan_cost_additive(xs in proptest::collection::vec(0usize..3, 0..6),
                              ys in proptest::collection::vec(0usize..3, 0..6)) {
            let v = vocab(&["p"]);
            let acts: Vec<Action> = (0..3)
                .map(|i| Action::new(format!("a{i}"), FluentSet::new(), FluentSet::new(), FluentSet::new())
                    .with_cost(Cost::new(i as u64 + 1, 2)))
                .collect();
            let d = Arc::new(Domain::new(v, acts).unwrap());
            let p = PlanningProblem::new(d, FluentSet::new(), FluentSet::new()).unwrap();
            let px = Plan::new(xs.iter().map(|i| format!("a{i}")));
            let py = Plan::new(ys.iter().map(|i| format!("a{i}")));
            prop_assert_eq!(
                p.plan_cost(&px.concat(&py)).unwrap(),
                p.plan_cost(&px).unwrap() + p.plan_cost(&py).unwrap()
            );
        }

        #[test]
        fn valid_execution_has_applicable_prefixes(steps in proptest::collection::vec(0usize..2, 0..5)) {
            let p = chain_problem();
            let plan = Plan::new(steps.iter().map(|&i| ["a", "b"][i]));
            if p.execute(&plan).valid {
                for k in 0..=plan.len() {
                    let prefix = Plan::new(plan.steps[..k].iter().cloned());
                    prop_assert!(p.execute(&prefix).failed_at.is_none());
                }
            }
        }
    }
}
