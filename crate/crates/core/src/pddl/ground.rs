//! Grounding of a robot domain, a human domain and a shared problem into one
//! fluent vocabulary.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::syntax::{parse_domain, parse_problem, AtomDef, DomainDef, ProblemDef, SchemaDef};
use super::{sexpr, ParseError};
use crate::model::{
    unit_cost, Action, Domain, FluentId, FluentSet, ModelError, ModelPair, Task, TaskSpec,
    Vocabulary,
};

/// Grounded model pair with its task distribution.
#[derive(Debug, Clone)]
pub struct ParsedModels {
    pub pair: ModelPair,
    pub tasks: TaskSpec,
    /// Human actions with no robot counterpart.
    pub human_only: BTreeSet<String>,
}

/// `name_arg1_arg2...`, or `name` when there are no arguments.
pub fn ground_name(name: &str, args: &[&str]) -> String {
    let mut s = name.to_string();
    for a in args {
        s.push('_');
        s.push_str(a);
    }
    s
}

struct Universe {
    parent: BTreeMap<String, String>,
    objects: BTreeMap<String, String>,
    predicates: BTreeMap<String, Vec<String>>,
}

impl Universe {
    fn build(domains: [&DomainDef; 2], problem: &ProblemDef) -> Result<Self, ParseError> {
        let mut u = Universe {
            parent: BTreeMap::new(),
            objects: BTreeMap::new(),
            predicates: BTreeMap::new(),
        };
        for d in domains {
            for (t, p) in &d.types {
                if t == "object" {
                    continue;
                }
                match u.parent.insert(t.clone(), p.clone()) {
                    Some(old) if &old != p => {
                        return Err(ParseError::Conflict(format!(
                            "type `{t}` has parents `{old}` and `{p}`"
                        )))
                    }
                    _ => {}
                }
            }
        }
        for (t, p) in &u.parent {
            u.check_type(p)?;
            let mut cur = p.as_str();
            for _ in 0..=u.parent.len() {
                if cur == "object" {
                    break;
                }
                cur = &u.parent[cur];
            }
            if cur != "object" {
                return Err(ParseError::Conflict(format!(
                    "type `{t}` has a cyclic hierarchy"
                )));
            }
        }
        let declared = domains
            .iter()
            .flat_map(|d| d.constants.iter())
            .chain(problem.objects.iter());
        for (o, t) in declared {
            u.check_type(t)?;
            match u.objects.insert(o.clone(), t.clone()) {
                Some(old) if &old != t => {
                    return Err(ParseError::Conflict(format!(
                        "object `{o}` declared with types `{old}` and `{t}`"
                    )))
                }
                _ => {}
            }
        }
        for d in domains {
            for p in &d.predicates {
                let types: Vec<String> = p.params.iter().map(|(_, t)| t.clone()).collect();
                for t in &types {
                    u.check_type(t)?;
                }
                match u.predicates.insert(p.name.clone(), types.clone()) {
                    Some(old) if old != types => {
                        return Err(ParseError::Conflict(format!(
                            "predicate `{}` declared with signatures {old:?} and {types:?}",
                            p.name
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(u)
    }

    fn check_type(&self, t: &str) -> Result<(), ParseError> {
        if t == "object" || self.parent.contains_key(t) {
            Ok(())
        } else {
            Err(ParseError::UnknownType(t.to_string()))
        }
    }

    fn is_subtype<'s>(&'s self, mut t: &'s str, of: &str) -> bool {
        loop {
            if t == of {
                return true;
            }
            match self.parent.get(t) {
                Some(p) => t = p,
                None => return false,
            }
        }
    }

    fn objects_of(&self, ty: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, t)| self.is_subtype(t, ty))
            .map(|(o, _)| o.as_str())
            .collect()
    }

    fn fluent_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for (pred, types) in &self.predicates {
            let domains: Vec<Vec<&str>> = types.iter().map(|t| self.objects_of(t)).collect();
            for combo in product(&domains) {
                names.push(ground_name(pred, &combo));
            }
        }
        names
    }
}

fn product<'a>(domains: &[Vec<&'a str>]) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&str>> = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                d.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

enum Resolved {
    Fluent(FluentId),
    /// Well-formed but the arguments do not fit the predicate's types.
    Impossible,
}

struct Grounder<'a> {
    u: &'a Universe,
    vocab: &'a Vocabulary,
}

impl Grounder<'_> {
    fn resolve(
        &self,
        atom: &AtomDef,
        binding: &HashMap<&str, &str>,
    ) -> Result<Resolved, ParseError> {
        let types = self
            .u
            .predicates
            .get(&atom.predicate)
            .ok_or_else(|| ParseError::UnknownPredicate(atom.predicate.clone()))?;
        if types.len() != atom.args.len() {
            return Err(ParseError::Arity {
                predicate: atom.predicate.clone(),
                expected: types.len(),
                found: atom.args.len(),
            });
        }
        let mut args = Vec::with_capacity(atom.args.len());
        for a in &atom.args {
            if a.starts_with('?') {
                let v = binding
                    .get(a.as_str())
                    .ok_or_else(|| ParseError::UnknownVariable(a.clone()))?;
                args.push(*v);
            } else if self.u.objects.contains_key(a) {
                args.push(a.as_str());
            } else {
                return Err(ParseError::UnknownObject(a.clone()));
            }
        }
        Ok(match self.vocab.id(&ground_name(&atom.predicate, &args)) {
            Some(f) => Resolved::Fluent(f),
            None => Resolved::Impossible,
        })
    }

    fn ground_set(&self, atoms: &[AtomDef]) -> Result<FluentSet, ParseError> {
        let mut set = FluentSet::new();
        for a in atoms {
            match self.resolve(a, &HashMap::new())? {
                Resolved::Fluent(f) => set.insert(f),
                Resolved::Impossible => {
                    return Err(ParseError::TypeMismatch(format!(
                        "`({} {})`",
                        a.predicate,
                        a.args.join(" ")
                    )))
                }
            }
        }
        Ok(set)
    }

    fn ground_domain(&self, d: &DomainDef) -> Result<Vec<Action>, ParseError> {
        let mut out = Vec::new();
        for schema in &d.actions {
            self.ground_schema(schema, &mut out)?;
        }
        Ok(out)
    }

    fn ground_schema(&self, schema: &SchemaDef, out: &mut Vec<Action>) -> Result<(), ParseError> {
        let mut params = BTreeSet::new();
        for (p, t) in &schema.params {
            self.u.check_type(t)?;
            if !params.insert(p.as_str()) {
                return Err(ParseError::Conflict(format!(
                    "action `{}` declares parameter `{p}` twice",
                    schema.name
                )));
            }
        }
        let domains: Vec<Vec<&str>> = schema
            .params
            .iter()
            .map(|(_, t)| self.u.objects_of(t))
            .collect();
        let cost = schema.cost.unwrap_or_else(unit_cost);
        'binding: for combo in product(&domains) {
            let binding: HashMap<&str, &str> = schema
                .params
                .iter()
                .map(|(p, _)| p.as_str())
                .zip(combo.iter().copied())
                .collect();
            let mut pre = FluentSet::new();
            for a in &schema.pre {
                match self.resolve(a, &binding)? {
                    Resolved::Fluent(f) => pre.insert(f),
                    Resolved::Impossible => continue 'binding,
                }
            }
            let effect = |atoms: &[AtomDef]| -> Result<FluentSet, ParseError> {
                let mut set = FluentSet::new();
                for a in atoms {
                    match self.resolve(a, &binding)? {
                        Resolved::Fluent(f) => set.insert(f),
                        Resolved::Impossible => {
                            return Err(ParseError::TypeMismatch(format!(
                                "effect `({} {})` of action `{}`",
                                a.predicate,
                                a.args.join(" "),
                                schema.name
                            )))
                        }
                    }
                }
                Ok(set)
            };
            let add = effect(&schema.add)?;
            let mut del = effect(&schema.del)?;
            // An atom both added and deleted ends up true.
            del.difference_with(&add);
            out.push(
                Action::new(ground_name(&schema.name, &combo), pre, add, del)
                    .with_cost(cost)
                    .with_signature(
                        schema.name.clone(),
                        combo.iter().map(|s| s.to_string()).collect(),
                    ),
            );
        }
        Ok(())
    }
}

/// Names of the actions left after repeatedly removing those that need a
/// fluent in no initial state and added by no remaining action.
fn reachable_names(actions: &[Action], init: &FluentSet) -> BTreeSet<String> {
    let mut live: Vec<&Action> = actions.iter().collect();
    loop {
        let mut producible = init.clone();
        for a in &live {
            producible.union_with(&a.add);
        }
        let before = live.len();
        live.retain(|a| a.pre.is_subset(&producible));
        if live.len() == before {
            return live.into_iter().map(|a| a.name.clone()).collect();
        }
    }
}

/// Drops unreachable actions. An action known to both models is kept in
/// both as long as either copy is reachable.
fn prune_pair(
    robot: Vec<Action>,
    human: Vec<Action>,
    init: &FluentSet,
) -> (Vec<Action>, Vec<Action>) {
    let mut keep = reachable_names(&robot, init);
    keep.extend(reachable_names(&human, init));
    let robot: Vec<Action> = robot
        .into_iter()
        .filter(|a| keep.contains(&a.name))
        .collect();
    let human: Vec<Action> = human
        .into_iter()
        .filter(|a| keep.contains(&a.name))
        .collect();
    (robot, human)
}

fn check_one_to_one(robot: &DomainDef, human: &DomainDef) -> Result<(), ParseError> {
    for a in &robot.actions {
        match human.actions.iter().find(|h| h.name == a.name) {
            Some(h) if h.params.len() == a.params.len() => {}
            Some(_) => {
                return Err(ParseError::ActionMismatch(format!(
                    "`{}` has different arities in the robot and human domains",
                    a.name
                )))
            }
            None => {
                return Err(ParseError::ActionMismatch(format!(
                    "robot action `{}` is missing from the human domain",
                    a.name
                )))
            }
        }
    }
    Ok(())
}

fn domain_error(e: ModelError) -> ParseError {
    match e {
        ModelError::DuplicateAction(n) | ModelError::DuplicateFluent(n) => {
            ParseError::Conflict(format!("ground name `{n}` is produced twice"))
        }
        other => ParseError::Model(other),
    }
}

pub fn ground(
    robot: &DomainDef,
    human: &DomainDef,
    problem: &ProblemDef,
) -> Result<ParsedModels, ParseError> {
    check_one_to_one(robot, human)?;
    let u = Universe::build([robot, human], problem)?;
    let vocab = Arc::new(Vocabulary::new(u.fluent_names()).map_err(domain_error)?);
    let g = Grounder {
        u: &u,
        vocab: &vocab,
    };

    let top_init = g.ground_set(&problem.init)?;
    let top_goal = problem
        .goal
        .as_deref()
        .map(|a| g.ground_set(a))
        .transpose()?;
    let mut tasks = Vec::new();
    let mut probabilities = Vec::new();
    if problem.tasks.is_empty() {
        let goal = top_goal.ok_or_else(|| ParseError::MissingGoal(problem.name.clone()))?;
        tasks.push(Task {
            name: problem.name.clone(),
            init: top_init.clone(),
            goal,
        });
        probabilities.push(1.0);
    } else {
        let mut names = BTreeSet::new();
        for t in &problem.tasks {
            if !names.insert(t.name.as_str()) {
                return Err(ParseError::Conflict(format!(
                    "task `{}` declared twice",
                    t.name
                )));
            }
            let mut init = top_init.clone();
            init.union_with(&g.ground_set(&t.init)?);
            let goal = match &t.goal {
                Some(goal) => g.ground_set(goal)?,
                None => top_goal
                    .clone()
                    .ok_or_else(|| ParseError::MissingGoal(t.name.clone()))?,
            };
            tasks.push(Task {
                name: t.name.clone(),
                init,
                goal,
            });
            probabilities.push(t.probability);
        }
    }
    let mut any_init = FluentSet::new();
    for t in &tasks {
        any_init.union_with(&t.init);
    }

    let (robot_actions, human_actions) =
        prune_pair(g.ground_domain(robot)?, g.ground_domain(human)?, &any_init);
    let pair = ModelPair::new(
        Arc::new(Domain::new(Arc::clone(&vocab), robot_actions).map_err(domain_error)?),
        Arc::new(Domain::new(Arc::clone(&vocab), human_actions).map_err(domain_error)?),
    )?;
    let tasks = TaskSpec::new(tasks, probabilities)?;
    Ok(ParsedModels {
        human_only: pair.human_only(),
        pair,
        tasks,
    })
}

pub fn parse_model_pair(
    robot_domain: &str,
    human_domain: &str,
    problem: &str,
) -> Result<ParsedModels, ParseError> {
    let robot = parse_domain(&sexpr::parse(robot_domain)?)?;
    let human = parse_domain(&sexpr::parse(human_domain)?)?;
    let problem = parse_problem(&sexpr::parse(problem)?)?;
    ground(&robot, &human, &problem)
}
