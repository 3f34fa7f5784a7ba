//! Lifted domain and problem definitions read from s-expressions.

use super::sexpr::{syntax_error, Pos, Sexp};
use super::ParseError;
use crate::model::Cost;

/// `(pred arg ...)` where arguments are variables (`?x`) or objects.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomDef {
    pub predicate: String,
    pub args: Vec<String>,
    pub pos: Pos,
}

pub type TypedList = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateDef {
    pub name: String,
    pub params: TypedList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaDef {
    pub name: String,
    pub params: TypedList,
    pub pre: Vec<AtomDef>,
    pub add: Vec<AtomDef>,
    pub del: Vec<AtomDef>,
    pub cost: Option<Cost>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainDef {
    pub name: String,
    /// `(type, parent)` pairs.
    pub types: TypedList,
    pub constants: TypedList,
    pub predicates: Vec<PredicateDef>,
    pub actions: Vec<SchemaDef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskDef {
    pub name: String,
    pub probability: f64,
    pub init: Vec<AtomDef>,
    pub goal: Option<Vec<AtomDef>>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProblemDef {
    pub name: String,
    pub domain: String,
    pub objects: TypedList,
    pub init: Vec<AtomDef>,
    pub goal: Option<Vec<AtomDef>>,
    pub tasks: Vec<TaskDef>,
}

fn expect_atom<'a>(s: &'a Sexp, what: &str) -> Result<&'a str, ParseError> {
    s.atom()
        .ok_or_else(|| syntax_error(s.pos(), format!("expected {what}, found a list")))
}

fn expect_list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], ParseError> {
    s.list().ok_or_else(|| {
        syntax_error(
            s.pos(),
            format!("expected {what}, found `{}`", s.atom().unwrap_or("")),
        )
    })
}

/// `(define (KIND NAME) sections...)`
fn define<'a>(text: &'a [Sexp], kind: &str) -> Result<(String, &'a [Sexp]), ParseError> {
    let [top] = text else {
        let pos = text.get(1).map_or(Pos { line: 1, col: 1 }, Sexp::pos);
        return Err(syntax_error(
            pos,
            format!("expected a single `(define ({kind} ...))` form"),
        ));
    };
    let items = expect_list(top, "`(define ...)`")?;
    if items.first().and_then(Sexp::atom) != Some("define") {
        return Err(syntax_error(top.pos(), "expected `define`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax_error(top.pos(), format!("missing `({kind} NAME)`")))?;
    let h = expect_list(header, "header")?;
    match h {
        [k, name] if k.atom() == Some(kind) => {
            Ok((expect_atom(name, "name")?.to_string(), &items[2..]))
        }
        _ => Err(syntax_error(
            header.pos(),
            format!("expected `({kind} NAME)`"),
        )),
    }
}

fn typed_list(items: &[Sexp]) -> Result<TypedList, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = expect_atom(&items[i], "a name")?;
        if sym == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax_error(items[i].pos(), "missing type after `-`"))?;
            if ty.head() == Some("either") {
                return Err(syntax_error(ty.pos(), "`either` types are not supported"));
            }
            let ty = expect_atom(ty, "a type")?;
            out.extend(pending.drain(..).map(|n| (n, ty.to_string())));
            i += 2;
        } else {
            pending.push(sym.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| (n, "object".to_string())));
    Ok(out)
}

fn atom_def(s: &Sexp) -> Result<AtomDef, ParseError> {
    let items = expect_list(s, "an atom")?;
    let (head, args) = items
        .split_first()
        .ok_or_else(|| syntax_error(s.pos(), "empty atom"))?;
    let predicate = expect_atom(head, "a predicate name")?.to_string();
    let args = args
        .iter()
        .map(|a| expect_atom(a, "a term").map(str::to_string))
        .collect::<Result<_, _>>()?;
    Ok(AtomDef {
        predicate,
        args,
        pos: s.pos(),
    })
}

/// Conjunction of positive atoms.
fn condition(s: &Sexp, out: &mut Vec<AtomDef>) -> Result<(), ParseError> {
    let items = expect_list(s, "a condition")?;
    match s.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..].iter().try_for_each(|c| condition(c, out)),
        Some("not") => Err(syntax_error(
            s.pos(),
            "negative preconditions are not supported",
        )),
        Some(op @ ("or" | "imply" | "exists" | "forall" | "=" | "when")) => {
            Err(syntax_error(s.pos(), format!("`{op}` is not supported")))
        }
        _ => {
            out.push(atom_def(s)?);
            Ok(())
        }
    }
}

pub fn parse_number(s: &str) -> Option<Cost> {
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (n.parse().ok()?, d.parse::<u64>().ok()?);
        return (d != 0).then(|| Cost::new(n, d));
    }
    match s.split_once('.') {
        None => s.parse().ok().map(Cost::from_integer),
        Some((whole, frac)) => {
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let whole: u64 = if whole.is_empty() {
                0
            } else {
                whole.parse().ok()?
            };
            let den = 10u64.pow(frac.len() as u32);
            let frac: u64 = frac.parse().ok()?;
            Some(Cost::from_integer(whole) + Cost::new(frac, den))
        }
    }
}

fn effect(s: &Sexp, schema: &mut SchemaDef) -> Result<(), ParseError> {
    let items = expect_list(s, "an effect")?;
    match s.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..].iter().try_for_each(|e| effect(e, schema)),
        Some("not") => match items {
            [_, inner] => {
                schema.del.push(atom_def(inner)?);
                Ok(())
            }
            _ => Err(syntax_error(s.pos(), "`not` takes one atom")),
        },
        Some("increase") => match items {
            [_, f, amount] if f.head() == Some("total-cost") => {
                let text = expect_atom(amount, "a cost")?;
                let c = parse_number(text)
                    .ok_or_else(|| syntax_error(amount.pos(), format!("invalid cost `{text}`")))?;
                schema.cost = Some(schema.cost.unwrap_or_default() + c);
                Ok(())
            }
            _ => Err(syntax_error(
                s.pos(),
                "only `(increase (total-cost) N)` is supported",
            )),
        },
        Some(op @ ("forall" | "when" | "decrease" | "assign")) => Err(syntax_error(
            s.pos(),
            format!("`{op}` effects are not supported"),
        )),
        _ => {
            schema.add.push(atom_def(s)?);
            Ok(())
        }
    }
}

fn action(items: &[Sexp], pos: Pos) -> Result<SchemaDef, ParseError> {
    let name = items
        .get(1)
        .ok_or_else(|| syntax_error(pos, "missing action name"))?;
    let mut schema = SchemaDef {
        name: expect_atom(name, "an action name")?.to_string(),
        params: Vec::new(),
        pre: Vec::new(),
        add: Vec::new(),
        del: Vec::new(),
        cost: None,
        pos,
    };
    let mut rest = items[2..].iter();
    while let Some(key) = rest.next() {
        let k = expect_atom(key, "an action keyword")?;
        let value = rest
            .next()
            .ok_or_else(|| syntax_error(key.pos(), format!("missing value for `{k}`")))?;
        match k {
            ":parameters" => schema.params = typed_list(expect_list(value, "a parameter list")?)?,
            ":precondition" => condition(value, &mut schema.pre)?,
            ":effect" => effect(value, &mut schema)?,
            _ => {
                return Err(syntax_error(
                    key.pos(),
                    format!("unknown action keyword `{k}`"),
                ))
            }
        }
    }
    Ok(schema)
}

pub fn parse_domain(text: &[Sexp]) -> Result<DomainDef, ParseError> {
    let (name, sections) = define(text, "domain")?;
    let mut d = DomainDef {
        name,
        ..Default::default()
    };
    for sec in sections {
        let items = expect_list(sec, "a domain section")?;
        match sec.head() {
            Some(":requirements" | ":functions") => {}
            Some(":types") => d.types.extend(typed_list(&items[1..])?),
            Some(":constants") => d.constants.extend(typed_list(&items[1..])?),
            Some(":predicates") => {
                for p in &items[1..] {
                    let pi = expect_list(p, "a predicate declaration")?;
                    let (head, params) = pi
                        .split_first()
                        .ok_or_else(|| syntax_error(p.pos(), "empty predicate declaration"))?;
                    d.predicates.push(PredicateDef {
                        name: expect_atom(head, "a predicate name")?.to_string(),
                        params: typed_list(params)?,
                    });
                }
            }
            Some(":action") => d.actions.push(action(items, sec.pos())?),
            Some(other) => {
                return Err(syntax_error(
                    sec.pos(),
                    format!("unknown domain section `{other}`"),
                ))
            }
            None => return Err(syntax_error(sec.pos(), "expected a domain section")),
        }
    }
    Ok(d)
}

fn init_atoms(items: &[Sexp], out: &mut Vec<AtomDef>) -> Result<(), ParseError> {
    for a in items {
        if a.head() == Some("=") {
            continue;
        }
        out.push(atom_def(a)?);
    }
    Ok(())
}

fn goal(items: &[Sexp], pos: Pos) -> Result<Vec<AtomDef>, ParseError> {
    let [g] = items else {
        return Err(syntax_error(pos, "`:goal` takes one condition"));
    };
    let mut out = Vec::new();
    condition(g, &mut out)?;
    Ok(out)
}

fn parse_probability(s: &Sexp) -> Result<f64, ParseError> {
    let text = expect_atom(s, "a probability")?;
    let p = match text.split_once('/') {
        Some(_) => parse_number(text).map(crate::model::cost_to_f64),
        None => text.parse::<f64>().ok(),
    };
    p.filter(|p| p.is_finite() && *p >= 0.0)
        .ok_or_else(|| syntax_error(s.pos(), format!("invalid probability `{text}`")))
}

fn task(items: &[Sexp], pos: Pos) -> Result<TaskDef, ParseError> {
    let name = items
        .get(1)
        .ok_or_else(|| syntax_error(pos, "missing task name"))?;
    let mut t = TaskDef {
        name: expect_atom(name, "a task name")?.to_string(),
        probability: f64::NAN,
        init: Vec::new(),
        goal: None,
        pos,
    };
    for part in &items[2..] {
        let pi = expect_list(part, "a task section")?;
        match part.head() {
            Some(":prob") => match pi {
                [_, p] => t.probability = parse_probability(p)?,
                _ => return Err(syntax_error(part.pos(), "`:prob` takes one number")),
            },
            Some(":init") => init_atoms(&pi[1..], &mut t.init)?,
            Some(":goal") => t.goal = Some(goal(&pi[1..], part.pos())?),
            _ => {
                return Err(syntax_error(
                    part.pos(),
                    "expected `:prob`, `:init` or `:goal`",
                ))
            }
        }
    }
    if t.probability.is_nan() {
        return Err(syntax_error(
            pos,
            format!("task `{}` has no `:prob`", t.name),
        ));
    }
    Ok(t)
}

pub fn parse_problem(text: &[Sexp]) -> Result<ProblemDef, ParseError> {
    let (name, sections) = define(text, "problem")?;
    let mut p = ProblemDef {
        name,
        ..Default::default()
    };
    for sec in sections {
        let items = expect_list(sec, "a problem section")?;
        match sec.head() {
            Some(":domain") => match items {
                [_, d] => p.domain = expect_atom(d, "a domain name")?.to_string(),
                _ => return Err(syntax_error(sec.pos(), "`:domain` takes one name")),
            },
            Some(":requirements" | ":metric") => {}
            Some(":objects") => p.objects.extend(typed_list(&items[1..])?),
            Some(":init") => init_atoms(&items[1..], &mut p.init)?,
            Some(":goal") => p.goal = Some(goal(&items[1..], sec.pos())?),
            Some(":task") => p.tasks.push(task(items, sec.pos())?),
            Some(other) => {
                return Err(syntax_error(
                    sec.pos(),
                    format!("unknown problem section `{other}`"),
                ))
            }
            None => return Err(syntax_error(sec.pos(), "expected a problem section")),
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::sexpr::parse;

    #[test]
    fn domain_with_types_and_costs() {
        let text = "(define (domain d)
            (:requirements :strips :typing :action-costs)
            (:types cell - object robot)
            (:predicates (at ?r - robot ?c - cell) (adj ?a ?b - cell))
            (:functions (total-cost))
            (:action move
              :parameters (?r - robot ?from ?to - cell)
              :precondition (and (at ?r ?from) (adj ?from ?to))
              :effect (and (at ?r ?to) (not (at ?r ?from)) (increase (total-cost) 2))))";
        let d = parse_domain(&parse(text).unwrap()).unwrap();
        assert_eq!(
            d.types,
            [
                ("cell".into(), "object".into()),
                ("robot".into(), "object".into())
            ]
        );
        assert_eq!(
            d.predicates[1].params,
            [("?a".into(), "cell".into()), ("?b".into(), "cell".into())]
        );
        let a = &d.actions[0];
        assert_eq!(a.params.len(), 3);
        assert_eq!(a.pre.len(), 2);
        assert_eq!(a.add.len(), 1);
        assert_eq!(a.del[0].args, ["?r", "?from"]);
        assert_eq!(a.cost, Some(Cost::from_integer(2)));
    }

    #[test]
    fn problem_with_tasks() {
        let text = "(define (problem p) (:domain d)
            (:objects a b - cell)
            (:init (free a) (= (total-cost) 0))
            (:task one (:prob 0.25) (:init (at a)) (:goal (at b)))
            (:task two (:prob 3/4) (:init (at b)) (:goal (and (at a) (free a)))))";
        let p = parse_problem(&parse(text).unwrap()).unwrap();
        assert_eq!(p.objects.len(), 2);
        assert_eq!(p.init.len(), 1);
        assert_eq!(p.tasks[1].probability, 0.75);
        assert_eq!(p.tasks[1].goal.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("3"), Some(Cost::from_integer(3)));
        assert_eq!(parse_number("1.5"), Some(Cost::new(3, 2)));
        assert_eq!(parse_number("2/4"), Some(Cost::new(1, 2)));
        assert_eq!(parse_number("-1"), None);
        assert_eq!(parse_number("1/0"), None);
    }

    #[test]
    fn unsupported_constructs_report_position() {
        let text = "(define (domain d)\n(:action a :parameters () :precondition (not (p))))";
        match parse_domain(&parse(text).unwrap()) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
