//! Serialization of grounded models back to the input grammar.

use std::fmt::Write;

use crate::model::{unit_cost, Cost, Domain, FluentSet, ModelPair, Plan, TaskSpec, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelTexts {
    pub robot_domain: String,
    pub human_domain: String,
    pub problem: String,
}

fn conj(vocab: &Vocabulary, set: &FluentSet) -> String {
    let atoms: Vec<String> = vocab.names_of(set).map(|n| format!("({n})")).collect();
    format!("(and {})", atoms.join(" ")).replace("(and )", "(and)")
}

fn cost_text(c: Cost) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Writes a grounded domain: every fluent becomes a nullary predicate and
/// every action is parameterless.
pub fn write_domain(name: &str, domain: &Domain) -> String {
    let vocab = domain.vocab();
    let mut s = String::new();
    let _ = writeln!(s, "(define (domain {name})");
    let _ = writeln!(s, "  (:requirements :strips :action-costs)");
    s.push_str("  (:predicates");
    for n in vocab.names() {
        let _ = write!(s, " ({n})");
    }
    s.push_str(")\n  (:functions (total-cost))\n");
    for a in domain.actions() {
        let mut effect: Vec<String> = vocab.names_of(&a.add).map(|n| format!("({n})")).collect();
        effect.extend(vocab.names_of(&a.del).map(|n| format!("(not ({n}))")));
        if a.cost != unit_cost() {
            effect.push(format!("(increase (total-cost) {})", cost_text(a.cost)));
        }
        let _ = writeln!(s, "  (:action {}", a.name);
        let _ = writeln!(s, "    :parameters ()");
        let _ = writeln!(s, "    :precondition {}", conj(vocab, &a.pre));
        let _ = writeln!(s, "    :effect (and {}))", effect.join(" "));
    }
    s.push_str(")\n");
    s.replace("(and )", "(and)")
}

pub fn write_problem(vocab: &Vocabulary, tasks: &TaskSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "(define (problem grounded)");
    let _ = writeln!(s, "  (:domain grounded)");
    for (t, p) in tasks.tasks.iter().zip(&tasks.probabilities) {
        let _ = writeln!(s, "  (:task {}", t.name);
        let _ = writeln!(s, "    (:prob {p})");
        let init: Vec<String> = vocab.names_of(&t.init).map(|n| format!("({n})")).collect();
        let _ = writeln!(s, "    (:init {})", init.join(" "));
        let _ = writeln!(s, "    (:goal {}))", conj(vocab, &t.goal));
    }
    s.push_str(")\n");
    s.replace("(:init )", "(:init)")
}

pub fn write_model_pair(pair: &ModelPair, tasks: &TaskSpec) -> ModelTexts {
    ModelTexts {
        robot_domain: write_domain("grounded", &pair.robot),
        human_domain: write_domain("grounded", &pair.human),
        problem: write_problem(pair.vocab(), tasks),
    }
}

/// One action per line.
pub fn write_plan(plan: &Plan) -> String {
    plan.steps.iter().map(|s| format!("({s})\n")).collect()
}

/// Reads a plan file: one action per line, either `name` or `(name)`.
/// Lifted `(schema a b)` lines are joined with `_`. `;` starts a comment.
pub fn parse_plan(text: &str) -> Plan {
    let steps = text
        .lines()
        .map(|l| l.split(';').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.trim_start_matches('(')
                .trim_end_matches(')')
                .split_whitespace()
                .map(str::to_lowercase)
                .collect::<Vec<_>>()
                .join("_")
        })
        .collect();
    Plan { steps }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_lines() {
        let p = parse_plan("; cost 3\n(move a b)\nPICK-UP_a\n\n(put-down a) ; done\n");
        assert_eq!(p, Plan::new(["move_a_b", "pick-up_a", "put-down_a"]));
        assert_eq!(parse_plan(&write_plan(&p)), p);
    }

    #[test]
    fn fractional_costs() {
        assert_eq!(cost_text(Cost::new(3, 2)), "3/2");
        assert_eq!(cost_text(Cost::from_integer(4)), "4");
    }
}
