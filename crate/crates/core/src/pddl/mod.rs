//! Text formats: a STRIPS subset of PDDL for the robot and human domains and
//! a shared multi-task problem, the design-space file, plan files and result
//! reports.
//!
//! Problems may hold several `(:task NAME (:prob P) (:init ...) (:goal ...))`
//! blocks. Each task's initial state is the top-level `:init` plus its own,
//! and its goal defaults to the top-level `:goal`.

mod design_spec;
mod ground;
mod report;
pub mod sexpr;
pub mod syntax;
mod write;

use thiserror::Error;

use crate::model::ModelError;

pub use design_spec::{parse_design_spec, write_design_spec, DesignSpec};
pub use ground::{ground, ground_name, parse_model_pair, ParsedModels};
pub use report::{
    pct_diff, read_report_csv, report_rows, write_report, ReportFormat, ReportRow, REPORT_HEADER,
};
pub use write::{
    parse_plan, write_domain, write_model_pair, write_plan, write_problem, ModelTexts,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unbound variable `{0}`")]
    UnknownVariable(String),
    #[error("predicate `{predicate}` takes {expected} arguments, got {found}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("argument types do not match {0}")]
    TypeMismatch(String),
    #[error("action mapping: {0}")]
    ActionMismatch(String),
    #[error("no goal for `{0}`")]
    MissingGoal(String),
    #[error("{0}")]
    Conflict(String),
    #[error("invalid setting: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
