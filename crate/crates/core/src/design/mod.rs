//! Environment design: modifications to the model pair, the scalarized
//! longitudinal objective, and breadth-first search over design subsets.

mod modification;
mod objective;
mod search;

use thiserror::Error;

use crate::model::ModelError;

pub use modification::{
    apply_designs, glob_match, sorted_ids, Configuration, DesignModification, ModificationKind,
    ModificationRecord,
};
pub use objective::{
    evaluate_config, longitudinal_factor, ConfigEvaluation, Evaluator, LongitudinalParams,
    ObjectiveWeights,
};
pub use search::{
    exhaustive_optimum, pareto_front, relevance_prune, search, DesignProblem, NodeRecord,
    SearchOptions, SearchOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("modification `{id}`: no action matches `{action}`")]
    UnknownAction { id: String, action: String },
    #[error("modification `{id}`: unknown fluent `{fluent}`")]
    UnknownFluent { id: String, fluent: String },
    #[error("modification `{id}`: no human action moves between `{from}` and `{to}`")]
    NoTransition {
        id: String,
        from: String,
        to: String,
    },
    #[error("modification `{id}`: missing `{field}`")]
    MissingField { id: String, field: &'static str },
    #[error("modification `{id}`: cost {cost} must be finite and non-negative")]
    BadCost { id: String, cost: f64 },
    #[error("duplicate modification id `{0}`")]
    DuplicateId(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
