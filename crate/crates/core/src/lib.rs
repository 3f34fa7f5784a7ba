//! Explicable planning and environment design.
//!
//! Given a robot planning model and a human's mental model of that robot,
//! this crate finds the robot plan the human finds least surprising and
//! searches sets of environment modifications that trade design cost,
//! robot plan cost and long-run inexplicability against each other.
//!
//! Module map:
//! - [`model`]: grounded STRIPS problems and their execution semantics.
//! - [`pddl`]: parsing of domain/problem/design files and report output.
//! - [`planner`]: A* with `h_max`, plus an enumeration oracle.
//! - [`explicability`]: inexplicability scores and the dual-model compilation.
//! - [`design`]: design modifications, the scalarized objective and the
//!   breadth-first design search.
//! - [`harness`]: built-in fixtures and experiment sweeps.

pub mod design;
pub mod explicability;
pub mod harness;
pub mod model;
pub mod pddl;
pub mod planner;
