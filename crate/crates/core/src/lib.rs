//! Nonmonotonic reasoning over reified driving norms.
//!
//! A scenario of ground facts about vehicles is run against a layered rule
//! base of strict rules and Reiter-style defaults. The engine computes an
//! extension layer by layer and stops as soon as a basic anomaly is derived:
//! either a duty the agent was able to fulfil but did not, or an
//! unforeseeable perturbation. The anomaly is then rendered as an answer to
//! "why did the accident happen?".

// Conflicts carry two full literals; they are rare and never on a hot path.
#![allow(clippy::result_large_err)]

pub mod builtin;
pub mod engine;
pub mod explain;
pub mod kb;
pub mod logic;

pub use engine::{run_strata, EngineError, RunOptions, RunResult, RunStatus};
pub use kb::{parse_rulebase, parse_scenario, validate_crossrefs, RuleBase, Scenario};
pub use logic::{canonicalize, complements, Literal};
