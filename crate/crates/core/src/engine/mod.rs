//! Grounding, strict closure, default extensions and stratified runs.

mod closure;
mod extension;
mod ground;
mod strata;

pub use closure::{strict_closure, Conflict, Derivation, Source, Trace};
pub use extension::{
    applicable, compute_extension, compute_extension_seeded, enumerate_extensions, is_extension, Enumeration,
    Extension, LiteralSet, DEFAULT_ENUMERATION_CAP,
};
pub use ground::{
    generate_persistence, ground_program, ground_rules, persistence_schemas, Domains, GroundDefault, GroundProgram,
    GroundRule, DEFAULT_GROUNDING_CAP,
};
pub use strata::{run_strata, RunOptions, RunResult, RunStatus, Stratum, StratumEntry, LAYERS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("inconsistent facts: {0}")]
    Inconsistent(Conflict),
    #[error("grounding produced more than {cap} instances")]
    GroundingCap { cap: usize },
    #[error("{relevant} defaults may apply, more than the exhaustive-search cap of {cap}; use the deterministic mode")]
    EnumerationCap { relevant: usize, cap: usize },
}
