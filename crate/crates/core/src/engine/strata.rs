//! Layer-by-layer saturation with early stop on a basic anomaly.

use std::collections::BTreeSet;
use std::fmt;

use super::closure::Conflict;
use super::extension::{compute_extension_seeded, enumerate_extensions, Extension, DEFAULT_ENUMERATION_CAP};
use super::ground::{ground_program, GroundDefault, GroundRule, DEFAULT_GROUNDING_CAP};
use super::EngineError;
use crate::kb::{RuleBase, Scenario};
use crate::logic::{Literal, Modality, PredicateRegistry, Sign};

pub const LAYERS: [u8; 3] = [3, 2, 1];

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Saturate layer by layer; otherwise run one global fixpoint.
    pub strata: bool,
    /// Enumerate every extension instead of the deterministic one.
    pub all_extensions: bool,
    pub max_extensions: usize,
    pub enumeration_cap: usize,
    pub grounding_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            strata: true,
            all_extensions: false,
            max_extensions: 8,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            grounding_cap: DEFAULT_GROUNDING_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    AnomalyFound,
    NoAnomaly,
    InconsistentFacts,
    ExtensionLimitHit,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::AnomalyFound => "anomaly_found",
            RunStatus::NoAnomaly => "no_anomaly",
            RunStatus::InconsistentFacts => "inconsistent_facts",
            RunStatus::ExtensionLimitHit => "extension_limit_hit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    Layer(u8),
    Global,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::Layer(n) => write!(f, "layer {n}"),
            Stratum::Global => f.write_str("global"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumEntry {
    pub stratum: Stratum,
    pub strict_rules: usize,
    pub defaults: usize,
    pub extensions: usize,
    /// Literals in the first extension.
    pub literals: usize,
    pub halted: bool,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub status: RunStatus,
    /// Extensions of the last stratum processed.
    pub extensions: Vec<Extension>,
    /// Positive `b_an` literals of each extension, sorted.
    pub anomalies: Vec<Vec<Literal>>,
    pub stratum_log: Vec<StratumEntry>,
    pub conflict: Option<Conflict>,
    pub warnings: Vec<String>,
}

impl RunResult {
    /// Every distinct basic anomaly across extensions.
    pub fn anomaly_atoms(&self) -> BTreeSet<Literal> {
        self.anomalies.iter().flatten().cloned().collect()
    }
}

fn is_anomaly(l: &Literal) -> bool {
    l.sign == Sign::Pos && l.atom.modality == Modality::BasicAnomaly
}

fn min_layer(reg: &PredicateRegistry, lits: &[Literal]) -> u8 {
    lits.iter().map(|l| reg.literal_layer(l)).min().unwrap_or(u8::MAX)
}

/// Rules taking part in `stratum`: tagged with a layer at or above it, and
/// producing facts of the layer just below it or higher.
fn participating<'a>(
    reg: &PredicateRegistry,
    stratum: Stratum,
    strict: &'a [GroundRule],
    defaults: &'a [GroundDefault],
) -> (Vec<GroundRule>, Vec<GroundDefault>) {
    match stratum {
        Stratum::Global => (strict.to_vec(), defaults.to_vec()),
        Stratum::Layer(n) => {
            let floor = n.saturating_sub(1);
            let s = strict.iter().filter(|r| r.layer >= n && min_layer(reg, &r.head) >= floor).cloned().collect();
            let d =
                defaults.iter().filter(|d| d.layer >= n && min_layer(reg, &d.consequent) >= floor).cloned().collect();
            (s, d)
        }
    }
}

/// Runs the rule base on a scenario.
///
/// Layers are processed from 3 down to 1; each stratum continues from the
/// defaults applied by the one above. After each stratum the extension is
/// checked for `b_an` atoms and the run halts at the first stratum that has
/// any. With `strata` off the whole program is one stratum.
pub fn run_strata(rb: &RuleBase, s: &Scenario, opts: &RunOptions) -> Result<RunResult, EngineError> {
    let program = ground_program(rb, s, opts.grounding_cap)?;
    let strata: Vec<Stratum> =
        if opts.strata { LAYERS.iter().map(|&n| Stratum::Layer(n)).collect() } else { vec![Stratum::Global] };

    let mut result = RunResult {
        status: RunStatus::NoAnomaly,
        extensions: Vec::new(),
        anomalies: Vec::new(),
        stratum_log: Vec::new(),
        conflict: None,
        warnings: Vec::new(),
    };
    let mut seed: Vec<String> = Vec::new();
    let mut truncated = false;

    for stratum in strata {
        let (strict, defaults) = participating(&rb.predicates, stratum, &program.strict, &program.defaults);
        let outcome = if opts.all_extensions {
            enumerate_extensions(&program.facts, &strict, &defaults, opts.max_extensions, opts.enumeration_cap).map(
                |e| {
                    truncated |= e.truncated;
                    e.extensions
                },
            )
        } else {
            compute_extension_seeded(&program.facts, &strict, &defaults, &seed, opts.enumeration_cap)
                .map(|e| e.into_iter().collect::<Vec<_>>())
        };
        let extensions = match outcome {
            Ok(exts) => exts,
            Err(EngineError::Inconsistent(c)) => {
                result.status = RunStatus::InconsistentFacts;
                result.conflict = Some(c);
                result.extensions.clear();
                result.anomalies.clear();
                return Ok(result);
            }
            Err(e) => return Err(e),
        };
        if let Some(first) = extensions.first() {
            seed = first.applied.clone();
        }
        let anomalies: Vec<Vec<Literal>> =
            extensions.iter().map(|e| e.literals.iter().filter(|l| is_anomaly(l)).cloned().collect()).collect();
        let halted = anomalies.iter().any(|a| !a.is_empty());
        result.stratum_log.push(StratumEntry {
            stratum,
            strict_rules: strict.len(),
            defaults: defaults.len(),
            extensions: extensions.len(),
            literals: extensions.first().map_or(0, |e| e.literals.len()),
            halted,
        });
        result.extensions = extensions;
        result.anomalies = anomalies;
        if halted {
            result.status = RunStatus::AnomalyFound;
            break;
        }
    }

    if result.status != RunStatus::AnomalyFound && truncated {
        result.status = RunStatus::ExtensionLimitHit;
    }
    if result.extensions.is_empty() && result.status == RunStatus::NoAnomaly {
        result.warnings.push("the theory has no extension".to_string());
    }
    let times: BTreeSet<i64> = result.anomaly_atoms().iter().filter_map(Literal::time).collect();
    if times.len() >= 2 {
        result.warnings.push(format!(
            "basic anomalies found at {} distinct states; a well-formed rule base blames a single transition",
            times.len()
        ));
    }
    Ok(result)
}
