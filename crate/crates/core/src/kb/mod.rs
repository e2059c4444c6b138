//! Rule bases and scenarios: data model, text format, pretty-printer.
//!
//! Rule base files (`.nrk`) hold predicate declarations, strict rules and
//! defaults:
//!
//! ```text
//! predicate is_follower/2 layer 2 backward_persist.
//! rule R1 layer 2: -holds(stops, Ag', T) <- holds(crash, Ag, Ag', T).
//! default D1 layer 1: normally(P, Ag, T) : holds(P, Ag, T+1).
//! ```
//!
//! Scenario files (`.scn`) hold agents, the state range and ground facts.

mod diag;
mod parse;
mod render;

pub use diag::{Diagnostic, DiagnosticKind, ParseError, Pos};
pub use parse::{parse_rulebase, parse_scenario};
pub use render::{render_rulebase, render_scenario};

use std::collections::BTreeSet;

use crate::logic::{Literal, Modality, PredicateRegistry, Symbol, Term, VarRole};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictRule {
    pub id: Symbol,
    pub layer: u8,
    /// Lets distinct agent variables denote the same agent.
    pub allow_same: bool,
    pub body: Vec<Literal>,
    pub head: Vec<Literal>,
}

/// `prerequisite : consequent [constraint]`. The justification is the
/// consequent together with the constraint; normal defaults have no
/// constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefaultRule {
    pub id: Symbol,
    pub layer: u8,
    pub allow_same: bool,
    pub prerequisite: Vec<Literal>,
    pub consequent: Vec<Literal>,
    pub constraint: Vec<Literal>,
}

impl DefaultRule {
    pub fn justification(&self) -> impl Iterator<Item = &Literal> {
        self.consequent.iter().chain(&self.constraint)
    }

    pub fn is_normal(&self) -> bool {
        self.constraint.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleBase {
    pub predicates: PredicateRegistry,
    pub strict: Vec<StrictRule>,
    pub defaults: Vec<DefaultRule>,
}

impl RuleBase {
    pub fn static_predicates(&self) -> Vec<Symbol> {
        self.predicates.iter().filter(|p| p.flags.is_static).map(|p| p.name.clone()).collect()
    }

    pub fn backward_persistent_predicates(&self) -> Vec<Symbol> {
        self.predicates.iter().filter(|p| p.flags.backward_persistent).map(|p| p.name.clone()).collect()
    }

    pub fn unforeseeable_predicates(&self) -> Vec<Symbol> {
        self.predicates.iter().filter(|p| p.flags.unforeseeable).map(|p| p.name.clone()).collect()
    }

    pub fn rule_ids(&self) -> impl Iterator<Item = &Symbol> {
        self.strict.iter().map(|r| &r.id).chain(self.defaults.iter().map(|d| &d.id))
    }
}

#[derive(Clone, Debug, Eq)]
pub struct Scenario {
    pub label: String,
    pub agents: Vec<Symbol>,
    /// States are `0..=max_state`.
    pub max_state: i64,
    /// Canonical ground facts.
    pub facts: Vec<Literal>,
    /// Source position of each fact, when parsed from text.
    pub positions: Vec<Pos>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.agents == other.agents
            && self.max_state == other.max_state
            && self.facts == other.facts
    }
}

impl Scenario {
    pub fn new(label: &str, agents: &[&str], max_state: i64, facts: Vec<Literal>) -> Self {
        Scenario {
            label: label.to_string(),
            agents: agents.iter().map(|a| Symbol::new(a)).collect(),
            max_state,
            positions: vec![Pos::default(); facts.len()],
            facts,
        }
    }

    pub fn states(&self) -> std::ops::RangeInclusive<i64> {
        0..=self.max_state
    }
}

/// Variables of a literal list, with their roles.
pub(crate) fn collect_vars<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> BTreeSet<(Symbol, VarRole)> {
    let mut out = BTreeSet::new();
    for l in lits {
        l.atom.visit_vars(&mut |v, role| {
            out.insert((v.clone(), role));
        });
    }
    out
}

/// Checks that every scenario fact uses a predicate declared in the rule base
/// with the same surface arity. Never fails; returns the diagnostics.
pub fn validate_crossrefs(rb: &RuleBase, s: &Scenario) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, fact) in s.facts.iter().enumerate() {
        let pos = s.positions.get(i).copied().unwrap_or_default();
        let atom = &fact.atom;
        let Some(name) = atom.property.base_predicate() else { continue };
        match rb.predicates.get(name) {
            Some(sym) => {
                if atom.modality == Modality::Static {
                    continue;
                }
                let found = surface_arity(&atom.property);
                if usize::from(sym.surface_arity) != found {
                    out.push(Diagnostic::new(
                        pos,
                        DiagnosticKind::ArityMismatch,
                        format!(
                            "`{name}` is declared with {} agent argument(s) but this fact gives {found}",
                            sym.surface_arity
                        ),
                    ));
                }
            }
            None if atom.modality.takes_predicate() => out.push(Diagnostic::new(
                pos,
                DiagnosticKind::UndeclaredPredicate,
                format!("predicate `{name}` is not declared in the rule base"),
            )),
            None => {}
        }
    }
    out
}

fn surface_arity(property: &Term) -> usize {
    match property {
        Term::Combine(..) => 2,
        Term::Not(inner) => surface_arity(inner),
        _ => 1,
    }
}
