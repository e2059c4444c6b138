//! Pretty-printer. Output parses back to a structurally identical value.

use std::fmt::Write;

use super::{DefaultRule, RuleBase, Scenario, StrictRule};
use crate::logic::Literal;

fn join(lits: &[Literal]) -> String {
    lits.iter().map(ToString::to_string).collect::<Vec<_>>().join(" & ")
}

fn header(kw: &str, id: &str, layer: u8, allow_same: bool) -> String {
    let same = if allow_same { " allow_same" } else { "" };
    format!("{kw} {id} layer {layer}{same}:")
}

pub fn render_strict(r: &StrictRule) -> String {
    let mut s = format!("{} {}", header("rule", r.id.as_str(), r.layer, r.allow_same), join(&r.head));
    if !r.body.is_empty() {
        write!(s, " <- {}", join(&r.body)).unwrap();
    }
    s.push('.');
    s
}

pub fn render_default(d: &DefaultRule) -> String {
    let mut s = header("default", d.id.as_str(), d.layer, d.allow_same);
    if !d.prerequisite.is_empty() {
        write!(s, " {}", join(&d.prerequisite)).unwrap();
    }
    write!(s, " : {}", join(&d.consequent)).unwrap();
    if !d.constraint.is_empty() {
        write!(s, " [{}]", join(&d.constraint)).unwrap();
    }
    s.push('.');
    s
}

pub fn render_rulebase(rb: &RuleBase) -> String {
    let mut out = String::new();
    for p in rb.predicates.iter() {
        write!(out, "predicate {}/{} layer {}", p.name, p.surface_arity, p.layer).unwrap();
        if p.flags.is_static {
            out.push_str(" static");
        }
        if p.flags.backward_persistent {
            out.push_str(" backward_persist");
        }
        if p.flags.unforeseeable {
            out.push_str(" unforeseeable");
        }
        out.push_str(".\n");
    }
    for r in &rb.strict {
        out.push_str(&render_strict(r));
        out.push('\n');
    }
    for d in &rb.defaults {
        out.push_str(&render_default(d));
        out.push('\n');
    }
    out
}

pub fn render_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    if !s.label.is_empty() {
        writeln!(out, "scenario {}.", s.label).unwrap();
    }
    if !s.agents.is_empty() {
        let names: Vec<_> = s.agents.iter().map(|a| a.as_str()).collect();
        writeln!(out, "agents {}.", names.join(", ")).unwrap();
    }
    writeln!(out, "states 0..{}.", s.max_state).unwrap();
    for f in &s.facts {
        writeln!(out, "{f}.").unwrap();
    }
    out
}
