//! Grounding of rule schemas over a scenario's agents, properties and states.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::EngineError;
use crate::kb::{collect_vars, DefaultRule, RuleBase, Scenario, StrictRule};
use crate::logic::{Atom, Binding, Literal, Modality, Symbol, Term, TimeExpr, Value, VarRole};

/// Default bound on the number of ground instances of one program.
pub const DEFAULT_GROUNDING_CAP: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRule {
    pub id: Symbol,
    pub layer: u8,
    pub body: Vec<Literal>,
    pub head: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundDefault {
    /// Id of the schema this instance comes from.
    pub id: Symbol,
    /// Unique label, e.g. `D2{Ag=A, Ag'=B, T=1}`.
    pub instance: String,
    pub layer: u8,
    pub prerequisite: Vec<Literal>,
    pub consequent: Vec<Literal>,
    /// Consequent plus constraint.
    pub justification: Vec<Literal>,
}

impl GroundDefault {
    /// A ground default built directly from literals, labelled by its id.
    pub fn new(
        id: &str,
        layer: u8,
        prerequisite: Vec<Literal>,
        consequent: Vec<Literal>,
        constraint: Vec<Literal>,
    ) -> Self {
        let justification = consequent.iter().chain(&constraint).cloned().collect();
        GroundDefault { id: Symbol::new(id), instance: id.to_string(), layer, prerequisite, consequent, justification }
    }

    /// Scan order: layer descending, then schema id, then the instance's literals.
    pub fn scan_cmp(&self, other: &Self) -> Ordering {
        (Reverse(self.layer), &self.id, &self.consequent, &self.prerequisite, &self.justification).cmp(&(
            Reverse(other.layer),
            &other.id,
            &other.consequent,
            &other.prerequisite,
            &other.justification,
        ))
    }
}

impl GroundRule {
    pub fn new(id: &str, layer: u8, body: Vec<Literal>, head: Vec<Literal>) -> Self {
        GroundRule { id: Symbol::new(id), layer, body, head }
    }
}

/// Facts plus ground rules: everything the extension machinery needs.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    pub facts: Vec<Literal>,
    pub strict: Vec<GroundRule>,
    pub defaults: Vec<GroundDefault>,
}

/// Values each sort of variable ranges over.
#[derive(Clone, Debug)]
pub struct Domains {
    pub agents: Vec<Symbol>,
    /// Declared predicates plus other constants used as properties or
    /// non-agent arguments (factor names, speed signs).
    pub properties: Vec<Symbol>,
    pub states: std::ops::RangeInclusive<i64>,
}

impl Domains {
    pub fn new(rb: &RuleBase, s: &Scenario) -> Self {
        let agents: BTreeSet<Symbol> = s.agents.iter().cloned().collect();
        let mut props: BTreeSet<Symbol> = rb.predicates.iter().map(|p| p.name.clone()).collect();
        let mut note = |l: &Literal| {
            if let Some(p) = l.atom.property.base_predicate() {
                if !l.atom.modality.takes_predicate() {
                    props.insert(p.clone());
                }
            }
            let (_, args, _) = l.atom.unfold();
            for a in args {
                if let Term::Const(c) = a {
                    if !agents.contains(&c) {
                        props.insert(c);
                    }
                }
            }
        };
        s.facts.iter().for_each(&mut note);
        for r in &rb.strict {
            r.body.iter().chain(&r.head).for_each(&mut note);
        }
        for d in &rb.defaults {
            d.prerequisite.iter().chain(&d.consequent).chain(&d.constraint).for_each(&mut note);
        }
        Domains { agents: s.agents.clone(), properties: props.into_iter().collect(), states: s.states() }
    }
}

struct Schema<'a> {
    id: &'a Symbol,
    allow_same: bool,
    literals: Vec<&'a Literal>,
}

/// Every binding of the schema's variables, with distinct agent variables
/// bound to distinct agents unless the schema allows otherwise.
fn bindings(schema: &Schema<'_>, dom: &Domains) -> Vec<Binding> {
    let mut roles: BTreeMap<Symbol, BTreeSet<VarRole>> = BTreeMap::new();
    for (v, role) in collect_vars(schema.literals.iter().copied()) {
        roles.entry(v).or_default().insert(role);
    }
    let vars: Vec<(Symbol, Vec<Value>, bool)> = roles
        .into_iter()
        .map(|(v, rs)| {
            if rs.contains(&VarRole::Time) {
                (v, dom.states.clone().map(Value::Int).collect(), false)
            } else if rs.contains(&VarRole::Property) {
                let mut vals: Vec<Value> = dom.properties.iter().cloned().map(Value::Const).collect();
                if rs.contains(&VarRole::Individual) {
                    vals.extend(dom.agents.iter().cloned().map(Value::Const));
                }
                (v, vals, false)
            } else {
                (v, dom.agents.iter().cloned().map(Value::Const).collect(), true)
            }
        })
        .collect();

    let mut out = Vec::new();
    let mut current = Binding::new();
    fn go(
        i: usize,
        vars: &[(Symbol, Vec<Value>, bool)],
        distinct: bool,
        current: &mut Binding,
        out: &mut Vec<Binding>,
    ) {
        let Some((v, vals, is_agent)) = vars.get(i) else {
            out.push(current.clone());
            return;
        };
        for val in vals {
            if distinct && *is_agent {
                let clash = vars[..i].iter().any(|(w, _, a)| *a && current.get(w) == Some(val));
                if clash {
                    continue;
                }
            }
            current.insert(v.clone(), val.clone());
            go(i + 1, vars, distinct, current, out);
        }
        current.remove(v);
    }
    go(0, &vars, !schema.allow_same, &mut current, &mut out);
    out
}

fn instantiate(lits: &[Literal], b: &Binding, dom: &Domains) -> Option<Vec<Literal>> {
    lits.iter()
        .map(|l| {
            let g = l.substitute(b);
            match g.time() {
                Some(t) if !dom.states.contains(&t) => None,
                _ => Some(g),
            }
        })
        .collect()
}

fn label(id: &Symbol, b: &Binding) -> String {
    let mut s = id.to_string();
    if !b.is_empty() {
        s.push('{');
        for (i, (k, v)) in b.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            write!(s, "{k}={v}").unwrap();
        }
        s.push('}');
    }
    s
}

struct Counter {
    used: usize,
    cap: usize,
}

impl Counter {
    fn bump(&mut self) -> Result<(), EngineError> {
        self.used += 1;
        if self.used > self.cap {
            Err(EngineError::GroundingCap { cap: self.cap })
        } else {
            Ok(())
        }
    }
}

fn ground_strict(r: &StrictRule, dom: &Domains, n: &mut Counter) -> Result<Vec<GroundRule>, EngineError> {
    let schema = Schema { id: &r.id, allow_same: r.allow_same, literals: r.body.iter().chain(&r.head).collect() };
    let mut out = Vec::new();
    for b in bindings(&schema, dom) {
        let (Some(body), Some(head)) = (instantiate(&r.body, &b, dom), instantiate(&r.head, &b, dom)) else {
            continue;
        };
        n.bump()?;
        out.push(GroundRule { id: schema.id.clone(), layer: r.layer, body, head });
    }
    Ok(out)
}

fn ground_default(d: &DefaultRule, dom: &Domains, n: &mut Counter) -> Result<Vec<GroundDefault>, EngineError> {
    let schema = Schema {
        id: &d.id,
        allow_same: d.allow_same,
        literals: d.prerequisite.iter().chain(&d.consequent).chain(&d.constraint).collect(),
    };
    let mut out = Vec::new();
    for b in bindings(&schema, dom) {
        let (Some(prerequisite), Some(consequent), Some(constraint)) = (
            instantiate(&d.prerequisite, &b, dom),
            instantiate(&d.consequent, &b, dom),
            instantiate(&d.constraint, &b, dom),
        ) else {
            continue;
        };
        n.bump()?;
        let justification = consequent.iter().chain(&constraint).cloned().collect();
        out.push(GroundDefault {
            id: d.id.clone(),
            instance: label(&d.id, &b),
            layer: d.layer,
            prerequisite,
            consequent,
            justification,
        });
    }
    Ok(out)
}

/// Grounds the rule base's own strict rules and defaults. Instances with a
/// time outside the scenario's states are dropped.
pub fn ground_rules(
    rb: &RuleBase,
    s: &Scenario,
    cap: usize,
) -> Result<(Vec<GroundRule>, Vec<GroundDefault>), EngineError> {
    let dom = Domains::new(rb, s);
    let mut n = Counter { used: 0, cap };
    let mut strict = Vec::new();
    for r in &rb.strict {
        strict.extend(ground_strict(r, &dom, &mut n)?);
    }
    let mut defaults = Vec::new();
    for d in &rb.defaults {
        defaults.extend(ground_default(d, &dom, &mut n)?);
    }
    Ok((strict, defaults))
}

fn holds_pattern(pred: &Symbol, arity: u8, time: TimeExpr) -> Literal {
    let subject = Term::var("Ag");
    let property =
        if arity == 2 { Term::Combine(pred.clone(), Box::new(Term::var("Ag'"))) } else { Term::Const(pred.clone()) };
    Literal::pos(Atom::new(Modality::Holds, property, subject, time))
}

/// Persistence defaults as rule schemas: forward persistence for static
/// predicates, backward persistence for the declared backward-persistent ones.
pub fn persistence_schemas(rb: &RuleBase) -> Vec<DefaultRule> {
    let t = |off| TimeExpr::Var(Symbol::new("T"), off);
    let mut out = Vec::new();
    for p in rb.predicates.iter() {
        if p.flags.is_static {
            out.push(DefaultRule {
                id: Symbol::new(&format!("persist_fwd_{}", p.name)),
                layer: p.layer,
                allow_same: false,
                prerequisite: vec![
                    Literal::pos(Atom::static_(Term::Const(p.name.clone()))),
                    holds_pattern(&p.name, p.surface_arity, t(0)),
                ],
                consequent: vec![holds_pattern(&p.name, p.surface_arity, t(1))],
                constraint: Vec::new(),
            });
        }
        if p.flags.backward_persistent {
            out.push(DefaultRule {
                id: Symbol::new(&format!("persist_back_{}", p.name)),
                layer: p.layer,
                allow_same: false,
                prerequisite: vec![holds_pattern(&p.name, p.surface_arity, t(0))],
                consequent: vec![holds_pattern(&p.name, p.surface_arity, t(-1))],
                constraint: Vec::new(),
            });
        }
    }
    out
}

/// Ground persistence defaults for the scenario, clipped to its states.
pub fn generate_persistence(rb: &RuleBase, s: &Scenario) -> Vec<GroundDefault> {
    let dom = Domains::new(rb, s);
    let mut n = Counter { used: 0, cap: usize::MAX };
    persistence_schemas(rb).iter().flat_map(|d| ground_default(d, &dom, &mut n).unwrap_or_default()).collect()
}

/// Scenario facts, `static(p)` facts for declared static predicates, and
/// every ground rule and default including persistence.
pub fn ground_program(rb: &RuleBase, s: &Scenario, cap: usize) -> Result<GroundProgram, EngineError> {
    let (strict, mut defaults) = ground_rules(rb, s, cap)?;
    let persistence = generate_persistence(rb, s);
    if strict.len() + defaults.len() + persistence.len() > cap {
        return Err(EngineError::GroundingCap { cap });
    }
    defaults.extend(persistence);
    let mut facts = s.facts.clone();
    for p in rb.static_predicates() {
        let l = Literal::pos(Atom::static_(Term::Const(p)));
        if !facts.contains(&l) {
            facts.push(l);
        }
    }
    Ok(GroundProgram { facts, strict, defaults })
}
