//! Extensions of default theories in the literal fragment.
//!
//! A theory is a set of ground facts, ground strict rules and ground
//! defaults whose prerequisites, consequents and justifications are all
//! literals. Entailment is forward-chaining closure; a justification is
//! consistent with a set when the set does not contain its complement.

use std::collections::{BTreeSet, HashSet};

use super::closure::{Closure, Derivation, RuleIndex, Source, Trace};
use super::ground::{GroundDefault, GroundRule};
use super::EngineError;
use crate::logic::Literal;

/// Default bound on the number of possibly-applicable defaults searched
/// exhaustively.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub literals: BTreeSet<Literal>,
    /// Instance labels of the generating defaults, in application order.
    pub applied: Vec<String>,
    pub trace: Trace,
}

impl Extension {
    pub fn contains(&self, l: &Literal) -> bool {
        self.literals.contains(l)
    }
}

/// Membership test shared by the set types used here.
pub trait LiteralSet {
    fn has(&self, l: &Literal) -> bool;
}

impl LiteralSet for HashSet<Literal> {
    fn has(&self, l: &Literal) -> bool {
        self.contains(l)
    }
}

impl LiteralSet for BTreeSet<Literal> {
    fn has(&self, l: &Literal) -> bool {
        self.contains(l)
    }
}

/// Prerequisites all present and no justification contradicted.
pub fn applicable(d: &GroundDefault, current: &impl LiteralSet) -> bool {
    d.prerequisite.iter().all(|p| current.has(p)) && d.justification.iter().all(|j| !current.has(&j.complement()))
}

fn consistent(set: &BTreeSet<Literal>) -> bool {
    set.iter().all(|l| !set.contains(&l.complement()))
}

fn scan_order(defaults: &[GroundDefault]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..defaults.len()).collect();
    order.sort_by(|&a, &b| defaults[a].scan_cmp(&defaults[b]));
    order
}

fn derivation(d: &GroundDefault) -> Derivation {
    Derivation {
        source: Source::Default { id: d.id.clone(), instance: d.instance.clone() },
        premises: d.prerequisite.clone(),
    }
}

/// Rebuilds the set generated from `candidate`'s point of view: defaults fire
/// as soon as their prerequisites are derived, provided their justifications
/// are consistent with `candidate`. Returns `None` on a conflict.
fn reconstruct<'i, 'r>(
    index: &'i RuleIndex<'r>,
    facts: &[Literal],
    defaults: &[GroundDefault],
    order: &[usize],
    candidate: &BTreeSet<Literal>,
) -> Option<(Closure<'i, 'r>, Vec<String>)> {
    let mut c = Closure::new(index, facts).ok()?;
    let mut fired = vec![false; defaults.len()];
    let mut applied = Vec::new();
    loop {
        let mut changed = false;
        for &i in order {
            let d = &defaults[i];
            if fired[i]
                || !d.prerequisite.iter().all(|p| c.contains(p))
                || d.justification.iter().any(|j| candidate.contains(&j.complement()))
            {
                continue;
            }
            fired[i] = true;
            changed = true;
            applied.push(d.instance.clone());
            c.add(&d.consequent, &derivation(d)).ok()?;
        }
        if !changed {
            return Some((c, applied));
        }
    }
}

/// Reiter's fixpoint condition: `candidate` is exactly what the facts, the
/// strict rules and the defaults justified by `candidate` produce.
pub fn is_extension(
    facts: &[Literal],
    strict: &[GroundRule],
    defaults: &[GroundDefault],
    candidate: &BTreeSet<Literal>,
) -> bool {
    if !consistent(candidate) {
        return false;
    }
    let index = RuleIndex::new(strict);
    let order = scan_order(defaults);
    match reconstruct(&index, facts, defaults, &order, candidate) {
        Some((c, _)) => c.set.len() == candidate.len() && candidate.iter().all(|l| c.contains(l)),
        None => false,
    }
}

fn finish(
    index: &RuleIndex<'_>,
    facts: &[Literal],
    defaults: &[GroundDefault],
    order: &[usize],
    literals: BTreeSet<Literal>,
) -> Option<Extension> {
    let (c, applied) = reconstruct(index, facts, defaults, order, &literals)?;
    if c.set.len() != literals.len() {
        return None;
    }
    Some(Extension { literals, applied, trace: c.trace })
}

/// Deterministic extension: close, apply the first applicable default in
/// scan order, repeat. The result is checked with [`is_extension`]; if the
/// greedy pass fails (possible with semi-normal defaults) the first
/// extension found by [`enumerate_extensions`] is returned instead.
///
/// `Ok(None)` means the theory has no extension.
pub fn compute_extension(
    facts: &[Literal],
    strict: &[GroundRule],
    defaults: &[GroundDefault],
) -> Result<Option<Extension>, EngineError> {
    compute_extension_seeded(facts, strict, defaults, &[], DEFAULT_ENUMERATION_CAP)
}

/// [`compute_extension`] that first re-applies the defaults named in `seed`
/// (in order, when still applicable) before scanning.
pub fn compute_extension_seeded(
    facts: &[Literal],
    strict: &[GroundRule],
    defaults: &[GroundDefault],
    seed: &[String],
    cap: usize,
) -> Result<Option<Extension>, EngineError> {
    let index = RuleIndex::new(strict);
    let mut c = Closure::new(&index, facts).map_err(EngineError::Inconsistent)?;
    let order = scan_order(defaults);
    let mut used = vec![false; defaults.len()];
    let mut applied = Vec::new();

    let mut ok = true;
    for i in seed.iter().filter_map(|s| defaults.iter().position(|d| &d.instance == s)) {
        if used[i] || !applicable(&defaults[i], &c.set) {
            continue;
        }
        used[i] = true;
        applied.push(defaults[i].instance.clone());
        if c.add(&defaults[i].consequent, &derivation(&defaults[i])).is_err() {
            ok = false;
            break;
        }
    }
    while ok {
        let Some(i) = order.iter().copied().find(|&i| !used[i] && applicable(&defaults[i], &c.set)) else { break };
        used[i] = true;
        applied.push(defaults[i].instance.clone());
        if c.add(&defaults[i].consequent, &derivation(&defaults[i])).is_err() {
            ok = false;
        }
    }

    if ok {
        let literals = c.sorted();
        if is_extension(facts, strict, defaults, &literals) {
            return Ok(Some(Extension { literals, applied, trace: c.trace }));
        }
    }
    let found = enumerate_extensions(facts, strict, defaults, 1, cap)?;
    Ok(found.extensions.into_iter().next())
}

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub extensions: Vec<Extension>,
    /// More extensions exist than the requested limit.
    pub truncated: bool,
}

/// Every extension of the theory (up to `limit`), each distinct literal set
/// reported once.
///
/// The search walks the tree of default application sequences: a node is the
/// set of defaults applied so far, a child applies one more default that is
/// applicable to the node's closure, and a node fails as soon as its closure
/// contradicts a justification of an applied default. Closed nodes that never
/// failed are extensions. Only defaults whose prerequisites are reachable at
/// all count toward `cap`.
pub fn enumerate_extensions(
    facts: &[Literal],
    strict: &[GroundRule],
    defaults: &[GroundDefault],
    limit: usize,
    cap: usize,
) -> Result<Enumeration, EngineError> {
    let index = RuleIndex::new(strict);
    let root = Closure::new(&index, facts).map_err(EngineError::Inconsistent)?;

    let relevant = reachable_defaults(&index, facts, defaults);
    if relevant.len() > cap {
        return Err(EngineError::EnumerationCap { relevant: relevant.len(), cap });
    }

    let mut search = Search {
        defaults,
        relevant: &relevant,
        seen: HashSet::new(),
        found: Vec::new(),
        sets: HashSet::new(),
        limit,
        truncated: false,
    };
    search.visit(Node { closure: root, applied: Vec::new(), mask: vec![false; relevant.len()] });

    let order = scan_order(defaults);
    let extensions = search
        .found
        .into_iter()
        .filter_map(|(set, applied)| {
            let ext = finish(&index, facts, defaults, &order, set)?;
            Some(Extension { applied, ..ext })
        })
        .collect();
    Ok(Enumeration { extensions, truncated: search.truncated })
}

/// Defaults whose prerequisites fall inside the over-approximation obtained
/// by applying every default regardless of its justification. In scan order.
fn reachable_defaults(index: &RuleIndex<'_>, facts: &[Literal], defaults: &[GroundDefault]) -> Vec<usize> {
    let mut c = Closure::tolerant(index, facts);
    let order = scan_order(defaults);
    let mut fired = vec![false; defaults.len()];
    loop {
        let mut changed = false;
        for &i in &order {
            if !fired[i] && defaults[i].prerequisite.iter().all(|p| c.contains(p)) {
                fired[i] = true;
                changed = true;
                let _ = c.add(&defaults[i].consequent, &derivation(&defaults[i]));
            }
        }
        if !changed {
            break;
        }
    }
    order.into_iter().filter(|&i| fired[i]).collect()
}

struct Node<'i, 'r> {
    closure: Closure<'i, 'r>,
    applied: Vec<String>,
    mask: Vec<bool>,
}

struct Search<'a> {
    defaults: &'a [GroundDefault],
    relevant: &'a [usize],
    seen: HashSet<Vec<bool>>,
    found: Vec<(BTreeSet<Literal>, Vec<String>)>,
    sets: HashSet<BTreeSet<Literal>>,
    limit: usize,
    truncated: bool,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.truncated
    }

    fn failed(&self, node: &Node<'_, '_>) -> bool {
        self.relevant
            .iter()
            .zip(&node.mask)
            .filter(|(_, &on)| on)
            .any(|(&i, _)| self.defaults[i].justification.iter().any(|j| node.closure.contains(&j.complement())))
    }

    fn visit(&mut self, node: Node<'_, '_>) {
        if self.done() || !self.seen.insert(node.mask.clone()) || self.failed(&node) {
            return;
        }
        let children: Vec<usize> = (0..self.relevant.len())
            .filter(|&k| !node.mask[k] && applicable(&self.defaults[self.relevant[k]], &node.closure.set))
            .collect();
        if children.is_empty() {
            let set = node.closure.sorted();
            if self.sets.insert(set.clone()) {
                if self.found.len() == self.limit {
                    self.truncated = true;
                } else {
                    self.found.push((set, node.applied));
                }
            }
            return;
        }
        for k in children {
            if self.done() {
                return;
            }
            let d = &self.defaults[self.relevant[k]];
            let mut mask = node.mask.clone();
            mask[k] = true;
            if self.seen.contains(&mask) {
                continue;
            }
            let mut closure = node.closure.clone();
            if closure.add(&d.consequent, &derivation(d)).is_err() {
                self.seen.insert(mask);
                continue;
            }
            let mut applied = node.applied.clone();
            applied.push(d.instance.clone());
            self.visit(Node { closure, applied, mask });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Atom, Modality, Term, TimeExpr};

    fn lit(p: &str) -> Literal {
        Literal::pos(Atom::new(Modality::Holds, Term::constant(p), Term::constant("x"), TimeExpr::Lit(0)))
    }

    fn set(ls: &[Literal]) -> BTreeSet<Literal> {
        ls.iter().cloned().collect()
    }

    #[test]
    fn closure_without_defaults_is_the_extension() {
        let strict = vec![GroundRule::new("r", 1, vec![lit("a")], vec![lit("b")])];
        assert!(is_extension(&[lit("a")], &strict, &[], &set(&[lit("a"), lit("b")])));
        let ext = compute_extension(&[lit("a")], &strict, &[]).unwrap().unwrap();
        assert_eq!(ext.literals, set(&[lit("a"), lit("b")]));
        let all = enumerate_extensions(&[lit("a")], &strict, &[], 8, 20).unwrap();
        assert_eq!(all.extensions.len(), 1);
    }

    #[test]
    fn unapplied_default_is_not_an_extension() {
        let d = GroundDefault::new("d", 1, vec![lit("a")], vec![lit("p")], vec![]);
        assert!(!is_extension(&[lit("a")], &[], &[d], &set(&[lit("a")])));
    }

    #[test]
    fn justification_contradicted_by_final_set() {
        let d = GroundDefault::new("d", 1, vec![lit("a")], vec![lit("p")], vec![lit("q").complement()]);
        let strict = vec![GroundRule::new("r", 1, vec![lit("p")], vec![lit("q")])];
        let facts = [lit("a")];
        assert!(!is_extension(&facts, &strict, std::slice::from_ref(&d), &set(&[lit("a"), lit("p"), lit("q")])));
        // no extension at all: applying d defeats it, not applying it leaves it applicable
        assert!(!is_extension(&facts, &strict, std::slice::from_ref(&d), &set(&[lit("a")])));
        assert!(compute_extension(&facts, &strict, std::slice::from_ref(&d)).unwrap().is_none());
        assert!(enumerate_extensions(&facts, &strict, &[d], 8, 20).unwrap().extensions.is_empty());
    }

    #[test]
    fn two_conflicting_defaults() {
        let d1 = GroundDefault::new("d1", 1, vec![lit("a")], vec![lit("p")], vec![]);
        let d2 = GroundDefault::new("d2", 1, vec![lit("a")], vec![lit("p").complement()], vec![]);
        let ds = [d1, d2];
        let ext = compute_extension(&[lit("a")], &[], &ds).unwrap().unwrap();
        assert_eq!(ext.literals, set(&[lit("a"), lit("p")]));
        assert_eq!(ext.applied, vec!["d1".to_string()]);
        let all = enumerate_extensions(&[lit("a")], &[], &ds, 8, 20).unwrap();
        assert_eq!(all.extensions.len(), 2);
        assert!(!all.truncated);
        let one = enumerate_extensions(&[lit("a")], &[], &ds, 1, 20).unwrap();
        assert_eq!(one.extensions.len(), 1);
        assert!(one.truncated);
    }

    #[test]
    fn applicability() {
        let d = GroundDefault::new("d", 1, vec![lit("a"), lit("b")], vec![lit("m")], vec![lit("c")]);
        assert!(applicable(&d, &set(&[lit("a"), lit("b")])));
        assert!(!applicable(&d, &set(&[lit("a"), lit("b"), lit("c").complement()])));
        assert!(!applicable(&d, &set(&[lit("a")])));
    }

    #[test]
    fn inconsistent_facts_are_an_error() {
        let err = compute_extension(&[lit("a"), lit("a").complement()], &[], &[]).unwrap_err();
        assert!(matches!(err, EngineError::Inconsistent(_)));
    }

    #[test]
    fn enumeration_cap() {
        let ds: Vec<_> = (0..5)
            .map(|i| GroundDefault::new(&format!("d{i}"), 1, vec![lit("a")], vec![lit(&format!("p{i}"))], vec![]))
            .collect();
        let err = enumerate_extensions(&[lit("a")], &[], &ds, 8, 4).unwrap_err();
        assert!(matches!(err, EngineError::EnumerationCap { relevant: 5, cap: 4 }));
        // unreachable defaults do not count
        let ds: Vec<_> = (0..5)
            .map(|i| GroundDefault::new(&format!("d{i}"), 1, vec![lit("z")], vec![lit(&format!("p{i}"))], vec![]))
            .collect();
        assert_eq!(enumerate_extensions(&[lit("a")], &[], &ds, 8, 4).unwrap().extensions.len(), 1);
    }

    #[test]
    fn greedy_failure_falls_back_to_search() {
        // d1: a : p [r], d2: a : -r. Greedy applies d1 then d2, whose
        // consequent contradicts d1's constraint; the only extension is {a, -r}.
        let d1 = GroundDefault::new("d1", 1, vec![lit("a")], vec![lit("p")], vec![lit("r")]);
        let d2 = GroundDefault::new("d2", 1, vec![lit("a")], vec![lit("r").complement()], vec![]);
        let ds = [d1, d2];
        let ext = compute_extension(&[lit("a")], &[], &ds).unwrap().unwrap();
        assert!(is_extension(&[lit("a")], &[], &ds, &ext.literals));
        assert_eq!(ext.literals, set(&[lit("a"), lit("r").complement()]));
    }
}
