//! Forward-chaining closure under ground strict rules, with derivation trace.
//!
//! Each rule keeps a count of body literals not yet derived; a literal's
//! arrival decrements the counters of the rules watching it and a rule fires
//! when its counter reaches zero. Total work is linear in the size of the
//! ground program.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use super::ground::GroundRule;
use crate::logic::{Literal, Symbol};

/// Two complementary literals derived together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub first: Literal,
    pub second: Literal,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` contradicts `{}`", self.second, self.first)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Given,
    Rule(Symbol),
    Default { id: Symbol, instance: String },
}

impl Source {
    /// Rule or default id, or `given`.
    pub fn id(&self) -> &str {
        match self {
            Source::Given => "given",
            Source::Rule(id) | Source::Default { id, .. } => id.as_str(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub source: Source,
    pub premises: Vec<Literal>,
}

impl Derivation {
    pub fn given() -> Self {
        Derivation { source: Source::Given, premises: Vec::new() }
    }
}

/// First derivation of every literal. Premises always precede their
/// conclusion, so the trace is acyclic.
pub type Trace = BTreeMap<Literal, Derivation>;

/// Watch lists over a fixed rule slice.
#[derive(Debug)]
pub(crate) struct RuleIndex<'r> {
    rules: &'r [GroundRule],
    watch: HashMap<&'r Literal, Vec<usize>>,
    body_len: Vec<usize>,
}

impl<'r> RuleIndex<'r> {
    pub(crate) fn new(rules: &'r [GroundRule]) -> Self {
        let mut watch: HashMap<&Literal, Vec<usize>> = HashMap::new();
        let mut body_len = Vec::with_capacity(rules.len());
        for (i, r) in rules.iter().enumerate() {
            let unique: BTreeSet<&Literal> = r.body.iter().collect();
            body_len.push(unique.len());
            for l in unique {
                watch.entry(l).or_default().push(i);
            }
        }
        RuleIndex { rules, watch, body_len }
    }
}

/// A literal set closed under the indexed rules.
#[derive(Clone, Debug)]
pub(crate) struct Closure<'i, 'r> {
    index: &'i RuleIndex<'r>,
    missing: Vec<usize>,
    pub(crate) set: HashSet<Literal>,
    pub(crate) trace: Trace,
    /// Whether complementary literals are an error.
    check: bool,
}

impl<'i, 'r> Closure<'i, 'r> {
    /// Closes `facts` under the rules; conflicts are errors.
    pub(crate) fn new(index: &'i RuleIndex<'r>, facts: &[Literal]) -> Result<Self, Conflict> {
        Self::build(index, facts, true)
    }

    /// Like [`Closure::new`] but tolerates complementary literals; used for
    /// over-approximating what could ever be derived.
    pub(crate) fn tolerant(index: &'i RuleIndex<'r>, facts: &[Literal]) -> Self {
        Self::build(index, facts, false).expect("tolerant closure never conflicts")
    }

    fn build(index: &'i RuleIndex<'r>, facts: &[Literal], check: bool) -> Result<Self, Conflict> {
        let mut c = Closure { index, missing: index.body_len.clone(), set: HashSet::new(), trace: Trace::new(), check };
        let mut queue: Vec<(Literal, Derivation)> = facts.iter().map(|f| (f.clone(), Derivation::given())).collect();
        for (i, r) in index.rules.iter().enumerate() {
            if index.body_len[i] == 0 {
                queue.extend(
                    r.head
                        .iter()
                        .map(|h| (h.clone(), Derivation { source: Source::Rule(r.id.clone()), premises: Vec::new() })),
                );
            }
        }
        c.run(queue)?;
        Ok(c)
    }

    pub(crate) fn contains(&self, l: &Literal) -> bool {
        self.set.contains(l)
    }

    /// Adds literals with a shared derivation and propagates.
    pub(crate) fn add(&mut self, lits: &[Literal], why: &Derivation) -> Result<(), Conflict> {
        self.run(lits.iter().map(|l| (l.clone(), why.clone())).collect())
    }

    fn run(&mut self, queue: Vec<(Literal, Derivation)>) -> Result<(), Conflict> {
        let mut queue: VecDeque<(Literal, Derivation)> = queue.into();
        while let Some((lit, why)) = queue.pop_front() {
            if self.set.contains(&lit) {
                continue;
            }
            if self.check {
                let comp = lit.complement();
                if self.set.contains(&comp) {
                    return Err(Conflict { first: comp, second: lit });
                }
            }
            if let Some(rules) = self.index.watch.get(&lit) {
                for &ri in rules {
                    self.missing[ri] -= 1;
                    if self.missing[ri] == 0 {
                        let r = &self.index.rules[ri];
                        let why = Derivation { source: Source::Rule(r.id.clone()), premises: r.body.clone() };
                        queue.extend(r.head.iter().map(|h| (h.clone(), why.clone())));
                    }
                }
            }
            self.trace.entry(lit.clone()).or_insert(why);
            self.set.insert(lit);
        }
        Ok(())
    }

    pub(crate) fn sorted(&self) -> BTreeSet<Literal> {
        self.set.iter().cloned().collect()
    }
}

/// Least set containing `facts` and closed under `rules`.
///
/// Fails with the first complementary pair encountered.
pub fn strict_closure(facts: &[Literal], rules: &[GroundRule]) -> Result<BTreeSet<Literal>, Conflict> {
    let index = RuleIndex::new(rules);
    Closure::new(&index, facts).map(|c| c.sorted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Atom, Modality, Term, TimeExpr};

    fn h(p: &str, t: i64) -> Literal {
        Literal::pos(Atom::new(Modality::Holds, Term::constant(p), Term::constant("B"), TimeExpr::Lit(t)))
    }

    #[test]
    fn crash_rule_fires() {
        let crash = Literal::pos(Atom::new(
            Modality::Holds,
            Term::combine("crash", Term::constant("B")),
            Term::constant("A"),
            TimeExpr::Lit(2),
        ));
        let rules = vec![GroundRule::new("R1", 2, vec![crash.clone()], vec![h("stops", 2).complement()])];
        let out = strict_closure(&[crash], &rules).unwrap();
        assert!(out.contains(&h("stops", 2).complement()));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn empty_facts_stay_empty() {
        let rules = vec![GroundRule::new("r", 1, vec![h("a", 0)], vec![h("b", 0)])];
        assert!(strict_closure(&[], &rules).unwrap().is_empty());
    }

    #[test]
    fn complementary_facts_conflict() {
        let err = strict_closure(&[h("stops", 2), h("stops", 2).complement()], &[]).unwrap_err();
        assert_eq!(err.first, h("stops", 2));
        assert_eq!(err.second, h("stops", 2).complement());
    }

    #[test]
    fn chains_and_records_trace() {
        let rules = vec![
            GroundRule::new("r1", 1, vec![h("a", 0)], vec![h("b", 0)]),
            GroundRule::new("r2", 1, vec![h("b", 0), h("a", 0)], vec![h("c", 0), h("d", 0)]),
        ];
        let index = RuleIndex::new(&rules);
        let c = Closure::new(&index, &[h("a", 0)]).unwrap();
        assert_eq!(c.set.len(), 4);
        assert_eq!(c.trace[&h("a", 0)].source, Source::Given);
        assert_eq!(c.trace[&h("d", 0)].source.id(), "r2");
        assert_eq!(c.trace[&h("b", 0)].premises, vec![h("a", 0)]);
    }
}
