//! Helpers shared by the integration tests, including a brute-force
//! extension oracle that shares no code with the engine.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use norman::engine::{GroundDefault, GroundRule};
use norman::logic::{Atom, Literal, Modality, Term, TimeExpr};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_norman"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")))
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

pub fn lit(p: &str) -> Literal {
    Literal::pos(Atom::new(Modality::Holds, Term::constant(p), Term::constant("x"), TimeExpr::Lit(0)))
}

/// A small ground theory over `holds(aN, x, 0)` literals.
#[derive(Clone, Debug)]
pub struct Theory {
    pub facts: Vec<Literal>,
    pub strict: Vec<GroundRule>,
    pub defaults: Vec<GroundDefault>,
}

fn random_literal(rng: &mut impl Rng, atoms: usize) -> Literal {
    let l = lit(&format!("a{}", rng.gen_range(0..atoms)));
    if rng.gen_bool(0.3) {
        l.complement()
    } else {
        l
    }
}

fn random_literals(rng: &mut impl Rng, atoms: usize, max: usize) -> Vec<Literal> {
    let n = rng.gen_range(0..=max);
    let mut v: Vec<Literal> = (0..n).map(|_| random_literal(rng, atoms)).collect();
    v.sort();
    v.dedup();
    v
}

/// At most 10 atoms, 6 strict rules and 6 defaults. With `normal_only` no
/// default carries an extra justification.
pub fn random_theory(rng: &mut impl Rng, normal_only: bool) -> Theory {
    let atoms = rng.gen_range(2..=10);
    let facts = random_literals(rng, atoms, 3);
    let strict = (0..rng.gen_range(0..=6))
        .map(|i| {
            let body = random_literals(rng, atoms, 2);
            GroundRule::new(&format!("r{i}"), 1, body, vec![random_literal(rng, atoms)])
        })
        .collect();
    let defaults = (0..rng.gen_range(0..=6))
        .map(|i| {
            let pre = random_literals(rng, atoms, 2);
            let mut cons = vec![random_literal(rng, atoms)];
            if rng.gen_bool(0.2) {
                cons.push(random_literal(rng, atoms));
                cons.sort();
                cons.dedup();
            }
            let constraint =
                if normal_only || rng.gen_bool(0.5) { Vec::new() } else { vec![random_literal(rng, atoms)] };
            GroundDefault::new(&format!("d{i}"), 1, pre, cons, constraint)
        })
        .collect();
    Theory { facts, strict, defaults }
}

/// The same theory with defaults renamed in a random order, which changes
/// the engine's scan order.
pub fn shuffle_ids(rng: &mut impl Rng, t: &Theory) -> Theory {
    let mut ids: Vec<usize> = (0..t.defaults.len()).collect();
    ids.shuffle(rng);
    let defaults = t
        .defaults
        .iter()
        .zip(ids)
        .map(|(d, k)| {
            let constraint: Vec<Literal> =
                d.justification.iter().filter(|j| !d.consequent.contains(j)).cloned().collect();
            GroundDefault::new(&format!("e{k}"), d.layer, d.prerequisite.clone(), d.consequent.clone(), constraint)
        })
        .collect();
    Theory { defaults, ..t.clone() }
}

/// Naive fixpoint of `base` under rules `(body, head)`.
fn naive_closure(base: &BTreeSet<Literal>, rules: &[(Vec<Literal>, Vec<Literal>)]) -> BTreeSet<Literal> {
    let mut set = base.clone();
    loop {
        let before = set.len();
        for (body, head) in rules {
            if body.iter().all(|b| set.contains(b)) {
                set.extend(head.iter().cloned());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

fn is_consistent(set: &BTreeSet<Literal>) -> bool {
    set.iter().all(|l| !set.contains(&l.complement()))
}

fn strict_pairs(t: &Theory) -> Vec<(Vec<Literal>, Vec<Literal>)> {
    t.strict.iter().map(|r| (r.body.clone(), r.head.clone())).collect()
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleResult {
    /// Facts and strict rules alone are contradictory.
    Inconsistent,
    Extensions(BTreeSet<BTreeSet<Literal>>),
}

/// Every extension, by trying each subset of defaults as the generating set:
/// the candidate is the closure of the facts plus the subset's consequents,
/// and it is kept when it is consistent and equals the least set closed
/// under the strict rules and the defaults it does not refute.
pub fn oracle(t: &Theory) -> OracleResult {
    let strict = strict_pairs(t);
    let facts: BTreeSet<Literal> = t.facts.iter().cloned().collect();
    if !is_consistent(&naive_closure(&facts, &strict)) {
        return OracleResult::Inconsistent;
    }
    let n = t.defaults.len();
    let mut found = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let mut base = facts.clone();
        for (i, d) in t.defaults.iter().enumerate() {
            if mask & (1 << i) != 0 {
                base.extend(d.consequent.iter().cloned());
            }
        }
        let candidate = naive_closure(&base, &strict);
        if !is_consistent(&candidate) {
            continue;
        }
        // defaults not refuted by the candidate act as plain rules
        let mut rules = strict.clone();
        for d in &t.defaults {
            if d.justification.iter().all(|j| !candidate.contains(&j.complement())) {
                rules.push((d.prerequisite.clone(), d.consequent.clone()));
            }
        }
        if naive_closure(&facts, &rules) == candidate {
            found.insert(candidate);
        }
    }
    OracleResult::Extensions(found)
}
