//! Invariants of the logic layer and the closure.

use proptest::prelude::*;

use norman::engine::{strict_closure, GroundRule};
use norman::logic::{fold_surface, Atom, Modality, Sign, Term, TimeExpr};
use norman::{canonicalize, complements, Literal};

fn property() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["stops", "control", "runs_slowly", "crash", "bend"]).prop_map(String::from)
}

fn agent() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["A", "B", "C", "D"]).prop_map(String::from)
}

fn holds(p: Term, ag: &str, t: i64) -> Atom {
    Atom::new(Modality::Holds, p, Term::constant(ag), TimeExpr::Lit(t))
}

/// A literal with up to three stacked property negations.
fn any_literal() -> impl Strategy<Value = Literal> {
    let modality = prop::sample::select(Modality::ALL.to_vec()).prop_filter("not static", |m| *m != Modality::Static);
    (modality, property(), agent(), 0i64..5, 0usize..4, any::<bool>()).prop_map(|(m, p, ag, t, nots, neg)| {
        let mut prop = Term::constant(&p);
        if m == Modality::Holds {
            for _ in 0..nots {
                prop = Term::negated(prop);
            }
        }
        let atom = Atom::new(m, prop, Term::constant(&ag), TimeExpr::Lit(t));
        if neg {
            Literal::neg(atom)
        } else {
            Literal::pos(atom)
        }
    })
}

proptest! {
    #[test]
    fn negation_axiom(p in property(), ag in agent(), t in 0i64..10) {
        let plain = Term::constant(&p);
        let negated = Term::negated(Term::constant(&p));
        let forms = [
            Literal::pos(holds(plain.clone(), &ag, t)),
            Literal::neg(holds(negated.clone(), &ag, t)),
            Literal::pos(holds(negated, &ag, t)),
            Literal::neg(holds(plain, &ag, t)),
        ];
        let canon: Vec<Literal> = forms.iter().map(canonicalize).collect();
        prop_assert_eq!(&canon[0], &canon[1]);
        prop_assert_eq!(&canon[2], &canon[3]);
        prop_assert_ne!(&canon[0], &canon[2]);
        prop_assert_eq!(canon[0].complement(), canon[2].clone());
        prop_assert!(complements(&forms[0], &forms[2]));
        prop_assert!(complements(&forms[1], &forms[3]));
        prop_assert!(!complements(&forms[0], &forms[1]));
    }

    #[test]
    fn canonicalize_is_idempotent(l in any_literal()) {
        let once = canonicalize(&l);
        prop_assert_eq!(canonicalize(&once), once.clone());
        // canonical holds literals carry no property negation
        if once.atom.modality == Modality::Holds {
            prop_assert!(!matches!(once.atom.property, Term::Not(_)));
        }
    }

    #[test]
    fn complements_symmetric_and_irreflexive(a in any_literal(), b in any_literal()) {
        prop_assert_eq!(complements(&a, &b), complements(&b, &a));
        prop_assert!(!complements(&a, &a));
        prop_assert!(complements(&a, &a.complement()));
        prop_assert_eq!(a.complement().complement(), a.clone());
    }

    #[test]
    fn sign_flip_involutive(neg in any::<bool>()) {
        let s = if neg { Sign::Neg } else { Sign::Pos };
        prop_assert_eq!(s.flip().flip(), s);
        prop_assert_ne!(s.flip(), s);
    }

    #[test]
    fn fold_unfold_round_trip(p in property(), a in agent(), b in prop::option::of(agent()), t in 0i64..10, m in 0usize..5) {
        let modality = [Modality::Holds, Modality::MustDo, Modality::AbleToDo, Modality::Normally, Modality::AbnormalPerturbation][m];
        let mut agents = vec![Term::constant(&a)];
        agents.extend(b.iter().map(|b| Term::constant(b)));
        let atom = fold_surface(modality, Term::constant(&p), agents.clone(), Some(TimeExpr::Lit(t))).unwrap();
        prop_assert_eq!(atom.subject.clone(), Some(Term::constant(&a)));
        let (prop_back, agents_back, time_back) = atom.unfold();
        prop_assert_eq!(prop_back, Term::constant(&p));
        prop_assert_eq!(agents_back, agents);
        prop_assert_eq!(time_back, Some(TimeExpr::Lit(t)));
    }

    #[test]
    fn closure_is_monotonic(
        facts in prop::collection::vec(0usize..8, 0..5),
        extra in prop::collection::vec(0usize..8, 0..3),
        rules in prop::collection::vec((prop::collection::vec(0usize..8, 0..3), 0usize..8), 0..8),
    ) {
        let l = |i: usize| Literal::pos(holds(Term::constant(&format!("a{i}")), "x", 0));
        let rules: Vec<GroundRule> = rules
            .into_iter()
            .enumerate()
            .map(|(k, (body, head))| GroundRule::new(&format!("r{k}"), 1, body.into_iter().map(l).collect(), vec![l(head)]))
            .collect();
        let small: Vec<Literal> = facts.iter().copied().map(l).collect();
        let large: Vec<Literal> = facts.iter().chain(&extra).copied().map(l).collect();
        let a = strict_closure(&small, &rules).unwrap();
        let b = strict_closure(&large, &rules).unwrap();
        prop_assert!(a.is_subset(&b));
        for f in &small {
            prop_assert!(a.contains(f));
        }
        // closed: re-closing adds nothing
        let again: Vec<Literal> = a.iter().cloned().collect();
        prop_assert_eq!(strict_closure(&again, &rules).unwrap(), a);
    }
}
