//! Term and literal algebra for the reified norm language.
//!
//! Every assertion is a literal over a pseudo-modal predicate (`holds`,
//! `must`, `able`, ...) whose first argument is a *property*: a reified
//! predicate constant, optionally negated (`not_p`) or combined with an extra
//! agent argument. Canonical literals are always ternary
//! `(property, subject, time)`; four-place surface forms are folded into the
//! property slot with [`Term::Combine`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Interned identifier. Cheap to clone and totally ordered.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Identifiers starting with an uppercase letter are variables in rule files.
    pub fn is_capitalized(&self) -> bool {
        self.0.chars().next().is_some_and(|c| c.is_ascii_uppercase())
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Surface prefix of a negated property constant.
pub const NOT_PREFIX: &str = "not_";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Symbol),
    Var(Symbol),
    /// Reified negation `not_p` of a property.
    Not(Box<Term>),
    /// A predicate constant folded together with its extra agent argument.
    Combine(Symbol, Box<Term>),
}

impl Term {
    pub fn constant(s: &str) -> Self {
        Term::Const(Symbol::new(s))
    }

    pub fn var(s: &str) -> Self {
        Term::Var(Symbol::new(s))
    }

    pub fn negated(inner: Term) -> Self {
        Term::Not(Box::new(inner))
    }

    pub fn combine(pred: &str, extra: Term) -> Self {
        Term::Combine(Symbol::new(pred), Box::new(extra))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::Not(t) => t.is_ground(),
            Term::Combine(_, t) => t.is_ground(),
        }
    }

    /// Collapses `not_not_x` to `x` at every level.
    pub fn collapse_negations(&self) -> Term {
        match self {
            Term::Not(inner) => match inner.collapse_negations() {
                Term::Not(x) => *x,
                other => Term::Not(Box::new(other)),
            },
            Term::Combine(p, extra) => Term::Combine(p.clone(), Box::new(extra.collapse_negations())),
            other => other.clone(),
        }
    }

    /// The predicate constant underneath negation and combination, if any.
    pub fn base_predicate(&self) -> Option<&Symbol> {
        match self {
            Term::Const(s) => Some(s),
            Term::Var(_) => None,
            Term::Not(t) => t.base_predicate(),
            Term::Combine(p, _) => Some(p),
        }
    }

    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a Symbol, VarRole)) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => f(v, VarRole::Property),
            Term::Not(t) => t.visit_vars(f),
            Term::Combine(_, extra) => extra.visit_individual(f),
        }
    }

    fn visit_individual<'a>(&'a self, f: &mut impl FnMut(&'a Symbol, VarRole)) {
        match self {
            Term::Var(v) => f(v, VarRole::Individual),
            other => other.visit_vars(f),
        }
    }

    pub fn substitute(&self, b: &Binding) -> Term {
        match self {
            Term::Var(v) => match b.get(v) {
                Some(Value::Const(c)) => Term::Const(c.clone()),
                _ => self.clone(),
            },
            Term::Const(_) => self.clone(),
            Term::Not(t) => Term::Not(Box::new(t.substitute(b))),
            Term::Combine(p, t) => Term::Combine(p.clone(), Box::new(t.substitute(b))),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) | Term::Var(s) => write!(f, "{s}"),
            Term::Not(t) => write!(f, "{NOT_PREFIX}{t}"),
            Term::Combine(p, t) => write!(f, "combine({p}, {t})"),
        }
    }
}

/// Position a variable occupies, used to pick its grounding domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarRole {
    Property,
    Individual,
    Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeExpr {
    Lit(i64),
    /// `T`, `T+1` or `T-1`.
    Var(Symbol, i8),
}

impl TimeExpr {
    pub fn value(&self) -> Option<i64> {
        match self {
            TimeExpr::Lit(t) => Some(*t),
            TimeExpr::Var(..) => None,
        }
    }

    pub fn substitute(&self, b: &Binding) -> TimeExpr {
        match self {
            TimeExpr::Var(v, off) => match b.get(v) {
                Some(Value::Int(t)) => TimeExpr::Lit(t + i64::from(*off)),
                _ => self.clone(),
            },
            lit => lit.clone(),
        }
    }
}

impl fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeExpr::Lit(t) => write!(f, "{t}"),
            TimeExpr::Var(v, 0) => write!(f, "{v}"),
            TimeExpr::Var(v, off) if *off > 0 => write!(f, "{v}+{off}"),
            TimeExpr::Var(v, off) => write!(f, "{v}{off}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    Holds,
    MustDo,
    AbleToDo,
    Normally,
    AbnormalPerturbation,
    Static,
    BasicAnomaly,
}

impl Modality {
    pub const ALL: [Modality; 7] = [
        Modality::Holds,
        Modality::MustDo,
        Modality::AbleToDo,
        Modality::Normally,
        Modality::AbnormalPerturbation,
        Modality::Static,
        Modality::BasicAnomaly,
    ];

    /// Keyword used by the rule language.
    pub fn keyword(self) -> &'static str {
        match self {
            Modality::Holds => "holds",
            Modality::MustDo => "must",
            Modality::AbleToDo => "able",
            Modality::Normally => "normally",
            Modality::AbnormalPerturbation => "perturb",
            Modality::Static => "static",
            Modality::BasicAnomaly => "b_an",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<Modality> {
        Modality::ALL.into_iter().find(|m| m.keyword() == kw)
    }

    /// Modalities whose property must be a declared predicate.
    pub fn takes_predicate(self) -> bool {
        matches!(self, Modality::Holds | Modality::MustDo | Modality::AbleToDo | Modality::Normally | Modality::Static)
    }
}

/// A reified pseudo-modal assertion.
///
/// `Static` atoms carry only a property; every other modality carries a
/// subject and a time. On `BasicAnomaly` atoms the triple is the witness of
/// the anomaly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub modality: Modality,
    pub property: Term,
    pub subject: Option<Term>,
    pub time: Option<TimeExpr>,
}

impl Atom {
    pub fn new(modality: Modality, property: Term, subject: Term, time: TimeExpr) -> Self {
        debug_assert!(modality != Modality::Static);
        Atom { modality, property, subject: Some(subject), time: Some(time) }
    }

    pub fn static_(property: Term) -> Self {
        Atom { modality: Modality::Static, property, subject: None, time: None }
    }

    pub fn is_ground(&self) -> bool {
        self.property.is_ground()
            && self.subject.as_ref().is_none_or(Term::is_ground)
            && self.time.as_ref().is_none_or(|t| t.value().is_some())
    }

    pub fn substitute(&self, b: &Binding) -> Atom {
        Atom {
            modality: self.modality,
            property: self.property.substitute(b),
            subject: self.subject.as_ref().map(|s| s.substitute(b)),
            time: self.time.as_ref().map(|t| t.substitute(b)),
        }
    }

    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a Symbol, VarRole)) {
        self.property.visit_vars(f);
        if let Some(s) = &self.subject {
            s.visit_individual(f);
        }
        if let Some(TimeExpr::Var(v, _)) = &self.time {
            f(v, VarRole::Time);
        }
    }

    /// Back to the surface shape: `(property, agent arguments, time)`.
    pub fn unfold(&self) -> (Term, Vec<Term>, Option<TimeExpr>) {
        let (property, extra) = split_combine(&self.property);
        let mut agents: Vec<Term> = self.subject.iter().cloned().collect();
        agents.extend(extra);
        (property, agents, self.time.clone())
    }
}

fn split_combine(t: &Term) -> (Term, Option<Term>) {
    match t {
        Term::Combine(p, extra) => (Term::Const(p.clone()), Some((**extra).clone())),
        Term::Not(inner) => {
            let (p, extra) = split_combine(inner);
            (Term::Not(Box::new(p)), extra)
        }
        other => (other.clone(), None),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (property, agents, time) = self.unfold();
        write!(f, "{}({property}", self.modality.keyword())?;
        for a in &agents {
            write!(f, ", {a}")?;
        }
        if let Some(t) = time {
            write!(f, ", {t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub sign: Sign,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, sign: Sign::Pos }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, sign: Sign::Neg }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    /// The literal with the opposite sign. Only meaningful on canonical literals.
    pub fn complement(&self) -> Literal {
        Literal { atom: self.atom.clone(), sign: self.sign.flip() }
    }

    pub fn substitute(&self, b: &Binding) -> Literal {
        Literal { atom: self.atom.substitute(b), sign: self.sign }
    }

    pub fn time(&self) -> Option<i64> {
        self.atom.time.as_ref().and_then(TimeExpr::value)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Neg {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Canonical form of a literal.
///
/// Double property negation is collapsed everywhere. On `holds` atoms a
/// remaining `not_p` is traded for the literal's sign, so that
/// `holds(not_p, ..)` and `-holds(p, ..)` become the same literal.
pub fn canonicalize(l: &Literal) -> Literal {
    let mut property = l.atom.property.collapse_negations();
    let mut sign = l.sign;
    if l.atom.modality == Modality::Holds {
        if let Term::Not(inner) = property {
            property = *inner;
            sign = sign.flip();
        }
    }
    Literal { atom: Atom { property, ..l.atom.clone() }, sign }
}

/// True iff the two literals assert and deny the same atom.
pub fn complements(a: &Literal, b: &Literal) -> bool {
    let (a, b) = (canonicalize(a), canonicalize(b));
    a.atom == b.atom && a.sign != b.sign
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("`{name}` expects {expected} agent argument(s), got {found}")]
    ArityMismatch { name: Symbol, expected: usize, found: usize },
    #[error("predicate `{0}` is not declared")]
    Undeclared(Symbol),
    #[error("a variable property cannot take {0} agent arguments")]
    VariableWithExtraArgs(usize),
    #[error("{0} agent arguments is not a valid surface form")]
    BadArgCount(usize),
    #[error("`static` takes a single property argument")]
    StaticWithArgs,
}

/// Folds a surface form into a canonical ternary atom without consulting any
/// registry. One agent argument is kept as is; with two, the second is
/// combined into the property and the first stays the subject.
pub fn fold_surface(
    modality: Modality,
    property: Term,
    agents: Vec<Term>,
    time: Option<TimeExpr>,
) -> Result<Atom, FoldError> {
    if modality == Modality::Static {
        if !agents.is_empty() || time.is_some() {
            return Err(FoldError::StaticWithArgs);
        }
        return Ok(Atom::static_(property));
    }
    let time = time.ok_or(FoldError::BadArgCount(agents.len()))?;
    let mut agents = agents.into_iter();
    match (agents.next(), agents.next(), agents.next()) {
        (Some(subject), None, None) => Ok(Atom::new(modality, property, subject, time)),
        (Some(subject), Some(extra), None) => {
            let property = combine_under_negation(property, extra)?;
            Ok(Atom::new(modality, property, subject, time))
        }
        (first, second, third) => {
            let n = [first, second, third].iter().flatten().count() + agents.count();
            Err(FoldError::BadArgCount(n))
        }
    }
}

fn combine_under_negation(property: Term, extra: Term) -> Result<Term, FoldError> {
    match property {
        Term::Const(p) => Ok(Term::Combine(p, Box::new(extra))),
        Term::Not(inner) => Ok(Term::Not(Box::new(combine_under_negation(*inner, extra)?))),
        Term::Var(_) => Err(FoldError::VariableWithExtraArgs(2)),
        Term::Combine(..) => Err(FoldError::BadArgCount(3)),
    }
}

/// Registry-checked folding: the number of agent arguments must match the
/// declared surface arity of the property's predicate.
pub fn fold_arity(
    registry: &PredicateRegistry,
    modality: Modality,
    property: Term,
    agents: Vec<Term>,
    time: Option<TimeExpr>,
) -> Result<Atom, FoldError> {
    if let Some(name) = property.base_predicate() {
        match registry.get(name) {
            Some(sym) => {
                if modality != Modality::Static && usize::from(sym.surface_arity) != agents.len() {
                    return Err(FoldError::ArityMismatch {
                        name: name.clone(),
                        expected: sym.surface_arity.into(),
                        found: agents.len(),
                    });
                }
            }
            None if modality.takes_predicate() => return Err(FoldError::Undeclared(name.clone())),
            None => {}
        }
    }
    fold_surface(modality, property, agents, time)
}

/// Grounding value of a variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Const(Symbol),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(s) => write!(f, "{s}"),
            Value::Int(t) => write!(f, "{t}"),
        }
    }
}

pub type Binding = BTreeMap<Symbol, Value>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PredicateFlags {
    pub is_static: bool,
    pub backward_persistent: bool,
    pub unforeseeable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSymbol {
    pub name: Symbol,
    /// Agent arguments before the time argument: 1 or 2.
    pub surface_arity: u8,
    pub layer: u8,
    pub flags: PredicateFlags,
}

impl PredicateSymbol {
    pub fn is_kernel(&self) -> bool {
        self.layer == 1
    }
}

/// Declared predicates, kept in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateRegistry {
    symbols: Vec<PredicateSymbol>,
    index: BTreeMap<Symbol, usize>,
}

impl PredicateRegistry {
    /// Returns false (and leaves the registry unchanged) on a duplicate name.
    pub fn insert(&mut self, sym: PredicateSymbol) -> bool {
        if self.index.contains_key(&sym.name) {
            return false;
        }
        self.index.insert(sym.name.clone(), self.symbols.len());
        self.symbols.push(sym);
        true
    }

    pub fn get(&self, name: &Symbol) -> Option<&PredicateSymbol> {
        self.index.get(name).map(|&i| &self.symbols[i])
    }

    pub fn contains(&self, name: &Symbol) -> bool {
        self.index.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PredicateSymbol> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Layer of the predicate a literal talks about. Anomalies and properties
    /// that are not declared predicates (factor names) belong to the kernel.
    pub fn literal_layer(&self, l: &Literal) -> u8 {
        if l.atom.modality == Modality::BasicAnomaly {
            return 1;
        }
        l.atom.property.base_predicate().and_then(|p| self.get(p)).map_or(1, |p| p.layer)
    }
}
