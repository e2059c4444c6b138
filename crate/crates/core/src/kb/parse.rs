//! Lexer and two-phase parser for rule bases and scenarios.
//!
//! Phase one reads statements into a raw syntax tree, recovering at the next
//! `.` after a syntax error. Phase two resolves identifiers, folds surface
//! arities and checks the semantic constraints. Both phases report positioned
//! diagnostics; a file is accepted only when there are none.

use std::collections::{BTreeSet, HashSet};

use super::diag::{Diagnostic, DiagnosticKind, ParseError, Pos};
use super::{collect_vars, DefaultRule, RuleBase, Scenario, StrictRule};
use crate::logic::{
    canonicalize, fold_arity, fold_surface, FoldError, Literal, Modality, PredicateFlags, PredicateRegistry,
    PredicateSymbol, Sign, Symbol, Term, TimeExpr, NOT_PREFIX,
};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    DotDot,
    Colon,
    Amp,
    Arrow,
    Minus,
    Plus,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<(Tok, Pos)> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos::new(line, col);
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                match s.parse() {
                    Ok(n) => out.push((Tok::Int(n), pos)),
                    Err(_) => diags.push(Diagnostic::new(pos, DiagnosticKind::Syntax, "integer too large")),
                }
            }
            _ => {
                bump!();
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    '&' => Tok::Amp,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '/' => Tok::Slash,
                    '.' if chars.peek() == Some(&'.') => {
                        bump!();
                        Tok::DotDot
                    }
                    '.' => Tok::Dot,
                    '<' if chars.peek() == Some(&'-') => {
                        bump!();
                        Tok::Arrow
                    }
                    other => {
                        diags.push(Diagnostic::new(
                            pos,
                            DiagnosticKind::Syntax,
                            format!("unexpected character `{other}`"),
                        ));
                        continue;
                    }
                };
                out.push((tok, pos));
            }
        }
    }
    out.push((Tok::Eof, Pos::new(line, col)));
    out
}

// ---------------------------------------------------------------------------
// Raw syntax

#[derive(Clone, Debug)]
enum RawArg {
    Ident(String, Pos),
    Int(i64, Pos),
    /// `T+1`, `T-1`
    Offset(String, i64, Pos),
}

impl RawArg {
    fn pos(&self) -> Pos {
        match self {
            RawArg::Ident(_, p) | RawArg::Int(_, p) | RawArg::Offset(_, _, p) => *p,
        }
    }
}

#[derive(Clone, Debug)]
struct RawLiteral {
    negated: bool,
    keyword: String,
    args: Vec<RawArg>,
    pos: Pos,
}

#[derive(Debug)]
enum RawStatement {
    Predicate {
        name: String,
        arity: i64,
        layer: i64,
        flags: Vec<(String, Pos)>,
        pos: Pos,
    },
    Rule {
        id: String,
        layer: i64,
        allow_same: bool,
        head: Vec<RawLiteral>,
        body: Vec<RawLiteral>,
        pos: Pos,
    },
    Default {
        id: String,
        layer: i64,
        allow_same: bool,
        prerequisite: Vec<RawLiteral>,
        consequent: Vec<RawLiteral>,
        constraint: Vec<RawLiteral>,
        pos: Pos,
    },
    Label(String, Pos),
    Agents(Vec<(String, Pos)>),
    States(i64, i64, Pos),
    Fact(RawLiteral),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Rules,
    Scenario,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::new(
            self.pos(),
            DiagnosticKind::Syntax,
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.next().1;
                Ok((s, p))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        match self.peek() {
            Tok::Ident(s) if s == kw => Ok(self.next().1),
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn int(&mut self, what: &str) -> PResult<i64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Skips past the next `.` so parsing can resume at the next statement.
    fn recover(&mut self) {
        loop {
            match self.next().0 {
                Tok::Dot | Tok::Eof => return,
                _ => {}
            }
        }
    }

    fn statements(&mut self, kind: FileKind, diags: &mut Vec<Diagnostic>) -> Vec<RawStatement> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            let res = match kind {
                FileKind::Rules => self.rule_statement(),
                FileKind::Scenario => self.scenario_statement(),
            };
            match res {
                Ok(s) => out.push(s),
                Err(d) => {
                    diags.push(d);
                    self.recover();
                }
            }
        }
        out
    }

    fn rule_statement(&mut self) -> PResult<RawStatement> {
        let (word, pos) = self.ident("`predicate`, `rule` or `default`")?;
        match word.as_str() {
            "predicate" => {
                let (name, _) = self.ident("predicate name")?;
                self.expect(Tok::Slash)?;
                let arity = self.int("surface arity")?;
                self.keyword("layer")?;
                let layer = self.int("layer number")?;
                let mut flags = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    flags.push(self.ident("flag")?);
                }
                self.expect(Tok::Dot)?;
                Ok(RawStatement::Predicate { name, arity, layer, flags, pos })
            }
            "rule" => {
                let (id, layer, allow_same) = self.rule_header()?;
                let head = self.literal_list()?;
                let body = if *self.peek() == Tok::Arrow {
                    self.next();
                    self.literal_list()?
                } else {
                    Vec::new()
                };
                self.expect(Tok::Dot)?;
                Ok(RawStatement::Rule { id, layer, allow_same, head, body, pos })
            }
            "default" => {
                let (id, layer, allow_same) = self.rule_header()?;
                let prerequisite = if *self.peek() == Tok::Colon { Vec::new() } else { self.literal_list()? };
                self.expect(Tok::Colon)?;
                let consequent = self.literal_list()?;
                let constraint = if *self.peek() == Tok::LBracket {
                    self.next();
                    let c = self.literal_list()?;
                    self.expect(Tok::RBracket)?;
                    c
                } else {
                    Vec::new()
                };
                self.expect(Tok::Dot)?;
                Ok(RawStatement::Default { id, layer, allow_same, prerequisite, consequent, constraint, pos })
            }
            other => Err(Diagnostic::new(
                pos,
                DiagnosticKind::Syntax,
                format!("expected `predicate`, `rule` or `default`, found `{other}`"),
            )),
        }
    }

    fn rule_header(&mut self) -> PResult<(String, i64, bool)> {
        let (id, _) = self.ident("rule id")?;
        self.keyword("layer")?;
        let layer = self.int("layer number")?;
        let allow_same = matches!(self.peek(), Tok::Ident(s) if s == "allow_same");
        if allow_same {
            self.next();
        }
        self.expect(Tok::Colon)?;
        Ok((id, layer, allow_same))
    }

    fn literal_list(&mut self) -> PResult<Vec<RawLiteral>> {
        let mut out = vec![self.literal()?];
        while *self.peek() == Tok::Amp {
            self.next();
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn literal(&mut self) -> PResult<RawLiteral> {
        let pos = self.pos();
        let negated = *self.peek() == Tok::Minus;
        if negated {
            self.next();
        }
        let (keyword, _) = self.ident("a literal such as `holds(...)`")?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.arg()?];
        while *self.peek() == Tok::Comma {
            self.next();
            args.push(self.arg()?);
        }
        self.expect(Tok::RParen)?;
        Ok(RawLiteral { negated, keyword, args, pos })
    }

    fn arg(&mut self) -> PResult<RawArg> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(RawArg::Int(n, pos))
            }
            Tok::Ident(s) => {
                self.next();
                let sign = match self.peek() {
                    Tok::Plus => 1,
                    Tok::Minus => -1,
                    _ => return Ok(RawArg::Ident(s, pos)),
                };
                self.next();
                let n = self.int("time offset")?;
                Ok(RawArg::Offset(s, sign * n, pos))
            }
            _ => Err(self.unexpected("an argument")),
        }
    }

    fn scenario_statement(&mut self) -> PResult<RawStatement> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(w) if w == "scenario" => {
                self.next();
                let (label, _) = self.ident("scenario label")?;
                self.expect(Tok::Dot)?;
                Ok(RawStatement::Label(label, pos))
            }
            Tok::Ident(w) if w == "agents" => {
                self.next();
                let mut agents = vec![self.ident("agent name")?];
                while *self.peek() == Tok::Comma {
                    self.next();
                    agents.push(self.ident("agent name")?);
                }
                self.expect(Tok::Dot)?;
                Ok(RawStatement::Agents(agents))
            }
            Tok::Ident(w) if w == "states" => {
                self.next();
                let lo = self.int("first state")?;
                self.expect(Tok::DotDot)?;
                let hi = self.int("last state")?;
                self.expect(Tok::Dot)?;
                Ok(RawStatement::States(lo, hi, pos))
            }
            _ => {
                let lit = self.literal()?;
                self.expect(Tok::Dot)?;
                Ok(RawStatement::Fact(lit))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Resolution

/// How identifiers in agent positions are read.
enum Names<'a> {
    /// Capitalized identifiers are variables.
    Rules,
    /// Capitalized identifiers must be declared agents.
    Scenario { agents: &'a BTreeSet<String> },
}

fn property_term(raw: &RawArg, modality: Modality, names: &Names<'_>) -> PResult<Term> {
    let (s, pos) = match raw {
        RawArg::Ident(s, p) => (s.as_str(), *p),
        other => {
            return Err(Diagnostic::new(
                other.pos(),
                DiagnosticKind::Syntax,
                "expected a property name as first argument",
            ))
        }
    };
    if s.starts_with(|c: char| c.is_ascii_uppercase()) {
        return match names {
            Names::Rules => Ok(Term::var(s)),
            Names::Scenario { .. } => {
                Err(Diagnostic::new(pos, DiagnosticKind::NonGroundFact, format!("fact has a variable property `{s}`")))
            }
        };
    }
    let mut depth = 0;
    let mut base = s;
    while let Some(rest) = base.strip_prefix(NOT_PREFIX) {
        depth += 1;
        base = rest;
    }
    if base.is_empty() {
        return Err(Diagnostic::new(pos, DiagnosticKind::Syntax, format!("`{s}` names no property")));
    }
    if depth > 0 && modality != Modality::Holds {
        return Err(Diagnostic::new(
            pos,
            DiagnosticKind::InvalidNegation,
            format!("`{NOT_PREFIX}` properties are only allowed under `holds`, not `{}`", modality.keyword()),
        ));
    }
    let mut t = Term::constant(base);
    for _ in 0..depth {
        t = Term::negated(t);
    }
    Ok(t)
}

fn agent_term(raw: &RawArg, names: &Names<'_>) -> PResult<Term> {
    match raw {
        RawArg::Ident(s, pos) => {
            if !s.starts_with(|c: char| c.is_ascii_uppercase()) {
                return Ok(Term::constant(s));
            }
            match names {
                Names::Rules => Ok(Term::var(s)),
                Names::Scenario { agents } if agents.contains(s) => Ok(Term::constant(s)),
                Names::Scenario { .. } => {
                    Err(Diagnostic::new(*pos, DiagnosticKind::UnknownAgent, format!("agent `{s}` is not declared")))
                }
            }
        }
        other => Err(Diagnostic::new(other.pos(), DiagnosticKind::Syntax, "expected an agent argument")),
    }
}

fn time_term(raw: &RawArg, names: &Names<'_>) -> PResult<TimeExpr> {
    let (var, off, pos) = match raw {
        RawArg::Int(n, _) => return Ok(TimeExpr::Lit(*n)),
        RawArg::Ident(s, p) => (s, 0, *p),
        RawArg::Offset(s, n, p) => (s, *n, *p),
    };
    if let Names::Scenario { .. } = names {
        return Err(Diagnostic::new(
            pos,
            DiagnosticKind::NonGroundFact,
            format!("fact time `{var}` is not an integer"),
        ));
    }
    if !var.starts_with(|c: char| c.is_ascii_uppercase()) {
        return Err(Diagnostic::new(
            pos,
            DiagnosticKind::Syntax,
            format!("time `{var}` must be a variable or an integer"),
        ));
    }
    if !(-1..=1).contains(&off) {
        return Err(Diagnostic::new(
            pos,
            DiagnosticKind::Syntax,
            format!("time offset {off:+} is out of range (only -1, 0, +1)"),
        ));
    }
    Ok(TimeExpr::Var(Symbol::new(var), off as i8))
}

/// Resolves a raw literal into a canonical literal. Without a registry
/// (scenario files) the surface form alone decides the folding.
fn resolve_literal(raw: &RawLiteral, names: &Names<'_>, registry: Option<&PredicateRegistry>) -> PResult<Literal> {
    let modality = Modality::from_keyword(&raw.keyword).ok_or_else(|| {
        Diagnostic::new(raw.pos, DiagnosticKind::Syntax, format!("unknown literal kind `{}`", raw.keyword))
    })?;
    let property = property_term(&raw.args[0], modality, names)?;
    let (agents, time) = if modality == Modality::Static {
        if raw.args.len() != 1 {
            return Err(Diagnostic::new(raw.pos, DiagnosticKind::Syntax, "`static` takes exactly one argument"));
        }
        (Vec::new(), None)
    } else {
        if raw.args.len() < 3 {
            return Err(Diagnostic::new(
                raw.pos,
                DiagnosticKind::Syntax,
                format!("`{}` needs a property, at least one agent and a time", raw.keyword),
            ));
        }
        let last = raw.args.len() - 1;
        let agents = raw.args[1..last].iter().map(|a| agent_term(a, names)).collect::<PResult<Vec<_>>>()?;
        (agents, Some(time_term(&raw.args[last], names)?))
    };
    let folded = match registry {
        Some(reg) => fold_arity(reg, modality, property, agents, time),
        None => fold_surface(modality, property, agents, time),
    };
    let atom = folded.map_err(|e| {
        let kind = match e {
            FoldError::Undeclared(_) => DiagnosticKind::UndeclaredPredicate,
            FoldError::ArityMismatch { .. } => DiagnosticKind::ArityMismatch,
            _ => DiagnosticKind::Syntax,
        };
        Diagnostic::new(raw.pos, kind, e.to_string())
    })?;
    let sign = if raw.negated { Sign::Neg } else { Sign::Pos };
    Ok(canonicalize(&Literal { atom, sign }))
}

fn resolve_list(
    raws: &[RawLiteral],
    registry: &PredicateRegistry,
    diags: &mut Vec<Diagnostic>,
) -> Option<Vec<Literal>> {
    let mut out = Vec::with_capacity(raws.len());
    let mut ok = true;
    for r in raws {
        match resolve_literal(r, &Names::Rules, Some(registry)) {
            Ok(l) => out.push(l),
            Err(d) => {
                diags.push(d);
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

fn check_layer(layer: i64, pos: Pos, diags: &mut Vec<Diagnostic>) -> Option<u8> {
    if (1..=3).contains(&layer) {
        Some(layer as u8)
    } else {
        diags.push(Diagnostic::new(pos, DiagnosticKind::InvalidLayer, format!("layer {layer} is outside 1..=3")));
        None
    }
}

/// Reports head variables that the body does not bind. Schemas with an empty
/// body quantify over the whole grounding domain and are exempt.
fn check_bound(id: &str, bound: &[Literal], derived: &[&[Literal]], pos: Pos, diags: &mut Vec<Diagnostic>) {
    if bound.is_empty() {
        return;
    }
    let have: BTreeSet<Symbol> = collect_vars(bound).into_iter().map(|(v, _)| v).collect();
    let need: BTreeSet<Symbol> =
        collect_vars(derived.iter().flat_map(|l| l.iter())).into_iter().map(|(v, _)| v).collect();
    for v in need.difference(&have) {
        diags.push(Diagnostic::new(
            pos,
            DiagnosticKind::UnboundHeadVariable,
            format!("variable `{v}` of `{id}` does not occur in its body"),
        ));
    }
}

/// Parses and validates a rule base.
pub fn parse_rulebase(text: &str) -> Result<RuleBase, ParseError> {
    let mut diags = Vec::new();
    let toks = lex(text, &mut diags);
    let statements = Parser { toks, at: 0 }.statements(FileKind::Rules, &mut diags);

    let mut rb = RuleBase::default();
    for st in &statements {
        let RawStatement::Predicate { name, arity, layer, flags, pos } = st else { continue };
        let mut ok = true;
        if name.starts_with(|c: char| c.is_ascii_uppercase()) || name.starts_with(NOT_PREFIX) {
            diags.push(Diagnostic::new(
                *pos,
                DiagnosticKind::Syntax,
                format!("predicate name `{name}` must be lowercase and must not start with `{NOT_PREFIX}`"),
            ));
            ok = false;
        }
        if !(1..=2).contains(arity) {
            diags.push(Diagnostic::new(
                *pos,
                DiagnosticKind::Syntax,
                format!("surface arity {arity} is not supported (1 or 2 agent arguments)"),
            ));
            ok = false;
        }
        let layer = check_layer(*layer, *pos, &mut diags);
        let mut f = PredicateFlags::default();
        for (flag, fpos) in flags {
            match flag.as_str() {
                "static" => f.is_static = true,
                "backward_persist" => f.backward_persistent = true,
                "unforeseeable" => f.unforeseeable = true,
                other => {
                    diags.push(Diagnostic::new(*fpos, DiagnosticKind::Syntax, format!("unknown flag `{other}`")));
                    ok = false;
                }
            }
        }
        let (Some(layer), true) = (layer, ok) else { continue };
        let sym = PredicateSymbol { name: Symbol::new(name), surface_arity: *arity as u8, layer, flags: f };
        if !rb.predicates.insert(sym) {
            diags.push(Diagnostic::new(
                *pos,
                DiagnosticKind::DuplicatePredicate,
                format!("predicate `{name}` is declared twice"),
            ));
        }
    }

    let mut ids = HashSet::new();
    for st in &statements {
        match st {
            RawStatement::Rule { id, layer, allow_same, head, body, pos } => {
                if !ids.insert(id.clone()) {
                    diags.push(Diagnostic::new(
                        *pos,
                        DiagnosticKind::DuplicateId,
                        format!("rule id `{id}` is used twice"),
                    ));
                }
                let layer = check_layer(*layer, *pos, &mut diags);
                let head = resolve_list(head, &rb.predicates, &mut diags);
                let body = resolve_list(body, &rb.predicates, &mut diags);
                let (Some(layer), Some(head), Some(body)) = (layer, head, body) else { continue };
                check_bound(id, &body, &[&head], *pos, &mut diags);
                rb.strict.push(StrictRule { id: Symbol::new(id), layer, allow_same: *allow_same, body, head });
            }
            RawStatement::Default { id, layer, allow_same, prerequisite, consequent, constraint, pos } => {
                if !ids.insert(id.clone()) {
                    diags.push(Diagnostic::new(
                        *pos,
                        DiagnosticKind::DuplicateId,
                        format!("rule id `{id}` is used twice"),
                    ));
                }
                let layer = check_layer(*layer, *pos, &mut diags);
                let pre = resolve_list(prerequisite, &rb.predicates, &mut diags);
                let cons = resolve_list(consequent, &rb.predicates, &mut diags);
                let constr = resolve_list(constraint, &rb.predicates, &mut diags);
                let (Some(layer), Some(pre), Some(cons), Some(constr)) = (layer, pre, cons, constr) else { continue };
                check_bound(id, &pre, &[&cons, &constr], *pos, &mut diags);
                rb.defaults.push(DefaultRule {
                    id: Symbol::new(id),
                    layer,
                    allow_same: *allow_same,
                    prerequisite: pre,
                    consequent: cons,
                    constraint: constr,
                });
            }
            _ => {}
        }
    }

    if diags.is_empty() {
        Ok(rb)
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(ParseError { diagnostics: diags })
    }
}

/// Parses and validates a scenario. Facts come back canonical and folded.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut diags = Vec::new();
    let toks = lex(text, &mut diags);
    let statements = Parser { toks, at: 0 }.statements(FileKind::Scenario, &mut diags);

    let mut label = None;
    let mut agents: Vec<Symbol> = Vec::new();
    let mut agent_names = BTreeSet::new();
    let mut range = None;
    for st in &statements {
        match st {
            RawStatement::Label(l, pos) => {
                if label.replace(l.clone()).is_some() {
                    diags.push(Diagnostic::new(*pos, DiagnosticKind::Syntax, "scenario label given twice"));
                }
            }
            RawStatement::Agents(list) => {
                for (a, apos) in list {
                    if !a.starts_with(|c: char| c.is_ascii_uppercase()) {
                        diags.push(Diagnostic::new(
                            *apos,
                            DiagnosticKind::Syntax,
                            format!("agent name `{a}` must start with an uppercase letter"),
                        ));
                    } else if !agent_names.insert(a.clone()) {
                        diags.push(Diagnostic::new(
                            *apos,
                            DiagnosticKind::DuplicateId,
                            format!("agent `{a}` declared twice"),
                        ));
                    } else {
                        agents.push(Symbol::new(a));
                    }
                }
            }
            RawStatement::States(lo, hi, pos) => {
                if range.is_some() {
                    diags.push(Diagnostic::new(*pos, DiagnosticKind::InvalidStateRange, "state range given twice"));
                } else if *lo != 0 || *hi < 1 {
                    diags.push(Diagnostic::new(
                        *pos,
                        DiagnosticKind::InvalidStateRange,
                        format!("state range {lo}..{hi} must start at 0 and contain at least two states"),
                    ));
                    range = Some(1);
                } else {
                    range = Some(*hi);
                }
            }
            _ => {}
        }
    }
    let max_state = match range {
        Some(m) => m,
        None => {
            diags.push(Diagnostic::new(
                Pos::new(1, 1),
                DiagnosticKind::InvalidStateRange,
                "missing `states 0..N.` declaration",
            ));
            1
        }
    };

    let names = Names::Scenario { agents: &agent_names };
    let mut facts = Vec::new();
    let mut positions = Vec::new();
    for st in &statements {
        let RawStatement::Fact(raw) = st else { continue };
        match resolve_literal(raw, &names, None) {
            Ok(lit) => {
                if let Some(t) = lit.time() {
                    if !(0..=max_state).contains(&t) {
                        diags.push(Diagnostic::new(
                            raw.args.last().map_or(raw.pos, RawArg::pos),
                            DiagnosticKind::TimeOutOfRange,
                            format!("state {t} is outside 0..{max_state}"),
                        ));
                        continue;
                    }
                }
                facts.push(lit);
                positions.push(raw.pos);
            }
            Err(d) => diags.push(d),
        }
    }

    if diags.is_empty() {
        Ok(Scenario { label: label.unwrap_or_default(), agents, max_state, facts, positions })
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(ParseError { diagnostics: diags })
    }
}
