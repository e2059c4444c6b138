use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub fn new(line: usize, column: usize) -> Self {
        Pos { line, column }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Syntax,
    UndeclaredPredicate,
    ArityMismatch,
    DuplicateId,
    DuplicatePredicate,
    UnboundHeadVariable,
    InvalidLayer,
    InvalidNegation,
    InvalidStateRange,
    TimeOutOfRange,
    UnknownAgent,
    NonGroundFact,
}

impl DiagnosticKind {
    pub fn name(self) -> &'static str {
        match self {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::UndeclaredPredicate => "undeclared-predicate",
            DiagnosticKind::ArityMismatch => "arity-mismatch",
            DiagnosticKind::DuplicateId => "duplicate-id",
            DiagnosticKind::DuplicatePredicate => "duplicate-predicate",
            DiagnosticKind::UnboundHeadVariable => "unbound-head-variable",
            DiagnosticKind::InvalidLayer => "invalid-layer",
            DiagnosticKind::InvalidNegation => "invalid-negation",
            DiagnosticKind::InvalidStateRange => "invalid-state-range",
            DiagnosticKind::TimeOutOfRange => "time-out-of-range",
            DiagnosticKind::UnknownAgent => "unknown-agent",
            DiagnosticKind::NonGroundFact => "non-ground-fact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic { pos, kind, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error[{}]: {}", self.pos, self.kind.name(), self.message)
    }
}

/// All diagnostics produced while reading one input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
