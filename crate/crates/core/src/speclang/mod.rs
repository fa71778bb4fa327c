//! A small text format for algebras, alter egos, relations and check
//! scripts.
//!
//! ```text
//! # the bounded 2-chain and its order
//! algebra chain2 {
//!   size 2
//!   op join/2 = [0 1 1 1]
//!   op meet/2 = [0 0 0 1]
//!   op bot/0 = [0]
//!   op top/0 = [1]
//! }
//! ego twoT over chain2 {
//!   rel le/2 = {(0,0) (0,1) (1,1)}
//! }
//! check smoke {
//!   duality chain2 twoT expect iso;
//! }
//! ```
//!
//! Tables are flat rows in lexicographic argument order. Parsing never stops
//! at the first problem: it recovers at the next declaration and reports
//! every diagnostic, ordered by position.

mod elaborate;
mod lexer;
mod parser;
mod serialize;

use std::fmt;

pub use elaborate::{elaborate, CheckPlan, ElaborateOptions, Elaborated, COMMANDS};
pub use parser::{
    parse, AlgebraDecl, Arg, CheckDecl, CommandDecl, Decl, EgoDecl, EgoItem, Name, Nat, OpDef,
    PartialDef, RelDef, RelationDecl, SpecDocument,
};
pub use serialize::{serialize_algebra, serialize_catalog, serialize_ego, serialize_relation};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    /// Tokens that would have been accepted here, sorted.
    pub expected: Vec<String>,
    /// A second location, e.g. the first definition of a duplicate name.
    pub related: Option<Span>,
}

impl Diagnostic {
    pub(crate) fn new(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            span,
            message: message.into(),
            expected: Vec::new(),
            related: None,
        }
    }

    pub(crate) fn expecting(mut self, expected: &[&str]) -> Self {
        let mut e: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        e.sort();
        e.dedup();
        self.expected = e;
        self
    }

    pub(crate) fn related(mut self, span: Span) -> Self {
        self.related = Some(span);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, "; expected one of {}", self.expected.join(", "))?;
        }
        if let Some(r) = self.related {
            write!(f, "; first defined at {r}")?;
        }
        Ok(())
    }
}

/// Stable sort by position, so output does not depend on discovery order.
pub(crate) fn sort_diagnostics(d: &mut [Diagnostic]) {
    d.sort_by_key(|x| x.span);
}
