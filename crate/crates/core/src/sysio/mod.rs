//! Expression grammar, document formats and rendering.
//!
//! Expressions:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)*          (right-associative)
//! exponent := ['+' | '-'] integer | '(' ['+' | '-'] integer ')'
//! atom     := integer | 'sqrt' '(' integer ')' | identifier | '(' expr ')'
//! ```
//!
//! `p/q` is ordinary division, so rational literals need no special form.
//! Unary minus binds looser than `^`: `-t^2` is `-(t^2)`.

mod document;
mod expr;
mod render;

use std::fmt;

pub use document::{
    parse_matrix, parse_reduced, parse_system, parse_tower, serialize_matrix, serialize_reduced, serialize_system,
    serialize_tower, Document, DocumentKind, SourceDocument,
};
pub use expr::{parse_expr, MAX_EXPONENT};
pub use render::{render_poly, render_ratfunc};

pub(crate) use expr::{is_identifier, parse_at};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    NonIntegerExponent,
    MalformedLiteral,
    UnknownRadicand,
    DivisionByZero,
    DimensionMismatch,
    MissingField,
    DuplicateField,
    InvalidDeclaration,
    InvalidStep,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownIdentifier => "unknown-identifier",
            ParseErrorKind::NonIntegerExponent => "non-integer-exponent",
            ParseErrorKind::MalformedLiteral => "malformed-literal",
            ParseErrorKind::UnknownRadicand => "unknown-radicand",
            ParseErrorKind::DivisionByZero => "division-by-zero",
            ParseErrorKind::DimensionMismatch => "dimension-mismatch",
            ParseErrorKind::MissingField => "missing-field",
            ParseErrorKind::DuplicateField => "duplicate-field",
            ParseErrorKind::InvalidDeclaration => "invalid-declaration",
            ParseErrorKind::InvalidStep => "invalid-step",
        }
    }
}

/// A positioned parse failure. `offset` is a byte offset into the source;
/// `line` and `column` are 1-based (column counts characters).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, offset: usize, message: impl Into<String>) -> Self {
        ParseError { kind, offset, line: 0, column: 0, expected: Vec::new(), message: message.into() }
    }

    /// Fills in line and column from the full source text.
    pub(crate) fn locate(mut self, src: &str) -> Self {
        self.offset = self.offset.min(src.len());
        while !src.is_char_boundary(self.offset) {
            self.offset -= 1;
        }
        let before = &src[..self.offset];
        self.line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map(|i| i + 1).unwrap_or(0);
        self.column = src[line_start..self.offset].chars().count() + 1;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
